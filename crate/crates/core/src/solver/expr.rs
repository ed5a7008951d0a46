use std::collections::BTreeMap;
use std::fmt;

use super::SolverError;
use crate::order::FinPoset;

/// Domain constructors in one variable `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainExpr {
    Var,
    Const(String, FinPoset),
    Unit,
    Empty,
    Sum(Box<DomainExpr>, Box<DomainExpr>),
    Prod(Box<DomainExpr>, Box<DomainExpr>),
    Arrow(Box<DomainExpr>, Box<DomainExpr>),
    Lift(Box<DomainExpr>),
}

impl DomainExpr {
    pub fn lift(e: DomainExpr) -> Self {
        DomainExpr::Lift(Box::new(e))
    }

    pub fn sum(a: DomainExpr, b: DomainExpr) -> Self {
        DomainExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: DomainExpr, b: DomainExpr) -> Self {
        DomainExpr::Prod(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: DomainExpr, b: DomainExpr) -> Self {
        DomainExpr::Arrow(Box::new(a), Box::new(b))
    }

    pub fn mentions_var(&self) -> bool {
        match self {
            DomainExpr::Var => true,
            DomainExpr::Const(..) | DomainExpr::Unit | DomainExpr::Empty => false,
            DomainExpr::Lift(a) => a.mentions_var(),
            DomainExpr::Sum(a, b) | DomainExpr::Prod(a, b) | DomainExpr::Arrow(a, b) => {
                a.mentions_var() || b.mentions_var()
            }
        }
    }
}

impl fmt::Display for DomainExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainExpr::Var => write!(f, "X"),
            DomainExpr::Const(name, _) => write!(f, "{name}"),
            DomainExpr::Unit => write!(f, "1"),
            DomainExpr::Empty => write!(f, "0"),
            DomainExpr::Sum(a, b) => write!(f, "({a} + {b})"),
            DomainExpr::Prod(a, b) => write!(f, "({a} * {b})"),
            DomainExpr::Arrow(a, b) => write!(f, "({a} -> {b})"),
            DomainExpr::Lift(a) => write!(f, "lift {a}"),
        }
    }
}

/// Named constants available to expressions.
pub type Constants = BTreeMap<String, FinPoset>;

/// `sierpinski` (the 2-chain) and `bool` (the 2-element antichain).
pub fn builtin_constants() -> Constants {
    let mut c = Constants::new();
    c.insert("sierpinski".into(), FinPoset::chain(2).renamed("sierpinski"));
    c.insert("bool".into(), FinPoset::antichain(2).renamed("bool"));
    c
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Arrow,
    Plus,
    Star,
    Open,
    Close,
    Word(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SolverError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        match c {
            c if c.is_whitespace() => k += 1,
            '+' => {
                out.push((pos, Tok::Plus));
                k += 1;
            }
            '*' => {
                out.push((pos, Tok::Star));
                k += 1;
            }
            '(' => {
                out.push((pos, Tok::Open));
                k += 1;
            }
            ')' => {
                out.push((pos, Tok::Close));
                k += 1;
            }
            '-' if chars.get(k + 1).map(|&(_, c)| c) == Some('>') => {
                out.push((pos, Tok::Arrow));
                k += 2;
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = k;
                while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                    k += 1;
                }
                let word: String = chars[start..k].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Word(word)));
            }
            other => {
                return Err(SolverError::Syntax { pos, msg: format!("unexpected character `{other}`") });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    consts: &'a Constants,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |&(p, _)| p)
    }

    fn arrow(&mut self) -> Result<DomainExpr, SolverError> {
        let lhs = self.sum()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.at += 1;
            let rhs = self.arrow()?;
            return Ok(DomainExpr::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<DomainExpr, SolverError> {
        let mut e = self.prod()?;
        while self.peek() == Some(&Tok::Plus) {
            self.at += 1;
            e = DomainExpr::sum(e, self.prod()?);
        }
        Ok(e)
    }

    fn prod(&mut self) -> Result<DomainExpr, SolverError> {
        let mut e = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            e = DomainExpr::prod(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<DomainExpr, SolverError> {
        if matches!(self.peek(), Some(Tok::Word(w)) if w == "lift") {
            self.at += 1;
            return Ok(DomainExpr::lift(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<DomainExpr, SolverError> {
        let pos = self.pos();
        let tok = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        match tok {
            Some(Tok::Open) => {
                let e = self.arrow()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(SolverError::Syntax { pos: self.pos(), msg: "expected `)`".into() });
                }
                self.at += 1;
                Ok(e)
            }
            Some(Tok::Word(w)) => match w.as_str() {
                "0" => Ok(DomainExpr::Empty),
                "1" => Ok(DomainExpr::Unit),
                "X" => Ok(DomainExpr::Var),
                "lift" => Err(SolverError::Syntax { pos, msg: "`lift` needs an argument".into() }),
                v if v.len() == 1 && v.chars().all(|c| c.is_ascii_uppercase()) => {
                    Err(SolverError::MultipleVariables(v.to_string()))
                }
                name => match self.consts.get(name) {
                    Some(p) => Ok(DomainExpr::Const(name.to_string(), p.clone())),
                    None if name.chars().all(|c| c.is_ascii_digit()) => {
                        Err(SolverError::Syntax { pos, msg: format!("only `0` and `1` are numerals, got `{name}`") })
                    }
                    None => Err(SolverError::UnknownConstant(name.to_string())),
                },
            },
            Some(t) => Err(SolverError::Syntax { pos, msg: format!("unexpected {}", describe(&t)) }),
            None => Err(SolverError::Syntax { pos, msg: "unexpected end of expression".into() }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Arrow => "`->`",
        Tok::Plus => "`+`",
        Tok::Star => "`*`",
        Tok::Open => "`(`",
        Tok::Close => "`)`",
        Tok::Word(_) => "word",
    }
}

/// Parses an expression. Precedence from tightest: `lift`, `*`, `+`, `->`;
/// `->` associates to the right, `*` and `+` to the left.
pub fn parse_expr(text: &str, consts: &Constants) -> Result<DomainExpr, SolverError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), consts };
    let e = p.arrow()?;
    if p.at < p.toks.len() {
        return Err(SolverError::Syntax { pos: p.pos(), msg: format!("unexpected {}", describe(&p.toks[p.at].1)) });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use DomainExpr::*;

    fn parse(s: &str) -> Result<DomainExpr, SolverError> {
        parse_expr(s, &builtin_constants())
    }

    #[test]
    fn basic_forms() {
        assert_eq!(parse("lift X").unwrap(), DomainExpr::lift(Var));
        assert_eq!(parse("(X -> X)").unwrap(), DomainExpr::arrow(Var, Var));
        assert_eq!(parse("1 + (X * X)").unwrap(), DomainExpr::sum(Unit, DomainExpr::prod(Var, Var)));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("X -> X -> X").unwrap(),
            DomainExpr::arrow(Var, DomainExpr::arrow(Var, Var))
        );
        assert_eq!(
            parse("1 + X * lift X").unwrap(),
            DomainExpr::sum(Unit, DomainExpr::prod(Var, DomainExpr::lift(Var)))
        );
        assert_eq!(parse("X + X + 0").unwrap(), DomainExpr::sum(DomainExpr::sum(Var, Var), Empty));
        assert_eq!(parse("lift lift X").unwrap(), DomainExpr::lift(DomainExpr::lift(Var)));
        assert_eq!(
            parse("X + X -> X").unwrap(),
            DomainExpr::arrow(DomainExpr::sum(Var, Var), Var)
        );
    }

    #[test]
    fn constants() {
        match parse("sierpinski -> X").unwrap() {
            Arrow(a, _) => assert!(matches!(*a, Const(ref n, ref p) if n == "sierpinski" && p.len() == 2)),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse("nope").unwrap_err(), SolverError::UnknownConstant("nope".into()));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("X + ").unwrap_err(), SolverError::Syntax { pos: 4, msg: "unexpected end of expression".into() });
        assert!(matches!(parse("(X"), Err(SolverError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("X ) "), Err(SolverError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("X & X"), Err(SolverError::Syntax { pos: 2, .. })));
        assert_eq!(parse("X -> Y").unwrap_err(), SolverError::MultipleVariables("Y".into()));
    }

    #[test]
    fn display_round_trips() {
        for s in ["lift X", "1 + X * X", "X -> X -> lift X", "(X + 1) * sierpinski"] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
    }
}
