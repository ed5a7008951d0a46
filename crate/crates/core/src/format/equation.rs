use std::path::Path;

use super::{read, resolve_poset, FormatError};
use crate::order::FinPoset;
use crate::solver::{builtin_constants, parse_expr, ChainMode, DomainExpr, SolverError};

/// A parsed equation file. `mode` and `depth` stay `None` when the file does
/// not set them, so callers can apply their own defaults.
#[derive(Clone, Debug)]
pub struct EquationFile {
    pub name: String,
    pub expr: DomainExpr,
    pub base: FinPoset,
    pub base_ref: String,
    pub mode: Option<ChainMode>,
    pub depth: Option<usize>,
}

/// Lines: `domain <name> = <expr>`, `base <poset|0|1>`, `mode total|partial`,
/// `depth <n>`, and `const <name> <poset>` to bind a constant for the
/// expression. `#` starts a comment.
pub fn parse_equation(text: &str, path: &Path) -> Result<EquationFile, FormatError> {
    let mut consts = builtin_constants();
    let mut domain: Option<(usize, String, String)> = None;
    let mut base = None;
    let mut mode = None;
    let mut depth = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "domain" => {
                let (name, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| FormatError::syntax(path, n + 1, "expected `domain <name> = <expr>`"))?;
                if domain.is_some() {
                    return Err(FormatError::syntax(path, n + 1, "only one `domain` line is allowed"));
                }
                domain = Some((n + 1, name.trim().to_string(), expr.trim().to_string()));
            }
            "base" if !rest.is_empty() => base = Some((resolve_poset(path, rest)?, rest.to_string())),
            "mode" => {
                mode = Some(match rest {
                    "total" => ChainMode::Total,
                    "partial" => ChainMode::Partial,
                    m => return Err(FormatError::syntax(path, n + 1, format!("unknown mode `{m}`"))),
                })
            }
            "depth" => {
                depth = Some(rest.parse().map_err(|_| FormatError::syntax(path, n + 1, format!("bad depth `{rest}`")))?)
            }
            "const" => match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
                [name, p] => {
                    consts.insert(name.to_string(), resolve_poset(path, p)?.renamed(*name));
                }
                _ => return Err(FormatError::syntax(path, n + 1, "expected `const <name> <poset>`")),
            },
            _ => return Err(FormatError::syntax(path, n + 1, format!("cannot parse `{line}`"))),
        }
    }
    let (line, name, text) = domain.ok_or_else(|| FormatError::syntax(path, 1, "missing `domain` line"))?;
    let expr = parse_expr(&text, &consts).map_err(|e| match e {
        SolverError::Syntax { pos, msg } => FormatError::syntax(path, line, format!("column {}: {msg}", pos + 1)),
        other => FormatError::syntax(path, line, other.to_string()),
    })?;
    let (base, base_ref) = base.unwrap_or_else(|| (FinPoset::empty(), "0".to_string()));
    Ok(EquationFile { name, expr, base, base_ref, mode, depth })
}

pub fn load_equation(path: &Path) -> Result<EquationFile, FormatError> {
    parse_equation(&read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directives() {
        let e = parse_equation("domain D = X -> X\nbase sierpinski\nmode total\ndepth 2\n", Path::new("m")).unwrap();
        assert_eq!(e.name, "D");
        assert_eq!(e.expr, DomainExpr::arrow(DomainExpr::Var, DomainExpr::Var));
        assert_eq!((e.base.len(), e.mode, e.depth), (2, Some(ChainMode::Total), Some(2)));
        let e = parse_equation("# lift\ndomain D = lift X\n", Path::new("m")).unwrap();
        assert_eq!((e.base.len(), e.mode, e.depth), (0, None, None));
    }

    #[test]
    fn expression_errors_point_at_the_line() {
        let e = parse_equation("base 0\ndomain D = X +\n", Path::new("m")).unwrap_err();
        assert!(matches!(e, FormatError::Syntax { line: 2, .. }), "{e}");
        let e = parse_equation("domain D = X -> Y\n", Path::new("m")).unwrap_err();
        assert!(e.to_string().contains("`Y`"), "{e}");
    }
}
