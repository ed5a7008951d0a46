//! Embedding–projection pairs between finite posets.
//!
//! An ep-pair `A ⇄ B` is a monotone `emb: A -> B` with a right adjoint
//! `proj: B -> A` satisfying `proj ∘ emb = id` (section) and
//! `emb ∘ proj <= id` (deflation). Either half determines the other.

use thiserror::Error;

use crate::order::{check_budget, for_each_monotone, function_count, Elem, FinPoset, MonotoneMap, OrderError};
use crate::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpError {
    #[error("embedding and projection do not match up: {0}")]
    Mismatch(String),
    #[error("section law fails at `{0}`: proj(emb(x)) = `{1}`")]
    NotSection(String, String),
    #[error("deflation law fails at `{0}`: emb(proj(y)) = `{1}` is not below it")]
    NotDeflation(String, String),
    #[error("embedding is not injective: `{0}` and `{1}` collide")]
    NotInjective(String, String),
    #[error("map has no right adjoint making it an embedding: {0}")]
    NoAdjoint(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A validated embedding–projection pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpPair {
    emb: MonotoneMap,
    proj: MonotoneMap,
}

/// Validates the section and deflation laws.
pub fn make_ep(emb: MonotoneMap, proj: MonotoneMap) -> Result<EpPair, EpError> {
    if emb.cod() != proj.dom() || proj.cod() != emb.dom() {
        return Err(EpError::Mismatch(format!(
            "emb: {} -> {}, proj: {} -> {}",
            emb.dom().name(),
            emb.cod().name(),
            proj.dom().name(),
            proj.cod().name()
        )));
    }
    let a = emb.dom();
    let b = emb.cod();
    for x in a.elements() {
        let back = proj.apply(emb.apply(x));
        if back != x {
            return Err(EpError::NotSection(a.id(x).into(), a.id(back).into()));
        }
    }
    for y in b.elements() {
        let down = emb.apply(proj.apply(y));
        if !b.leq(down, y) {
            return Err(EpError::NotDeflation(b.id(y).into(), b.id(down).into()));
        }
    }
    // implied by the section law
    if let Some((x, y)) = collision(&emb) {
        return Err(EpError::NotInjective(a.id(x).into(), a.id(y).into()));
    }
    Ok(EpPair { emb, proj })
}

fn collision(f: &MonotoneMap) -> Option<(Elem, Elem)> {
    let a = f.dom();
    for x in a.elements() {
        for y in x + 1..a.len() {
            if f.apply(x) == f.apply(y) {
                return Some((x, y));
            }
        }
    }
    None
}

impl EpPair {
    pub fn identity(p: &FinPoset) -> Self {
        EpPair { emb: MonotoneMap::identity(p), proj: MonotoneMap::identity(p) }
    }

    pub fn emb(&self) -> &MonotoneMap {
        &self.emb
    }

    pub fn proj(&self) -> &MonotoneMap {
        &self.proj
    }

    /// The embedded poset `A`.
    pub fn lower(&self) -> &FinPoset {
        self.emb.dom()
    }

    /// The ambient poset `B`.
    pub fn upper(&self) -> &FinPoset {
        self.emb.cod()
    }

    /// `next ∘ self`: embeddings compose forwards, projections backwards.
    pub fn then(&self, next: &EpPair) -> Result<EpPair, EpError> {
        if self.upper() != next.lower() {
            return Err(EpError::Mismatch(format!(
                "cannot compose {} ⇄ {} with {} ⇄ {}",
                self.lower().name(),
                self.upper().name(),
                next.lower().name(),
                next.upper().name()
            )));
        }
        let emb = self.emb.then(&next.emb)?;
        let proj = next.proj.then(&self.proj)?;
        make_ep(emb, proj)
    }
}

/// `g ∘ f` for `f: A ⇄ B`, `g: B ⇄ C`.
pub fn compose_ep(f: &EpPair, g: &EpPair) -> Result<EpPair, EpError> {
    f.then(g)
}

/// The right adjoint by the pointwise formula `proj(y) = max{x : emb(x) <= y}`,
/// if that maximum exists for every `y` and the result is an ep-pair.
pub fn projection_by_formula(emb: &MonotoneMap) -> Option<EpPair> {
    let a = emb.dom();
    let b = emb.cod();
    let mut assignment = Vec::with_capacity(b.len());
    for y in b.elements() {
        let below: Vec<Elem> = a.elements().filter(|&x| b.leq(emb.apply(x), y)).collect();
        let max = below.iter().copied().find(|&m| below.iter().all(|&x| a.leq(x, m)))?;
        assignment.push(max);
    }
    let proj = MonotoneMap::new(b, a, assignment).ok()?;
    make_ep(emb.clone(), proj).ok()
}

/// Recovers the projection of an embedding by exhaustive search over all
/// monotone maps `B -> A`, cross-checked against the pointwise formula.
pub fn projection_from_embedding(emb: &MonotoneMap, budget: &Budget) -> Result<EpPair, EpError> {
    let a = emb.dom();
    let b = emb.cod();
    check_budget(function_count(b.len(), a.len()), budget)?;
    let mut found: Vec<EpPair> = Vec::new();
    for_each_monotone(b, a, &[], |assign| {
        let proj = MonotoneMap::new(b, a, assign.to_vec()).expect("enumerated maps are monotone");
        if let Ok(ep) = make_ep(emb.clone(), proj) {
            found.push(ep);
        }
        true
    });
    let formula = projection_by_formula(emb);
    match found.len() {
        0 => {
            if formula.is_some() {
                return Err(EpError::Inconsistent("formula found an adjoint the search missed".into()));
            }
            Err(EpError::NoAdjoint(emb.describe()))
        }
        1 => {
            let ep = found.pop().expect("one element");
            if formula.as_ref() != Some(&ep) {
                return Err(EpError::Inconsistent(format!(
                    "search and formula disagree on the adjoint of {}",
                    emb.describe()
                )));
            }
            Ok(ep)
        }
        n => Err(EpError::Inconsistent(format!("{n} distinct right adjoints of {}", emb.describe()))),
    }
}

/// All ep-pairs `A ⇄ B`, ordered by embedding then projection assignment.
///
/// Exhaustive over monotone embeddings and monotone projections; the section
/// law is used only to pin the projection on the image of the embedding.
pub fn enumerate_ep_pairs(a: &FinPoset, b: &FinPoset, budget: &Budget) -> Result<Vec<EpPair>, EpError> {
    check_budget(function_count(a.len(), b.len()), budget)?;
    check_budget(function_count(b.len(), a.len()), budget)?;
    let mut out = Vec::new();
    for_each_monotone(a, b, &[], |e| {
        let mut seen = vec![false; b.len()];
        if e.iter().any(|&y| std::mem::replace(&mut seen[y], true)) {
            return true;
        }
        let emb = MonotoneMap::new(a, b, e.to_vec()).expect("monotone");
        let mut fixed = vec![None; b.len()];
        for (x, &y) in e.iter().enumerate() {
            fixed[y] = Some(x);
        }
        for_each_monotone(b, a, &fixed, |p| {
            let proj = MonotoneMap::new(b, a, p.to_vec()).expect("monotone");
            if let Ok(ep) = make_ep(emb.clone(), proj) {
                out.push(ep);
            }
            true
        });
        true
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn identity_is_an_ep() {
        let p = FinPoset::antichain(3);
        let id = MonotoneMap::identity(&p);
        assert!(make_ep(id.clone(), id).is_ok());
    }

    #[test]
    fn point_at_bottom_is_an_ep() {
        let one = FinPoset::point();
        let c2 = FinPoset::chain(2);
        let emb = MonotoneMap::new(&one, &c2, vec![0]).unwrap();
        let proj = MonotoneMap::constant(&c2, &one, 0);
        assert!(make_ep(emb, proj).is_ok());
    }

    #[test]
    fn point_at_top_fails_deflation_at_bottom() {
        let one = FinPoset::point();
        let c2 = FinPoset::chain(2);
        let emb = MonotoneMap::new(&one, &c2, vec![1]).unwrap();
        let proj = MonotoneMap::constant(&c2, &one, 0);
        assert_eq!(make_ep(emb, proj).unwrap_err(), EpError::NotDeflation("0".into(), "1".into()));
    }

    #[test]
    fn section_failure_has_witness() {
        let c2 = FinPoset::chain(2);
        let emb = MonotoneMap::identity(&c2);
        let proj = MonotoneMap::constant(&c2, &c2, 0);
        assert_eq!(make_ep(emb, proj).unwrap_err(), EpError::NotSection("1".into(), "0".into()));
    }

    fn bottom_segment(n: usize, m: usize) -> EpPair {
        let a = FinPoset::chain(n);
        let b = FinPoset::chain(m);
        let emb = MonotoneMap::from_fn(&a, &b, |x| x).unwrap();
        let proj = MonotoneMap::from_fn(&b, &a, |y| y.min(n - 1)).unwrap();
        make_ep(emb, proj).unwrap()
    }

    #[test]
    fn composition() {
        let f = bottom_segment(1, 2);
        let g = bottom_segment(2, 3);
        let gf = compose_ep(&f, &g).unwrap();
        assert_eq!(gf, bottom_segment(1, 3));
        assert_eq!(f.then(&EpPair::identity(f.upper())).unwrap(), f);
        assert_eq!(EpPair::identity(f.lower()).then(&f).unwrap(), f);
        let h = bottom_segment(3, 4);
        let left = f.then(&g).unwrap().then(&h).unwrap();
        let right = f.then(&g.then(&h).unwrap()).unwrap();
        assert_eq!(left, right);
        assert!(matches!(g.then(&f), Err(EpError::Mismatch(_))));
    }

    #[test]
    fn adjoint_reconstruction() {
        let c2 = FinPoset::chain(2);
        let id = MonotoneMap::identity(&c2);
        assert_eq!(projection_from_embedding(&id, &budget()).unwrap(), EpPair::identity(&c2));

        let f = bottom_segment(1, 2);
        let rebuilt = projection_from_embedding(f.emb(), &budget()).unwrap();
        assert_eq!(rebuilt.proj(), &MonotoneMap::constant(&c2, &FinPoset::chain(1), 0));

        let a2 = FinPoset::antichain(2);
        let e = MonotoneMap::new(&a2, &c2, vec![0, 1]).unwrap();
        assert!(matches!(projection_from_embedding(&e, &budget()), Err(EpError::NoAdjoint(_))));
        assert!(projection_by_formula(&e).is_none());
    }

    #[test]
    fn ep_pair_counts() {
        let one = FinPoset::point();
        let c2 = FinPoset::chain(2);
        assert_eq!(enumerate_ep_pairs(&one, &one, &budget()).unwrap().len(), 1);
        // embedding at the top fails deflation, so only the bottom embedding survives
        assert_eq!(enumerate_ep_pairs(&one, &c2, &budget()).unwrap().len(), 1);
        assert_eq!(enumerate_ep_pairs(&c2, &FinPoset::antichain(2), &budget()).unwrap().len(), 0);
    }

    /// Independent oracle: all pairs of arbitrary functions, checked directly.
    fn brute_force_ep_count(a: &FinPoset, b: &FinPoset) -> usize {
        let all = |n: usize, m: usize| -> Vec<Vec<Elem>> {
            let total = function_count(n, m) as usize;
            (0..total)
                .map(|code| {
                    let mut rest = code;
                    (0..n)
                        .map(|_| {
                            let v = rest % m;
                            rest /= m;
                            v
                        })
                        .collect()
                })
                .collect()
        };
        let mut count = 0;
        for e in all(a.len(), b.len()) {
            let Ok(emb) = MonotoneMap::new(a, b, e) else { continue };
            for p in all(b.len(), a.len()) {
                let Ok(proj) = MonotoneMap::new(b, a, p) else { continue };
                if make_ep(emb.clone(), proj).is_ok() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let posets = [
            FinPoset::point(),
            FinPoset::chain(2),
            FinPoset::chain(3),
            FinPoset::antichain(2),
            FinPoset::generated("v", &["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap(),
        ];
        for a in &posets {
            for b in &posets {
                let eps = enumerate_ep_pairs(a, b, &budget()).unwrap();
                assert_eq!(eps.len(), brute_force_ep_count(a, b), "{a:?} ⇄ {b:?}");
                for ep in &eps {
                    assert_eq!(&projection_from_embedding(ep.emb(), &budget()).unwrap(), ep);
                    assert!(ep.emb().is_order_reflecting());
                }
            }
        }
    }
}
