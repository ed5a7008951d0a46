use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::{ChainApprox, SolverError};
use crate::order::{Elem, MonotoneMap};

/// An element `ε_{k<∞}(x)` of the colimit, stored as `x ∈ D_k`.
#[derive(Clone)]
pub struct FiniteRankElem {
    chain: Arc<ChainApprox>,
    rank: usize,
    value: Elem,
}

impl FiniteRankElem {
    pub fn new(chain: &Arc<ChainApprox>, rank: usize, value: Elem) -> Result<Self, SolverError> {
        let level = chain.level(rank)?;
        if value >= level.len() {
            return Err(SolverError::Mismatch(format!("D_{rank} has no element {value}")));
        }
        Ok(FiniteRankElem { chain: chain.clone(), rank, value })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn id(&self) -> &str {
        self.chain.levels()[self.rank].id(self.value)
    }

    pub fn chain(&self) -> &Arc<ChainApprox> {
        &self.chain
    }

    fn same_chain(&self, other: &FiniteRankElem) -> Result<(), SolverError> {
        if Arc::ptr_eq(&self.chain, &other.chain) {
            Ok(())
        } else {
            Err(SolverError::DifferentChains)
        }
    }

    /// The same element at a higher rank, pushed along the embeddings.
    pub fn coerce(&self, rank: usize) -> Result<FiniteRankElem, SolverError> {
        if rank < self.rank {
            return Err(SolverError::Mismatch(format!("cannot lower rank {} to {rank}", self.rank)));
        }
        let mut v = self.value;
        for k in self.rank..rank {
            v = self.chain.level_emb(k)?.apply(v);
        }
        Ok(FiniteRankElem { chain: self.chain.clone(), rank, value: v })
    }

    /// The minimal-rank representative: strip levels while the value lies in
    /// the image of the embedding below.
    pub fn canonical_rank(&self) -> FiniteRankElem {
        let mut rank = self.rank;
        let mut v = self.value;
        while rank > 0 {
            let e = self.chain.level_emb(rank - 1).expect("rank within chain");
            match preimage(e, v) {
                Some(x) => {
                    v = x;
                    rank -= 1;
                }
                None => break,
            }
        }
        FiniteRankElem { chain: self.chain.clone(), rank, value: v }
    }

    pub fn is_canonical(&self) -> bool {
        self.rank == 0 || preimage(self.chain.level_emb(self.rank - 1).expect("rank within chain"), self.value).is_none()
    }
}

fn preimage(e: &MonotoneMap, y: Elem) -> Option<Elem> {
    e.dom().elements().find(|&x| e.apply(x) == y)
}

impl PartialEq for FiniteRankElem {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.chain, &other.chain) && self.rank == other.rank && self.value == other.value
    }
}

impl Eq for FiniteRankElem {}

impl fmt::Debug for FiniteRankElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.id(), self.rank)
    }
}

/// The order of the colimit, decided at the larger of the two ranks.
pub fn compare(x: &FiniteRankElem, y: &FiniteRankElem) -> Result<Option<Ordering>, SolverError> {
    x.same_chain(y)?;
    let r = x.rank.max(y.rank);
    let (a, b) = (x.coerce(r)?.value, y.coerce(r)?.value);
    let d = &x.chain.levels()[r];
    Ok(match (d.leq(a, b), d.leq(b, a)) {
        (true, true) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        (false, false) => None,
    })
}

/// The lub of a finite directed family, computed at the maximum rank.
pub fn lub_finite_rank(xs: &[FiniteRankElem]) -> Result<FiniteRankElem, SolverError> {
    let first = xs.first().ok_or(SolverError::Order(crate::order::OrderError::EmptySubset))?;
    for x in xs {
        first.same_chain(x)?;
    }
    let r = xs.iter().map(|x| x.rank).max().expect("nonempty");
    let vals: Vec<Elem> = xs.iter().map(|x| x.coerce(r).map(|c| c.value)).collect::<Result<_, _>>()?;
    let top = first.chain.levels()[r].lub_of_directed(&vals)?;
    Ok(FiniteRankElem { chain: first.chain.clone(), rank: r, value: top }.canonical_rank())
}

/// Least fixed point of an endomap of a pointed poset by iteration from `⊥`,
/// with the number of steps that changed the value.
pub fn lfp(f: &MonotoneMap) -> Result<(Elem, usize), SolverError> {
    let d = f.dom();
    if d != f.cod() {
        return Err(SolverError::Mismatch(format!("{} -> {} is not an endomap", d.name(), f.cod().name())));
    }
    let mut x = d.bottom().ok_or_else(|| SolverError::NotPointed(d.name().to_string()))?;
    let mut steps = 0;
    loop {
        let y = f.apply(x);
        if y == x {
            break;
        }
        x = y;
        steps += 1;
        if steps > d.len() {
            return Err(SolverError::Inconsistent("Kleene iteration did not stabilize".into()));
        }
    }
    if let Some(y) = d.elements().find(|&y| f.apply(y) == y && !d.leq(x, y)) {
        return Err(SolverError::Inconsistent(format!("fixed point `{}` is not above `{}`", d.id(y), d.id(x))));
    }
    Ok((x, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::FinPoset;
    use crate::solver::{iterate_chain, ChainMode, DomainExpr};
    use crate::Budget;

    fn lift_chain(n: usize) -> Arc<ChainApprox> {
        let e = DomainExpr::lift(DomainExpr::Var);
        Arc::new(iterate_chain(&e, &FinPoset::empty(), n, ChainMode::Partial, &Budget::default()).unwrap())
    }

    #[test]
    fn canonical_forms() {
        let c = lift_chain(4);
        let x = FiniteRankElem::new(&c, 1, 0).unwrap();
        let up = x.coerce(3).unwrap();
        assert_eq!(up.rank(), 3);
        assert_eq!(up.canonical_rank(), x);
        assert_eq!(compare(&x, &up).unwrap(), Some(Ordering::Equal));
        // the new top at level 3 is not in the image of D_2
        let t = FiniteRankElem::new(&c, 3, 2).unwrap();
        assert!(t.is_canonical());
        assert_eq!(t.canonical_rank(), t);
        assert_eq!(compare(&x, &t).unwrap(), Some(Ordering::Less));
    }

    #[test]
    fn lub_of_comparable() {
        let c = lift_chain(3);
        let lo = FiniteRankElem::new(&c, 2, 0).unwrap();
        let hi = FiniteRankElem::new(&c, 2, 1).unwrap();
        let l = lub_finite_rank(&[lo.clone(), hi.clone()]).unwrap();
        assert_eq!(compare(&l, &hi).unwrap(), Some(Ordering::Equal));
        assert_eq!(l, hi.canonical_rank());
    }

    #[test]
    fn chains_must_agree() {
        let (a, b) = (lift_chain(2), lift_chain(2));
        let x = FiniteRankElem::new(&a, 1, 0).unwrap();
        let y = FiniteRankElem::new(&b, 1, 0).unwrap();
        assert_eq!(compare(&x, &y).unwrap_err(), SolverError::DifferentChains);
        assert_eq!(lub_finite_rank(&[x, y]).unwrap_err(), SolverError::DifferentChains);
    }

    #[test]
    fn rank_out_of_range() {
        let c = lift_chain(2);
        assert!(FiniteRankElem::new(&c, 3, 0).is_err());
        assert!(FiniteRankElem::new(&c, 0, 0).is_err(), "D_0 is empty");
    }

    #[test]
    fn kleene() {
        let c3 = FinPoset::chain(3);
        assert_eq!(lfp(&MonotoneMap::identity(&c3)).unwrap(), (0, 0));
        assert_eq!(lfp(&MonotoneMap::constant(&c3, &c3, 1)).unwrap(), (1, 1));
        let step = MonotoneMap::new(&c3, &c3, vec![1, 2, 2]).unwrap();
        assert_eq!(lfp(&step).unwrap(), (2, 2));
        let a2 = FinPoset::antichain(2);
        assert!(matches!(lfp(&MonotoneMap::identity(&a2)), Err(SolverError::NotPointed(_))));
    }
}
