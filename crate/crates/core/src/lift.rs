//! The lift monad over two-valued truth: `L A` adds a fresh bottom `⊥` below
//! every element of `A`, and `u <= v` iff `u = ⊥` or both are defined and
//! ordered in `A`. Partial maps `A ⇀ B` are represented as strict maps
//! `L A -> L B`, so composition is ordinary function composition.
//!
//! Carrier layout: index 0 is `⊥` (id `bot`); index `x + 1` is `η(x)` (id `^x`).

use std::fmt;

use thiserror::Error;

use crate::ep::{enumerate_ep_pairs, make_ep, EpError, EpPair};
use crate::order::{Elem, FinPoset, MonotoneMap, OrderError};
use crate::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("map is not strict: ⊥ is sent to `{0}`")]
    NotStrict(String),
    #[error("map does not run between the expected lifted posets: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Ep(#[from] EpError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

pub const BOTTOM: Elem = 0;

/// `L A` together with its base `A`.
#[derive(Clone, PartialEq, Eq)]
pub struct LiftPoset {
    base: FinPoset,
    carrier: FinPoset,
}

/// Builds `L A`.
pub fn lift_poset(a: &FinPoset) -> LiftPoset {
    LiftPoset::new(a)
}

impl LiftPoset {
    pub fn new(base: &FinPoset) -> Self {
        let ids = std::iter::once("bot".to_string())
            .chain(base.ids().iter().map(|x| format!("^{x}")))
            .collect();
        let carrier = FinPoset::from_fn(format!("L{}", base.name()), ids, |u, v| {
            u == BOTTOM || (v != BOTTOM && base.leq(u - 1, v - 1))
        })
        .expect("lift order is a partial order");
        LiftPoset { base: base.clone(), carrier }
    }

    pub fn base(&self) -> &FinPoset {
        &self.base
    }

    pub fn carrier(&self) -> &FinPoset {
        &self.carrier
    }

    pub fn bottom(&self) -> Elem {
        BOTTOM
    }

    #[inline]
    pub fn eta(&self, x: Elem) -> Elem {
        x + 1
    }

    /// The defined value, or `None` at `⊥`.
    #[inline]
    pub fn value(&self, u: Elem) -> Option<Elem> {
        u.checked_sub(1)
    }

    /// Termination support: `true` iff `u` is defined.
    #[inline]
    pub fn support(&self, u: Elem) -> bool {
        u != BOTTOM
    }

    /// `η: A -> L A`.
    pub fn eta_map(&self) -> MonotoneMap {
        MonotoneMap::new_unchecked(&self.base, &self.carrier, self.base.elements().map(|x| x + 1).collect())
    }

    /// Least upper bound of a directed family in `L A`: `⊥` if no member is
    /// defined, otherwise the lub in `A` of the defined members.
    pub fn lub(&self, family: &[Elem]) -> Result<Elem, OrderError> {
        self.carrier.directedness_witness(family)?;
        let defined: Vec<Elem> = family.iter().filter_map(|&u| self.value(u)).collect();
        if defined.is_empty() {
            return Ok(BOTTOM);
        }
        Ok(self.eta(self.base.lub_of_directed(&defined)?))
    }
}

impl fmt::Debug for LiftPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({:?})", self.base)
    }
}

/// Termination support of an element (`⊥` is undefined).
pub fn support(u: Elem) -> bool {
    u != BOTTOM
}

/// Lub of a directed family in a lifted poset.
pub fn lift_lub(la: &LiftPoset, family: &[Elem]) -> Result<Elem, OrderError> {
    la.lub(family)
}

/// Truth values of the two-valued Ω, presented as `L 1`.
pub fn omega() -> LiftPoset {
    LiftPoset::new(&FinPoset::point())
}

/// A monotone map `L A -> L B` preserving `⊥`.
#[derive(Clone, PartialEq, Eq)]
pub struct StrictMap {
    dom: LiftPoset,
    cod: LiftPoset,
    map: MonotoneMap,
}

impl StrictMap {
    pub fn new(dom: &LiftPoset, cod: &LiftPoset, map: MonotoneMap) -> Result<Self, LiftError> {
        if map.dom() != dom.carrier() || map.cod() != cod.carrier() {
            return Err(LiftError::Mismatch(format!(
                "{} -> {} is not {} -> {}",
                map.dom().name(),
                map.cod().name(),
                dom.carrier().name(),
                cod.carrier().name()
            )));
        }
        if map.apply(BOTTOM) != BOTTOM {
            return Err(LiftError::NotStrict(cod.carrier().id(map.apply(BOTTOM)).into()));
        }
        Ok(StrictMap { dom: dom.clone(), cod: cod.clone(), map })
    }

    pub(crate) fn new_unchecked(dom: &LiftPoset, cod: &LiftPoset, assignment: Vec<Elem>) -> Self {
        debug_assert_eq!(assignment[0], BOTTOM);
        StrictMap {
            dom: dom.clone(),
            cod: cod.clone(),
            map: MonotoneMap::new_unchecked(dom.carrier(), cod.carrier(), assignment),
        }
    }

    pub fn identity(la: &LiftPoset) -> Self {
        StrictMap { dom: la.clone(), cod: la.clone(), map: MonotoneMap::identity(la.carrier()) }
    }

    /// The everywhere-undefined map.
    pub fn bottom(dom: &LiftPoset, cod: &LiftPoset) -> Self {
        StrictMap {
            dom: dom.clone(),
            cod: cod.clone(),
            map: MonotoneMap::constant(dom.carrier(), cod.carrier(), BOTTOM),
        }
    }

    pub fn dom(&self) -> &LiftPoset {
        &self.dom
    }

    pub fn cod(&self) -> &LiftPoset {
        &self.cod
    }

    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    #[inline]
    pub fn apply(&self, u: Elem) -> Elem {
        self.map.apply(u)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &StrictMap) -> Result<StrictMap, LiftError> {
        let map = self.map.after(&inner.map)?;
        Ok(StrictMap { dom: inner.dom.clone(), cod: self.cod.clone(), map })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &StrictMap) -> Result<StrictMap, LiftError> {
        next.after(self)
    }

    /// The partial map `A ⇀ B` this represents, as `A -> L B` (that is, `self ∘ η`).
    pub fn kernel(&self) -> MonotoneMap {
        MonotoneMap::new_unchecked(
            self.dom.base(),
            self.cod.carrier(),
            self.dom.base().elements().map(|x| self.apply(self.dom.eta(x))).collect(),
        )
    }

    /// Composite with the support map `L B -> Ω`.
    pub fn support_map(&self) -> StrictMap {
        let om = omega();
        let assign = self
            .dom
            .carrier()
            .elements()
            .map(|u| if support(self.apply(u)) { om.eta(0) } else { BOTTOM })
            .collect();
        StrictMap::new_unchecked(&self.dom, &om, assign)
    }

    pub fn leq_pointwise(&self, other: &StrictMap) -> bool {
        self.map.leq_pointwise(&other.map)
    }
}

impl fmt::Debug for StrictMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "strict {:?}", self.map)
    }
}

/// `η_A: A -> L A`.
pub fn eta(a: &FinPoset) -> MonotoneMap {
    LiftPoset::new(a).eta_map()
}

/// `μ_A: L L A -> L A`, collapsing the two bottoms.
pub fn mu(a: &FinPoset) -> StrictMap {
    let la = LiftPoset::new(a);
    let lla = LiftPoset::new(la.carrier());
    let assign = lla
        .carrier()
        .elements()
        .map(|w| lla.value(w).unwrap_or(BOTTOM))
        .collect();
    StrictMap::new_unchecked(&lla, &la, assign)
}

/// The lift functor on a monotone map.
pub fn lift_map(f: &MonotoneMap) -> StrictMap {
    let la = LiftPoset::new(f.dom());
    let lb = LiftPoset::new(f.cod());
    let assign = la
        .carrier()
        .elements()
        .map(|u| la.value(u).map_or(BOTTOM, |x| lb.eta(f.apply(x))))
        .collect();
    StrictMap::new_unchecked(&la, &lb, assign)
}

/// Kleisli extension `f♯: L A -> L B` of `f: A -> L B`.
pub fn kleisli(la: &LiftPoset, lb: &LiftPoset, f: &MonotoneMap) -> Result<StrictMap, LiftError> {
    if f.dom() != la.base() || f.cod() != lb.carrier() {
        return Err(LiftError::Mismatch(format!(
            "kernel {} -> {} does not run {} -> L{}",
            f.dom().name(),
            f.cod().name(),
            la.base().name(),
            lb.base().name()
        )));
    }
    let assign = la
        .carrier()
        .elements()
        .map(|u| la.value(u).map_or(BOTTOM, |x| f.apply(x)))
        .collect();
    Ok(StrictMap::new_unchecked(la, lb, assign))
}

/// A validated ep-pair of strict maps `L A ⇄ L B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictEpPair {
    emb: StrictMap,
    proj: StrictMap,
}

pub fn make_strict_ep(emb: StrictMap, proj: StrictMap) -> Result<StrictEpPair, LiftError> {
    if emb.cod != proj.dom || proj.cod != emb.dom {
        return Err(LiftError::Mismatch("strict embedding and projection do not match up".into()));
    }
    make_ep(emb.map.clone(), proj.map.clone())?;
    Ok(StrictEpPair { emb, proj })
}

impl StrictEpPair {
    pub fn identity(a: &FinPoset) -> Self {
        let la = LiftPoset::new(a);
        StrictEpPair { emb: StrictMap::identity(&la), proj: StrictMap::identity(&la) }
    }

    /// The canonical pair `L ∅ ⇄ L D`: both maps are constantly `⊥`.
    pub fn from_empty(d: &FinPoset) -> Self {
        let l0 = LiftPoset::new(&FinPoset::empty());
        let ld = LiftPoset::new(d);
        StrictEpPair { emb: StrictMap::bottom(&l0, &ld), proj: StrictMap::bottom(&ld, &l0) }
    }

    /// Builds the pair from the partial maps it represents.
    pub fn from_partial(
        a: &FinPoset,
        b: &FinPoset,
        emb_kernel: &MonotoneMap,
        proj_kernel: &MonotoneMap,
    ) -> Result<Self, LiftError> {
        let la = LiftPoset::new(a);
        let lb = LiftPoset::new(b);
        let emb = kleisli(&la, &lb, emb_kernel)?;
        let proj = kleisli(&lb, &la, proj_kernel)?;
        make_strict_ep(emb, proj)
    }

    pub fn emb(&self) -> &StrictMap {
        &self.emb
    }

    pub fn proj(&self) -> &StrictMap {
        &self.proj
    }

    pub fn lower(&self) -> &LiftPoset {
        &self.emb.dom
    }

    pub fn upper(&self) -> &LiftPoset {
        &self.emb.cod
    }

    /// The same pair viewed as an ordinary ep-pair between the carriers.
    pub fn as_ep(&self) -> EpPair {
        make_ep(self.emb.map.clone(), self.proj.map.clone()).expect("validated on construction")
    }

    /// Reads a carrier-level ep-pair as a strict one when both maps are strict.
    pub fn from_carrier_ep(la: &LiftPoset, lb: &LiftPoset, ep: &EpPair) -> Result<Self, LiftError> {
        let emb = StrictMap::new(la, lb, ep.emb().clone())?;
        let proj = StrictMap::new(lb, la, ep.proj().clone())?;
        Ok(StrictEpPair { emb, proj })
    }

    pub fn then(&self, next: &StrictEpPair) -> Result<StrictEpPair, LiftError> {
        make_strict_ep(self.emb.then(&next.emb)?, next.proj.then(&self.proj)?)
    }
}

/// `L` applied to both halves of an ep-pair.
pub fn lift_ep(e: &EpPair) -> StrictEpPair {
    let emb = lift_map(e.emb());
    let proj = lift_map(e.proj());
    make_strict_ep(emb, proj).expect("the lift functor preserves ep-pairs")
}

/// All strict ep-pairs `L A ⇄ L B`.
pub fn enumerate_strict_ep_pairs(a: &FinPoset, b: &FinPoset, budget: &Budget) -> Result<Vec<StrictEpPair>, LiftError> {
    let la = LiftPoset::new(a);
    let lb = LiftPoset::new(b);
    let eps = enumerate_ep_pairs(la.carrier(), lb.carrier(), budget)?;
    Ok(eps
        .iter()
        .filter_map(|ep| StrictEpPair::from_carrier_ep(&la, &lb, ep).ok())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::enumerate_monotone_maps;

    #[test]
    fn lifted_shapes() {
        assert_eq!(lift_poset(&FinPoset::empty()).carrier().len(), 1);
        let l1 = lift_poset(&FinPoset::point());
        assert_eq!(l1.carrier(), &FinPoset::chain(2).relabel(&["bot", "^*"]));
        let flat = lift_poset(&FinPoset::antichain(2));
        let c = flat.carrier();
        assert_eq!(c.len(), 3);
        assert!(c.leq(0, 1) && c.leq(0, 2) && !c.comparable(1, 2));
    }

    #[test]
    fn supports() {
        let la = lift_poset(&FinPoset::point());
        assert!(!la.support(la.bottom()));
        assert!(la.support(la.eta(0)));
        // μ(η(⊥)) = ⊥
        let m = mu(&FinPoset::point());
        let lla = m.dom();
        assert!(!support(m.apply(lla.eta(BOTTOM))));
    }

    #[test]
    fn kleisli_basics() {
        let a = FinPoset::chain(2);
        let la = lift_poset(&a);
        assert_eq!(kleisli(&la, &la, &la.eta_map()).unwrap(), StrictMap::identity(&la));
        let bot = MonotoneMap::constant(&a, la.carrier(), BOTTOM);
        assert_eq!(kleisli(&la, &la, &bot).unwrap(), StrictMap::bottom(&la, &la));

        let one = FinPoset::point();
        let l1 = lift_poset(&one);
        let k = kleisli(&l1, &l1, &eta(&one)).unwrap();
        assert_eq!(k.map().assignment(), &[0, 1]);
    }

    #[test]
    fn kleisli_is_mu_after_lift() {
        let a = FinPoset::antichain(2);
        let b = FinPoset::chain(2);
        let la = lift_poset(&a);
        let lb = lift_poset(&b);
        for f in enumerate_monotone_maps(&a, lb.carrier(), &Budget::default()).unwrap() {
            let via_mu = mu(&b).after(&lift_map(&f)).unwrap();
            assert_eq!(kleisli(&la, &lb, &f).unwrap(), via_mu);
        }
    }

    #[test]
    fn lift_lubs() {
        let a = FinPoset::chain(3);
        let la = lift_poset(&a);
        assert_eq!(la.lub(&[BOTTOM]).unwrap(), BOTTOM);
        assert_eq!(la.lub(&[BOTTOM, la.eta(1)]).unwrap(), la.eta(1));
        assert_eq!(la.lub(&[la.eta(0), la.eta(2)]).unwrap(), la.eta(2));
        let flat = lift_poset(&FinPoset::antichain(2));
        assert!(matches!(flat.lub(&[1, 2]), Err(OrderError::NotDirected(..))));
    }

    #[test]
    fn lifted_eps() {
        let c2 = FinPoset::chain(2);
        let id = lift_ep(&EpPair::identity(&c2));
        assert_eq!(id, StrictEpPair::identity(&c2));

        let one = FinPoset::point();
        let emb = MonotoneMap::new(&one, &c2, vec![0]).unwrap();
        let e = make_ep(emb, MonotoneMap::constant(&c2, &one, 0)).unwrap();
        let le = lift_ep(&e);
        assert_eq!(le.lower().carrier().len(), 2);
        assert_eq!(le.upper().carrier().len(), 3);
        assert_eq!(le.emb().map().assignment(), &[0, 1]);
        assert_eq!(le.proj().map().assignment(), &[0, 1, 1]);
    }

    #[test]
    fn empty_start() {
        for d in [FinPoset::empty(), FinPoset::point(), FinPoset::antichain(3)] {
            let e = StrictEpPair::from_empty(&d);
            assert!(make_strict_ep(e.emb().clone(), e.proj().clone()).is_ok());
            let rebuilt = StrictEpPair::from_partial(
                &FinPoset::empty(),
                &d,
                &MonotoneMap::new(&FinPoset::empty(), LiftPoset::new(&d).carrier(), vec![]).unwrap(),
                &MonotoneMap::constant(&d, LiftPoset::new(&FinPoset::empty()).carrier(), BOTTOM),
            )
            .unwrap();
            assert_eq!(rebuilt, e);
        }
    }

    #[test]
    fn non_strict_is_rejected() {
        let la = lift_poset(&FinPoset::point());
        let c = MonotoneMap::constant(la.carrier(), la.carrier(), 1);
        assert_eq!(StrictMap::new(&la, &la, c).unwrap_err(), LiftError::NotStrict("^*".into()));
    }

    impl FinPoset {
        fn relabel(&self, ids: &[&str]) -> FinPoset {
            FinPoset::from_fn("r", ids.iter().map(|s| s.to_string()).collect(), |a, b| self.leq(a, b)).unwrap()
        }
    }
}
