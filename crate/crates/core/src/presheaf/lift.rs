use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::site::members;
use super::{enumerate_natural_maps, BaseSite, NatMap, PresheafError, PresheafPoset, Sieve};
use crate::diagram::EpMorphism;
use crate::order::{Elem, FinPoset, MonotoneMap, OrderError};
use crate::report::Report;
use crate::Budget;

/// A partial element at stage `p`: a sieve of definedness and a compatible
/// family on it. `family[q]` is `Some` exactly for `q` in the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InternalLiftElem {
    pub at: Elem,
    pub support: u64,
    pub family: Vec<Option<Elem>>,
}

impl InternalLiftElem {
    pub fn sieve(&self) -> Sieve {
        Sieve { at: self.at, members: self.support }
    }
}

struct LiftData {
    base: PresheafPoset,
    lifted: PresheafPoset,
    elems: Vec<Vec<InternalLiftElem>>,
    lookup: Vec<HashMap<InternalLiftElem, Elem>>,
}

/// The lift `L A` of a presheaf, computed stagewise. Cheap to clone.
#[derive(Clone)]
pub struct InternalLift {
    inner: Arc<LiftData>,
}

impl PartialEq for InternalLift {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.base == other.inner.base
    }
}

impl fmt::Debug for InternalLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({:?})", self.inner.base)
    }
}

pub fn internal_lift(a: &PresheafPoset, budget: &Budget) -> Result<InternalLift, PresheafError> {
    InternalLift::new(a, budget)
}

impl InternalLift {
    pub fn new(a: &PresheafPoset, budget: &Budget) -> Result<Self, PresheafError> {
        let site = a.site();
        let base = site.base();
        let order = site.top_down();
        let mut elems: Vec<Vec<InternalLiftElem>> = Vec::with_capacity(base.len());
        for p in base.elements() {
            let mut stage = Vec::new();
            for s in site.sieves_at(p) {
                let slots: Vec<Elem> = order.iter().copied().filter(|&q| s >> q & 1 == 1).collect();
                let mut family = vec![None; base.len()];
                families(a, &slots, 0, &mut family, &mut |f| {
                    stage.push(InternalLiftElem { at: p, support: s, family: f.to_vec() });
                    stage.len() <= budget.level_size
                });
                if stage.len() > budget.level_size {
                    return Err(PresheafError::TooLarge(format!(
                        "lift stage `{}` exceeds {} elements",
                        base.id(p),
                        budget.level_size
                    )));
                }
            }
            elems.push(stage);
        }
        let lookup: Vec<HashMap<InternalLiftElem, Elem>> = elems
            .iter()
            .map(|st| st.iter().cloned().enumerate().map(|(e, x)| (x, e)).collect())
            .collect();
        let stages: Vec<FinPoset> = base
            .elements()
            .map(|p| {
                let st = &elems[p];
                let ids = st.iter().map(|x| elem_id(a, x)).collect();
                FinPoset::from_fn(format!("L{}", base.id(p)), ids, |u, v| {
                    let (x, y) = (&st[u], &st[v]);
                    x.support & !y.support == 0
                        && members(x.support).all(|q| {
                            a.stage(q).leq(x.family[q].expect("in support"), y.family[q].expect("in support"))
                        })
                })
            })
            .collect::<Result<_, OrderError>>()?;
        let mut given = Vec::new();
        for p in base.elements() {
            for q in base.elements().filter(|&q| base.lt(q, p)) {
                let assign = elems[p].iter().map(|x| lookup[q][&restrict_elem(site, x, q)]).collect();
                given.push((p, q, MonotoneMap::new(&stages[p], &stages[q], assign)?));
            }
        }
        let lifted = PresheafPoset::new(site, stages, given)?;
        Ok(InternalLift { inner: Arc::new(LiftData { base: a.clone(), lifted, elems, lookup }) })
    }

    pub fn base(&self) -> &PresheafPoset {
        &self.inner.base
    }

    /// `L A` as a presheaf.
    pub fn presheaf(&self) -> &PresheafPoset {
        &self.inner.lifted
    }

    pub fn site(&self) -> &BaseSite {
        self.inner.base.site()
    }

    pub fn stage(&self, p: Elem) -> &FinPoset {
        self.inner.lifted.stage(p)
    }

    pub fn elem(&self, p: Elem, e: Elem) -> &InternalLiftElem {
        &self.inner.elems[p][e]
    }

    pub fn elems(&self, p: Elem) -> &[InternalLiftElem] {
        &self.inner.elems[p]
    }

    pub fn index_of(&self, x: &InternalLiftElem) -> Option<Elem> {
        self.inner.lookup[x.at].get(x).copied()
    }

    /// The nowhere-defined element, index 0 at every stage.
    pub fn bottom(&self) -> Elem {
        0
    }

    pub fn support(&self, p: Elem, e: Elem) -> Sieve {
        self.elem(p, e).sieve()
    }

    /// Defined on all of `↓p`.
    pub fn is_total(&self, p: Elem, e: Elem) -> bool {
        self.support(p, e).is_maximal(self.site())
    }

    /// The value at `p` of an element defined on all of `↓p`.
    pub fn value(&self, p: Elem, e: Elem) -> Option<Elem> {
        if self.is_total(p, e) {
            self.elem(p, e).family[p]
        } else {
            None
        }
    }

    pub fn eta(&self, p: Elem, x: Elem) -> Elem {
        let site = self.site();
        let a = self.base();
        let mut family = vec![None; site.len()];
        for q in members(site.down(p)) {
            family[q] = Some(a.restrict(p, q, x));
        }
        let e = InternalLiftElem { at: p, support: site.down(p), family };
        self.index_of(&e).expect("η lands in the lift")
    }

    /// `η: A -> L A`.
    pub fn eta_map(&self) -> NatMap {
        let a = self.base();
        let comps = a
            .site()
            .base()
            .elements()
            .map(|p| {
                let assign = a.stage(p).elements().map(|x| self.eta(p, x)).collect();
                MonotoneMap::new_unchecked(a.stage(p), self.stage(p), assign)
            })
            .collect();
        NatMap::new_unchecked(a, self.presheaf(), comps)
    }

    /// Lub of a directed family at stage `p`.
    pub fn lub(&self, p: Elem, family: &[Elem]) -> Result<Elem, OrderError> {
        self.stage(p).lub_of_directed(family)
    }

    /// An element whose support is neither empty nor maximal, if any.
    pub fn proper_support_witness(&self) -> Option<(Elem, Elem)> {
        let site = self.site();
        site.base()
            .elements()
            .flat_map(|p| (0..self.elems(p).len()).map(move |e| (p, e)))
            .find(|&(p, e)| self.support(p, e).is_proper(site))
    }
}

/// Compatible families on the slots (ordered top-down), depth-first.
fn families(
    a: &PresheafPoset,
    slots: &[Elem],
    depth: usize,
    family: &mut Vec<Option<Elem>>,
    visit: &mut dyn FnMut(&[Option<Elem>]) -> bool,
) -> bool {
    if depth == slots.len() {
        return visit(family);
    }
    let base = a.site().base();
    let q = slots[depth];
    for x in a.stage(q).elements() {
        let ok = slots[..depth]
            .iter()
            .filter(|&&r| base.lt(q, r))
            .all(|&r| a.restrict(r, q, family[r].expect("assigned")) == x);
        if ok {
            family[q] = Some(x);
            if !families(a, slots, depth + 1, family, visit) {
                return false;
            }
        }
    }
    family[q] = None;
    true
}

fn restrict_elem(site: &BaseSite, x: &InternalLiftElem, q: Elem) -> InternalLiftElem {
    let support = x.support & site.down(q);
    let family = (0..site.len())
        .map(|r| if support >> r & 1 == 1 { x.family[r] } else { None })
        .collect();
    InternalLiftElem { at: q, support, family }
}

fn elem_id(a: &PresheafPoset, x: &InternalLiftElem) -> String {
    let base = a.site().base();
    let parts: Vec<String> = members(x.support)
        .map(|q| format!("{}:{}", base.id(q), a.stage(q).id(x.family[q].expect("in support"))))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// `μ: L L A -> L A`, where `lla` is the lift of `la`'s presheaf.
pub fn internal_mu(la: &InternalLift, lla: &InternalLift) -> Result<NatMap, PresheafError> {
    if lla.base() != la.presheaf() {
        return Err(PresheafError::Mismatch("outer lift is not over the inner one".into()));
    }
    let site = la.site();
    let comps = site
        .base()
        .elements()
        .map(|p| {
            let assign = lla
                .elems(p)
                .iter()
                .map(|w| {
                    let mut support = 0u64;
                    let mut family = vec![None; site.len()];
                    for q in members(w.support) {
                        let inner = la.elem(q, w.family[q].expect("in support"));
                        if inner.support >> q & 1 == 1 {
                            support |= 1 << q;
                            family[q] = inner.family[q];
                        }
                    }
                    la.index_of(&InternalLiftElem { at: p, support, family })
                        .expect("flattened family is compatible")
                })
                .collect();
            MonotoneMap::new(lla.stage(p), la.stage(p), assign)
        })
        .collect::<Result<Vec<_>, _>>()?;
    NatMap::new(lla.presheaf(), la.presheaf(), comps)
}

/// The lift functor on a natural map.
pub fn lift_nat(la: &InternalLift, lb: &InternalLift, f: &NatMap) -> Result<NatMap, PresheafError> {
    if f.dom() != la.base() || f.cod() != lb.base() {
        return Err(PresheafError::Mismatch("lifted map has the wrong type".into()));
    }
    let site = la.site();
    let comps = site
        .base()
        .elements()
        .map(|p| {
            let assign = la
                .elems(p)
                .iter()
                .map(|x| {
                    let family = (0..site.len()).map(|q| x.family[q].map(|v| f.apply(q, v))).collect();
                    lb.index_of(&InternalLiftElem { at: p, support: x.support, family })
                        .expect("image family is compatible")
                })
                .collect();
            MonotoneMap::new(la.stage(p), lb.stage(p), assign)
        })
        .collect::<Result<Vec<_>, _>>()?;
    NatMap::new(la.presheaf(), lb.presheaf(), comps)
}

/// Kleisli extension of `f: A -> L B`, computed directly: defined where the
/// input is and where `f` of it is defined at that very stage.
pub fn internal_kleisli(la: &InternalLift, lb: &InternalLift, f: &NatMap) -> Result<InternalStrictMap, PresheafError> {
    if f.dom() != la.base() || f.cod() != lb.presheaf() {
        return Err(PresheafError::Mismatch("kernel has the wrong type".into()));
    }
    let site = la.site();
    let comps = site
        .base()
        .elements()
        .map(|p| {
            let assign = la
                .elems(p)
                .iter()
                .map(|x| {
                    let mut support = 0u64;
                    let mut family = vec![None; site.len()];
                    for q in members(x.support) {
                        let y = lb.elem(q, f.apply(q, x.family[q].expect("in support")));
                        if y.support >> q & 1 == 1 {
                            support |= 1 << q;
                            family[q] = y.family[q];
                        }
                    }
                    lb.index_of(&InternalLiftElem { at: p, support, family }).expect("compatible")
                })
                .collect();
            MonotoneMap::new(la.stage(p), lb.stage(p), assign)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let map = NatMap::new(la.presheaf(), lb.presheaf(), comps)?;
    Ok(InternalStrictMap { dom: la.clone(), cod: lb.clone(), map })
}

/// Monad laws, the Kleisli identity `f♯ = μ ∘ L f`, and naturality of `η`
/// and `μ`, all checked stagewise on `A`.
pub fn monad_law_report(a: &PresheafPoset, budget: &Budget) -> Result<Report, PresheafError> {
    let la = InternalLift::new(a, budget)?;
    let lla = InternalLift::new(la.presheaf(), budget)?;
    let llla = InternalLift::new(lla.presheaf(), budget)?;
    let mut r = Report::new();
    let eta_a = la.eta_map();
    r.record("eta_natural", NatMap::new(a, la.presheaf(), eta_a.components().to_vec()).err().map(|e| e.to_string()));
    let mu_a = internal_mu(&la, &lla)?;
    let mu_la = internal_mu(&lla, &llla)?;
    r.pass("mu_natural");
    let id = NatMap::identity(la.presheaf());
    let left_unit = lift_nat(&la, &lla, &eta_a)?.then(&mu_a)?;
    r.record("mu_after_lift_eta", (left_unit != id).then(|| "μ ∘ Lη is not the identity".to_string()));
    let right_unit = lla.eta_map().then(&mu_a)?;
    r.record("mu_after_eta_lift", (right_unit != id).then(|| "μ ∘ ηL is not the identity".to_string()));
    let assoc_l = lift_nat(&llla, &lla, &mu_a)?.then(&mu_a)?;
    let assoc_r = mu_la.then(&mu_a)?;
    r.record("mu_associative", (assoc_l != assoc_r).then(|| "μ ∘ Lμ differs from μ ∘ μL".to_string()));
    let mut kleisli_ok = None;
    for f in enumerate_natural_maps(a, la.presheaf(), budget)? {
        let direct = internal_kleisli(&la, &la, &f)?;
        let via = lift_nat(&la, &lla, &f)?.then(&mu_a)?;
        if direct.map != via {
            kleisli_ok = Some(format!("kernel {f:?}"));
            break;
        }
    }
    r.record("kleisli_is_mu_after_lift", kleisli_ok);
    Ok(r)
}

/// A natural map `L A -> L B` that is the Kleisli extension of its own
/// restriction along `η`.
#[derive(Clone, PartialEq)]
pub struct InternalStrictMap {
    dom: InternalLift,
    cod: InternalLift,
    map: NatMap,
}

impl InternalStrictMap {
    pub fn new(dom: &InternalLift, cod: &InternalLift, map: NatMap) -> Result<Self, PresheafError> {
        if map.dom() != dom.presheaf() || map.cod() != cod.presheaf() {
            return Err(PresheafError::Mismatch("strict map has the wrong type".into()));
        }
        let kernel = dom.eta_map().then(&map)?;
        let ext = internal_kleisli(dom, cod, &kernel)?;
        if ext.map != map {
            let site = dom.site();
            let (p, e) = site
                .base()
                .elements()
                .flat_map(|p| dom.stage(p).elements().map(move |e| (p, e)))
                .find(|&(p, e)| ext.map.apply(p, e) != map.apply(p, e))
                .expect("maps differ somewhere");
            return Err(PresheafError::NotStrict(site.base().id(p).into(), dom.stage(p).id(e).into()));
        }
        Ok(InternalStrictMap { dom: dom.clone(), cod: cod.clone(), map })
    }

    pub fn identity(la: &InternalLift) -> Self {
        InternalStrictMap { dom: la.clone(), cod: la.clone(), map: NatMap::identity(la.presheaf()) }
    }

    pub fn dom(&self) -> &InternalLift {
        &self.dom
    }

    pub fn cod(&self) -> &InternalLift {
        &self.cod
    }

    pub fn map(&self) -> &NatMap {
        &self.map
    }

    pub fn apply(&self, p: Elem, u: Elem) -> Elem {
        self.map.apply(p, u)
    }

    pub fn kernel(&self) -> NatMap {
        self.dom.eta_map().then(&self.map).expect("types match")
    }

    pub fn then(&self, next: &InternalStrictMap) -> Result<InternalStrictMap, PresheafError> {
        if self.cod != next.dom {
            return Err(PresheafError::Mismatch("strict maps do not compose".into()));
        }
        Ok(InternalStrictMap { dom: self.dom.clone(), cod: next.cod.clone(), map: self.map.then(&next.map)? })
    }
}

impl fmt::Debug for InternalStrictMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "strict {:?}", self.map)
    }
}

/// An ep-pair of internal strict maps, with the laws checked at every stage.
#[derive(Clone, Debug, PartialEq)]
pub struct InternalStrictEp {
    emb: InternalStrictMap,
    proj: InternalStrictMap,
}

impl InternalStrictEp {
    pub fn new(emb: InternalStrictMap, proj: InternalStrictMap) -> Result<Self, PresheafError> {
        if emb.cod != proj.dom || proj.cod != emb.dom {
            return Err(PresheafError::Mismatch("embedding and projection do not match up".into()));
        }
        let site = emb.dom.site().clone();
        for p in site.base().elements() {
            let (a, b) = (emb.dom.stage(p), emb.cod.stage(p));
            for x in a.elements() {
                if proj.apply(p, emb.apply(p, x)) != x {
                    return Err(PresheafError::NotEp(format!(
                        "section law fails at stage `{}` on {}",
                        site.base().id(p),
                        a.id(x)
                    )));
                }
            }
            for y in b.elements() {
                if !b.leq(emb.apply(p, proj.apply(p, y)), y) {
                    return Err(PresheafError::NotEp(format!(
                        "deflation law fails at stage `{}` on {}",
                        site.base().id(p),
                        b.id(y)
                    )));
                }
            }
        }
        Ok(InternalStrictEp { emb, proj })
    }

    /// The pair whose embedding is the extension of `kernel: A -> L B`; the
    /// projection is the stagewise right adjoint, checked to be natural and strict.
    pub fn from_kernel(la: &InternalLift, lb: &InternalLift, kernel: &NatMap) -> Result<Self, PresheafError> {
        let emb = internal_kleisli(la, lb, kernel)?;
        let site = la.site();
        let mut comps = Vec::with_capacity(site.len());
        for p in site.base().elements() {
            let (a, b) = (la.stage(p), lb.stage(p));
            let mut assign = Vec::with_capacity(b.len());
            for y in b.elements() {
                let below: Vec<Elem> = a.elements().filter(|&x| b.leq(emb.apply(p, x), y)).collect();
                let max = below
                    .iter()
                    .copied()
                    .find(|&m| below.iter().all(|&x| a.leq(x, m)))
                    .ok_or_else(|| PresheafError::NotEp(format!("no right adjoint at {}", b.id(y))))?;
                assign.push(max);
            }
            comps.push(MonotoneMap::new(b, a, assign)?);
        }
        let proj = InternalStrictMap::new(lb, la, NatMap::new(lb.presheaf(), la.presheaf(), comps)?)?;
        InternalStrictEp::new(emb, proj)
    }

    pub fn identity(la: &InternalLift) -> Self {
        InternalStrictEp { emb: InternalStrictMap::identity(la), proj: InternalStrictMap::identity(la) }
    }

    pub fn emb(&self) -> &InternalStrictMap {
        &self.emb
    }

    pub fn proj(&self) -> &InternalStrictMap {
        &self.proj
    }

    pub fn lower(&self) -> &InternalLift {
        &self.emb.dom
    }

    pub fn upper(&self) -> &InternalLift {
        &self.emb.cod
    }

    pub fn then(&self, next: &InternalStrictEp) -> Result<InternalStrictEp, PresheafError> {
        InternalStrictEp::new(self.emb.then(&next.emb)?, next.proj.then(&self.proj)?)
    }
}

impl EpMorphism for InternalStrictEp {
    type Object = PresheafPoset;
    type Map = NatMap;

    fn source(&self) -> &PresheafPoset {
        self.lower().base()
    }

    fn target(&self) -> &PresheafPoset {
        self.upper().base()
    }

    fn identity_on(obj: &PresheafPoset) -> Self {
        let la = InternalLift::new(obj, &Budget::default()).expect("objects of a diagram fit the default budget");
        InternalStrictEp::identity(&la)
    }

    fn compose(&self, next: &Self) -> Result<Self, String> {
        self.then(next).map_err(|e| e.to_string())
    }

    fn factor(up: &Self, down: &Self) -> NatMap {
        up.emb.map.then(&down.proj.map).expect("both pairs share their upper object")
    }
}

/// All internal strict ep-pairs `L A ⇄ L B`, one per admissible embedding kernel.
pub fn enumerate_internal_strict_eps(
    la: &InternalLift,
    lb: &InternalLift,
    budget: &Budget,
) -> Result<Vec<InternalStrictEp>, PresheafError> {
    Ok(enumerate_natural_maps(la.base(), lb.presheaf(), budget)?
        .iter()
        .filter_map(|k| InternalStrictEp::from_kernel(la, lb, k).ok())
        .collect())
}

/// All internal strict maps `L A -> L B`.
pub fn enumerate_internal_strict_maps(
    la: &InternalLift,
    lb: &InternalLift,
    budget: &Budget,
) -> Result<Vec<InternalStrictMap>, PresheafError> {
    enumerate_natural_maps(la.base(), lb.presheaf(), budget)?
        .iter()
        .map(|k| internal_kleisli(la, lb, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn lift_of_empty_over_a_point() {
        let site = BaseSite::point();
        let l = InternalLift::new(&PresheafPoset::empty(&site), &b()).unwrap();
        assert_eq!(l.stage(0).len(), 1);
    }

    #[test]
    fn lift_of_terminal_over_sierpinski() {
        let site = BaseSite::sierpinski();
        let l = InternalLift::new(&PresheafPoset::terminal(&site), &b()).unwrap();
        assert_eq!(l.stage(1).len(), 3);
        assert_eq!(l.stage(0).len(), 2);
        assert_eq!(l.stage(1).ids(), &["{}", "{0:*}", "{0:*,1:*}"]);
        // defined exactly over the open {0}
        let (p, e) = l.proper_support_witness().unwrap();
        assert_eq!((p, e), (1, 1));
        assert_eq!(l.support(1, 1).members, 0b01);
        assert_eq!(l.value(1, 1), None);
        assert_eq!(l.value(1, 2), Some(0));
    }

    #[test]
    fn monad_laws_on_sierpinski() {
        let site = BaseSite::sierpinski();
        let c2 = FinPoset::chain(2);
        let one = FinPoset::chain(1);
        let a = PresheafPoset::new(&site, vec![one.clone(), c2.clone()], vec![(1, 0, MonotoneMap::constant(&c2, &one, 0))])
            .unwrap();
        for x in [a, PresheafPoset::terminal(&site), PresheafPoset::empty(&site)] {
            let r = monad_law_report(&x, &b()).unwrap();
            assert!(r.all_pass(), "{}", r.render_text());
        }
    }

    #[test]
    fn strictness_is_checked() {
        let site = BaseSite::sierpinski();
        let l = InternalLift::new(&PresheafPoset::terminal(&site), &b()).unwrap();
        // sending everything to the top is natural but not strict
        let top = NatMap::from_assignments(l.presheaf(), l.presheaf(), vec![vec![1, 1], vec![2, 2, 2]]).unwrap();
        assert!(matches!(InternalStrictMap::new(&l, &l, top), Err(PresheafError::NotStrict(..))));
        assert!(InternalStrictMap::new(&l, &l, NatMap::identity(l.presheaf())).is_ok());
    }

    #[test]
    fn strict_eps_into_a_bigger_lift() {
        let site = BaseSite::sierpinski();
        let e = InternalLift::new(&PresheafPoset::empty(&site), &b()).unwrap();
        let t = InternalLift::new(&PresheafPoset::terminal(&site), &b()).unwrap();
        let eps = enumerate_internal_strict_eps(&e, &t, &b()).unwrap();
        assert_eq!(eps.len(), 1);
        let ids = enumerate_internal_strict_eps(&t, &t, &b()).unwrap();
        assert_eq!(ids, vec![InternalStrictEp::identity(&t)]);
    }
}
