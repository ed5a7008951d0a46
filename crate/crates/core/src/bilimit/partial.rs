use std::collections::HashMap;

use serde::Serialize;

use super::{coherent_tuples, BilimitError};
use crate::diagram::PartialEpDiagram;
use crate::lift::{
    enumerate_strict_ep_pairs, kleisli, lift_map, make_strict_ep, mu, omega, support, LiftPoset, StrictEpPair,
    StrictMap, BOTTOM,
};
use crate::order::{check_budget, for_each_monotone, function_count, tuple_id, Elem, FinPoset, MonotoneMap};
use crate::report::Report;
use crate::Budget;

/// The bilimit of a diagram of strict ep-pairs.
///
/// Apex elements are coherent tuples `σ ∈ Π L D_i` with at least one defined
/// component. The cone runs between lifts: `π_{i<∞}: L D∞ -> L D_i`.
#[derive(Clone, Debug)]
pub struct PartialBilimit {
    diagram: PartialEpDiagram,
    lifts: Vec<LiftPoset>,
    apex: FinPoset,
    lifted: LiftPoset,
    tuples: Vec<Vec<Elem>>,
    lookup: HashMap<Vec<Elem>, Elem>,
    cone: Vec<StrictEpPair>,
}

impl PartialBilimit {
    pub fn build(diagram: &PartialEpDiagram) -> Result<Self, BilimitError> {
        diagram.validate()?;
        let index = diagram.index();
        let lifts: Vec<LiftPoset> = diagram.objects().iter().map(LiftPoset::new).collect();
        let carriers: Vec<usize> = lifts.iter().map(|l| l.carrier().len()).collect();
        let tuples: Vec<Vec<Elem>> =
            coherent_tuples(index, &carriers, |i, j, y| diagram.edge(i, j).proj().apply(y))
                .into_iter()
                .filter(|t| t.iter().any(|&u| support(u)))
                .collect();
        let ids = tuples
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().enumerate().map(|(i, &u)| lifts[i].carrier().id(u)).collect();
                tuple_id(&parts)
            })
            .collect();
        let apex = FinPoset::from_fn("D∞", ids, |a, b| {
            index.elements().all(|i| lifts[i].carrier().leq(tuples[a][i], tuples[b][i]))
        })?;
        let lifted = LiftPoset::new(&apex);
        let lookup: HashMap<Vec<Elem>, Elem> = tuples.iter().cloned().enumerate().map(|(e, t)| (t, e)).collect();

        let mut cone = Vec::with_capacity(index.len());
        for i in index.elements() {
            let li = &lifts[i];
            let kernel = MonotoneMap::new_unchecked(&apex, li.carrier(), tuples.iter().map(|t| t[i]).collect());
            let proj = kleisli(&lifted, li, &kernel)?;
            let mut assign = Vec::with_capacity(li.base().len());
            for x in li.base().elements() {
                let t: Vec<Elem> = index.elements().map(|j| diagram.transfer(i, j).apply(li.eta(x))).collect();
                let s = *lookup.get(&t).ok_or_else(|| {
                    BilimitError::NotCoherent(format!("embedding of `{}` from `{}`", li.base().id(x), index.id(i)))
                })?;
                assign.push(lifted.eta(s));
            }
            let emb = kleisli(li, &lifted, &MonotoneMap::new(li.base(), lifted.carrier(), assign)?)?;
            cone.push(make_strict_ep(emb, proj)?);
        }
        Ok(PartialBilimit { diagram: diagram.clone(), lifts, apex, lifted, tuples, lookup, cone })
    }

    pub fn diagram(&self) -> &PartialEpDiagram {
        &self.diagram
    }

    pub fn apex(&self) -> &FinPoset {
        &self.apex
    }

    pub fn lifted_apex(&self) -> &LiftPoset {
        &self.lifted
    }

    pub fn tuple(&self, sigma: Elem) -> &[Elem] {
        &self.tuples[sigma]
    }

    pub fn element_of(&self, tuple: &[Elem]) -> Option<Elem> {
        self.lookup.get(tuple).copied()
    }

    pub fn cone(&self, i: Elem) -> &StrictEpPair {
        &self.cone[i]
    }

    pub fn cone_proj(&self, i: Elem) -> &StrictMap {
        self.cone[i].proj()
    }

    pub fn cone_emb(&self, i: Elem) -> &StrictMap {
        self.cone[i].emb()
    }

    pub fn own_cone(&self) -> PartialProjCone {
        PartialProjCone { apex: self.apex.clone(), lifted: self.lifted.clone(), pairs: self.cone.clone() }
    }

    pub fn top_cone(&self) -> PartialProjCone {
        let t = self.diagram.top();
        let pairs = self.diagram.index().elements().map(|i| self.diagram.edge(i, t).clone()).collect();
        PartialProjCone { apex: self.diagram.object(t).clone(), lifted: self.lifts[t].clone(), pairs }
    }

    fn coherence(&self) -> Option<String> {
        let idx = self.diagram.index();
        for (s, t) in self.tuples.iter().enumerate() {
            if !t.iter().any(|&u| support(u)) {
                return Some(format!("{} is nowhere defined", self.apex.id(s)));
            }
            for i in idx.elements() {
                for j in idx.elements().filter(|&j| idx.leq(i, j)) {
                    if self.diagram.edge(i, j).proj().apply(t[j]) != t[i] {
                        return Some(format!("{} at ({}, {})", self.apex.id(s), idx.id(i), idx.id(j)));
                    }
                }
            }
        }
        None
    }

    /// `π_{i<∞}` as built agrees with `μ ∘ L(σ ↦ σ_i)`.
    fn projection_via_mu(&self) -> Option<String> {
        self.diagram.index().elements().find_map(|i| {
            let kernel = MonotoneMap::new_unchecked(
                &self.apex,
                self.lifts[i].carrier(),
                self.tuples.iter().map(|t| t[i]).collect(),
            );
            let via = mu(self.lifts[i].base()).after(&lift_map(&kernel)).ok();
            (via.as_ref().map(|m| m.map()) != Some(self.cone_proj(i).map()))
                .then(|| format!("index `{}`", self.diagram.index().id(i)))
        })
    }

    fn cone_naturality(&self) -> Option<String> {
        let idx = self.diagram.index();
        for i in idx.elements() {
            for j in idx.elements().filter(|&j| idx.leq(i, j)) {
                let via = self.cone_proj(j).then(self.diagram.edge(i, j).proj()).ok();
                if via.as_ref() != Some(self.cone_proj(i)) {
                    return Some(format!("({}, {})", idx.id(i), idx.id(j)));
                }
            }
        }
        None
    }

    fn cone_laws(&self) -> Option<String> {
        self.diagram.index().elements().find_map(|i| {
            make_strict_ep(self.cone_emb(i).clone(), self.cone_proj(i).clone())
                .err()
                .map(|e| format!("{}: {e}", self.diagram.index().id(i)))
        })
    }

    /// Every `σ ∈ L D∞`, including `⊥`, is the least upper bound of its
    /// approximations; every upper bound in `L D∞` is tried as a competitor.
    pub fn approximation_identity(&self) -> Report {
        let mut r = Report::new();
        r.record("approximation_identity", self.approximation_witness());
        r
    }

    fn approximation_witness(&self) -> Option<String> {
        let idx = self.diagram.index();
        let c = self.lifted.carrier();
        for sigma in c.elements() {
            let family: Vec<Elem> = idx
                .elements()
                .map(|i| self.cone_emb(i).apply(self.cone_proj(i).apply(sigma)))
                .collect();
            let name = c.id(sigma);
            if let Err(e) = c.directedness_witness(&family) {
                return Some(format!("approximations of {name}: {e}"));
            }
            match self.lifted.lub(&family) {
                Ok(l) if l == sigma => {}
                Ok(l) => return Some(format!("lub of approximations of {name} is {}", c.id(l))),
                Err(e) => return Some(format!("approximations of {name}: {e}")),
            }
            if let Some(&u) = c.upper_bounds(&family).iter().find(|&&u| !c.leq(sigma, u)) {
                return Some(format!("{name} is not below the competitor {}", c.id(u)));
            }
        }
        None
    }

    pub fn colimit_view(&self) -> Report {
        let idx = self.diagram.index();
        let mut witness = None;
        'outer: for i in idx.elements() {
            for j in idx.elements().filter(|&j| idx.leq(i, j)) {
                let via = self.diagram.edge(i, j).emb().then(self.cone_emb(j)).ok();
                if via.as_ref() != Some(self.cone_emb(i)) {
                    witness = Some(format!("({}, {})", idx.id(i), idx.id(j)));
                    break 'outer;
                }
            }
        }
        let mut r = Report::new();
        r.record("colimit_view", witness);
        r
    }

    /// The apex is isomorphic to the top object: `σ ↦ σ_t` is defined
    /// everywhere and an order isomorphism.
    pub fn top_iso_map(&self) -> Option<MonotoneMap> {
        let t = self.diagram.top();
        let lt = &self.lifts[t];
        let assign: Option<Vec<Elem>> = self.tuples.iter().map(|s| lt.value(s[t])).collect();
        let m = MonotoneMap::new(&self.apex, lt.base(), assign?).ok()?;
        m.is_order_iso().then_some(m)
    }

    pub fn invariant_report(&self) -> Report {
        let mut r = self.diagram.validation_report();
        r.record("coherence_and_definedness", self.coherence());
        r.record("projection_via_mu", self.projection_via_mu());
        r.record("cone_ep_laws", self.cone_laws());
        r.record("cone_naturality", self.cone_naturality());
        r.extend("", self.diagram.choice_independence_report());
        r.extend("", self.approximation_identity());
        r.extend("", self.colimit_view());
        r.record(
            "top_iso",
            self.top_iso_map().is_none().then(|| "apex is not isomorphic to the top object".to_string()),
        );
        r
    }
}

/// A cone of strict projections `L H -> L D_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialProjCone {
    apex: FinPoset,
    lifted: LiftPoset,
    pairs: Vec<StrictEpPair>,
}

impl PartialProjCone {
    pub fn new(diagram: &PartialEpDiagram, apex: FinPoset, pairs: Vec<StrictEpPair>) -> Result<Self, BilimitError> {
        let lifted = LiftPoset::new(&apex);
        let cone = PartialProjCone { apex, lifted, pairs };
        cone.validate(diagram)?;
        Ok(cone)
    }

    pub fn apex(&self) -> &FinPoset {
        &self.apex
    }

    pub fn lifted_apex(&self) -> &LiftPoset {
        &self.lifted
    }

    pub fn pair(&self, i: Elem) -> &StrictEpPair {
        &self.pairs[i]
    }

    pub fn leg(&self, i: Elem) -> &StrictMap {
        self.pairs[i].proj()
    }

    pub fn adjoint(&self, i: Elem) -> &StrictMap {
        self.pairs[i].emb()
    }

    pub fn validate(&self, diagram: &PartialEpDiagram) -> Result<(), BilimitError> {
        let idx = diagram.index();
        if self.pairs.len() != idx.len() {
            return Err(BilimitError::ConeInvalid(format!(
                "{} legs for {} indexes",
                self.pairs.len(),
                idx.len()
            )));
        }
        for i in idx.elements() {
            if self.pairs[i].lower().base() != diagram.object(i) || self.pairs[i].upper() != &self.lifted {
                return Err(BilimitError::ConeInvalid(format!("leg `{}` has the wrong type", idx.id(i))));
            }
        }
        for i in idx.elements() {
            for j in idx.elements().filter(|&j| idx.lt(i, j)) {
                let via = self.leg(j).then(diagram.edge(i, j).proj()).ok();
                if via.as_ref() != Some(self.leg(i)) {
                    return Err(BilimitError::ConeInvalid(format!(
                        "legs not natural at ({}, {})",
                        idx.id(i),
                        idx.id(j)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Precomposes every leg with the projection of `ep: L apex ⇄ L H`.
    pub fn extend(&self, ep: &StrictEpPair) -> Result<PartialProjCone, BilimitError> {
        let pairs = self.pairs.iter().map(|p| p.then(ep)).collect::<Result<Vec<_>, _>>()?;
        Ok(PartialProjCone { apex: ep.upper().base().clone(), lifted: ep.upper().clone(), pairs })
    }
}

/// `h ↦ ⊤` iff some leg is defined at `h`, as a strict map `L H -> Ω`.
pub fn termination_support(c: &PartialProjCone) -> StrictMap {
    let om = omega();
    let assign = c
        .lifted
        .carrier()
        .elements()
        .map(|u| {
            let defined = c.pairs.iter().any(|p| support(p.proj().apply(u)));
            if defined {
                om.eta(0)
            } else {
                BOTTOM
            }
        })
        .collect();
    StrictMap::new(&c.lifted, &om, MonotoneMap::new(c.lifted.carrier(), om.carrier(), assign).expect("monotone"))
        .expect("strict")
}

/// The termination support equals the pointwise join of the leg supports.
fn support_is_join(c: &PartialProjCone) -> Option<String> {
    let s = termination_support(c);
    let om = omega();
    for u in c.lifted.carrier().elements() {
        let legs: Vec<Elem> = c.pairs.iter().map(|p| p.proj().support_map().apply(u)).collect();
        let join = om.carrier().join(&legs).unwrap_or(BOTTOM);
        if join != s.apply(u) {
            return Some(format!("at {}", c.lifted.carrier().id(u)));
        }
    }
    None
}

fn commutes(b: &PartialBilimit, c: &PartialProjCone, p: &[Elem]) -> bool {
    b.diagram.index().elements().all(|i| {
        c.lifted
            .carrier()
            .elements()
            .all(|u| b.cone_proj(i).apply(p[u]) == c.leg(i).apply(u))
    })
}

/// The mediating pair `(e∞, p∞)` between `L D∞` and `L H`.
///
/// `p∞` is undefined outside the termination support and otherwise the tuple
/// of leg values; `e∞` is the pointwise lub of `e_i ∘ π_{i<∞}`.
pub fn mediating_projection_partial(b: &PartialBilimit, c: &PartialProjCone) -> Result<StrictEpPair, BilimitError> {
    c.validate(&b.diagram)?;
    let idx = b.diagram.index();
    let lh = &c.lifted;
    let s = termination_support(c);
    let mut p = Vec::with_capacity(lh.carrier().len());
    for u in lh.carrier().elements() {
        if !support(s.apply(u)) {
            p.push(BOTTOM);
            continue;
        }
        let t: Vec<Elem> = idx.elements().map(|i| c.leg(i).apply(u)).collect();
        let sigma = b
            .element_of(&t)
            .ok_or_else(|| BilimitError::ConeInvalid(format!("legs at `{}` are not coherent", lh.carrier().id(u))))?;
        p.push(b.lifted.eta(sigma));
    }
    let mut e = Vec::with_capacity(b.lifted.carrier().len());
    for sigma in b.lifted.carrier().elements() {
        let family: Vec<Elem> = idx
            .elements()
            .map(|i| c.adjoint(i).apply(b.cone_proj(i).apply(sigma)))
            .collect();
        let lub = lh
            .lub(&family)
            .map_err(|err| BilimitError::LubUndefined(format!("at {}: {err}", b.lifted.carrier().id(sigma))))?;
        e.push(lub);
    }
    let emb = StrictMap::new(&b.lifted, lh, MonotoneMap::new(b.lifted.carrier(), lh.carrier(), e)?)?;
    let proj = StrictMap::new(lh, &b.lifted, MonotoneMap::new(lh.carrier(), b.lifted.carrier(), p)?)?;
    let pair = make_strict_ep(emb, proj)?;
    if !commutes(b, c, pair.proj().map().assignment()) {
        return Err(BilimitError::Inconsistent("mediating projection does not commute".into()));
    }
    Ok(pair)
}

/// `p∞` computed the other way, as the pointwise lub of `ε_{i<∞} ∘ p_i`.
fn projection_as_lub(b: &PartialBilimit, c: &PartialProjCone) -> Option<Vec<Elem>> {
    c.lifted
        .carrier()
        .elements()
        .map(|u| {
            let family: Vec<Elem> = b
                .diagram
                .index()
                .elements()
                .map(|i| b.cone_emb(i).apply(c.leg(i).apply(u)))
                .collect();
            b.lifted.lub(&family).ok()
        })
        .collect()
}

/// `e∞(σ)` is defined exactly when `σ` is.
pub fn support_of_e_infinity(b: &PartialBilimit, pair: &StrictEpPair) -> Report {
    let c = b.lifted.carrier();
    let witness = c
        .elements()
        .find(|&s| support(pair.emb().apply(s)) != support(s))
        .map(|s| format!("at {}", c.id(s)));
    let mut r = Report::new();
    r.record("e_infinity_support", witness);
    r
}

/// `π_{i<∞} ∘ p∞ ∘ e∞ = π_{i<∞}` on defined elements of the apex.
fn tilde_section(b: &PartialBilimit, pair: &StrictEpPair) -> Option<String> {
    for sigma in b.apex.elements() {
        let s = b.lifted.eta(sigma);
        let back = pair.proj().apply(pair.emb().apply(s));
        for i in b.diagram.index().elements() {
            if b.cone_proj(i).apply(back) != b.cone_proj(i).apply(s) {
                return Some(format!("{} at index {}", b.apex.id(sigma), b.diagram.index().id(i)));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialUniversalReport {
    pub exists: bool,
    pub commutes: bool,
    pub unique_among_strict_projections: bool,
    pub commuting_strict_projections: usize,
    /// Strict monotone maps `L H -> L D∞` making every triangle commute.
    pub commuting_strict_maps: usize,
    pub support_is_join: bool,
    pub e_infinity_support: bool,
    pub tilde_section: bool,
    pub projection_two_routes: bool,
}

impl PartialUniversalReport {
    pub fn passed(&self) -> bool {
        self.exists
            && self.commutes
            && self.unique_among_strict_projections
            && self.support_is_join
            && self.e_infinity_support
            && self.tilde_section
            && self.projection_two_routes
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        let flag = |b: bool, w: &str| (!b).then(|| w.to_string());
        r.record("mediating_exists", flag(self.exists, "no mediating pair"));
        r.record("mediating_commutes", flag(self.commutes, "a triangle fails"));
        r.record(
            "unique_among_strict_projections",
            flag(
                self.unique_among_strict_projections,
                &format!("{} commuting strict projections", self.commuting_strict_projections),
            ),
        );
        r.record("support_is_join", flag(self.support_is_join, "termination support differs from the join"));
        r.record("e_infinity_support", flag(self.e_infinity_support, "e∞ changes definedness"));
        r.record("tilde_section", flag(self.tilde_section, "p∞ ∘ e∞ moves a projection"));
        r.record(
            "projection_two_routes",
            flag(self.projection_two_routes, "support construction and lub construction disagree"),
        );
        r
    }
}

/// Exhaustive uniqueness among strict projections `L H -> L D∞`, plus the
/// support checks on the mediating pair.
pub fn verify_universal_partial(
    b: &PartialBilimit,
    c: &PartialProjCone,
    budget: &Budget,
) -> Result<PartialUniversalReport, BilimitError> {
    let mediating = mediating_projection_partial(b, c).ok();
    let commutes_med = mediating
        .as_ref()
        .is_some_and(|m| commutes(b, c, m.proj().map().assignment()));
    let eps = enumerate_strict_ep_pairs(&b.apex, &c.apex, budget)?;
    let commuting: Vec<&StrictEpPair> = eps
        .iter()
        .filter(|ep| commutes(b, c, ep.proj().map().assignment()))
        .collect();

    let lh = c.lifted.carrier();
    let la = b.lifted.carrier();
    check_budget(function_count(lh.len(), la.len()), budget)?;
    let mut fixed = vec![None; lh.len()];
    fixed[BOTTOM] = Some(BOTTOM);
    let mut maps = 0;
    for_each_monotone(lh, la, &fixed, |p| {
        if commutes(b, c, p) {
            maps += 1;
        }
        true
    });

    let unique = commuting.len() == 1 && mediating.as_ref() == Some(commuting[0]);
    let (e_support, tilde, routes) = match &mediating {
        Some(m) => (
            support_of_e_infinity(b, m).all_pass(),
            tilde_section(b, m).is_none(),
            projection_as_lub(b, c).as_deref() == Some(m.proj().map().assignment()),
        ),
        None => (false, false, false),
    };
    Ok(PartialUniversalReport {
        exists: mediating.is_some(),
        commutes: commutes_med,
        unique_among_strict_projections: unique,
        commuting_strict_projections: commuting.len(),
        commuting_strict_maps: maps,
        support_is_join: support_is_join(c).is_none(),
        e_infinity_support: e_support,
        tilde_section: tilde,
        projection_two_routes: routes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ep::make_ep;
    use crate::lift::lift_ep;

    fn empty_start() -> PartialEpDiagram {
        PartialEpDiagram::new(
            FinPoset::chain(2),
            vec![FinPoset::empty(), FinPoset::point()],
            vec![(0, 1, StrictEpPair::from_empty(&FinPoset::point()))],
        )
        .unwrap()
    }

    #[test]
    fn empty_start_apex_is_a_point() {
        let b = PartialBilimit::build(&empty_start()).unwrap();
        assert_eq!(b.apex().ids(), &["<bot,^*>"]);
        assert!(b.invariant_report().all_pass(), "{}", b.invariant_report().render_text());
    }

    #[test]
    fn single_object_excludes_the_undefined_tuple() {
        let p = FinPoset::chain(2);
        let b = PartialBilimit::build(&PartialEpDiagram::single(p.clone())).unwrap();
        assert_eq!(b.apex().len(), 2);
        assert!(b.top_iso_map().is_some());
        for s in b.lifted_apex().carrier().elements() {
            assert_eq!(b.cone_emb(0).apply(b.cone_proj(0).apply(s)), s);
        }
    }

    fn lifted_chain() -> PartialEpDiagram {
        let one = FinPoset::point();
        let c2 = FinPoset::chain(2);
        let e = make_ep(
            MonotoneMap::new(&one, &c2, vec![0]).unwrap(),
            MonotoneMap::constant(&c2, &one, 0),
        )
        .unwrap();
        PartialEpDiagram::new(
            FinPoset::chain(3),
            vec![FinPoset::empty(), one.clone(), c2],
            vec![(0, 1, StrictEpPair::from_empty(&one)), (1, 2, lift_ep(&e))],
        )
        .unwrap()
    }

    #[test]
    fn cones_and_uniqueness() {
        let b = PartialBilimit::build(&lifted_chain()).unwrap();
        assert_eq!(b.apex().len(), 2);
        assert!(b.invariant_report().all_pass());
        let own = mediating_projection_partial(&b, &b.own_cone()).unwrap();
        assert_eq!(own, StrictEpPair::identity(b.apex()));
        let top = mediating_projection_partial(&b, &b.top_cone()).unwrap();
        let iso = b.top_iso_map().unwrap();
        for h in b.top_cone().apex().elements() {
            let s = b.lifted_apex().value(top.proj().apply(h + 1)).unwrap();
            assert_eq!(iso.apply(s), h);
        }
        for c in [b.own_cone(), b.top_cone()] {
            let u = verify_universal_partial(&b, &c, &Budget::default()).unwrap();
            assert!(u.passed(), "{u:?}");
        }
    }

    #[test]
    fn support_of_undefined_legs() {
        let b = PartialBilimit::build(&empty_start()).unwrap();
        let c = b.own_cone();
        let s = termination_support(&c);
        assert_eq!(s.apply(BOTTOM), BOTTOM);
        assert!(support(s.apply(1)));
        assert!(support_is_join(&c).is_none());
    }

    #[test]
    fn projection_kleisli_agrees_with_mu() {
        let b = PartialBilimit::build(&lifted_chain()).unwrap();
        assert!(b.projection_via_mu().is_none());
    }
}
