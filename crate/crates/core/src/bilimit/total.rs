use std::collections::HashMap;

use serde::Serialize;

use super::{coherent_tuples, BilimitError};
use crate::diagram::EpDiagram;
use crate::ep::{enumerate_ep_pairs, make_ep, EpPair};
use crate::order::{check_budget, for_each_monotone, function_count, tuple_id, Elem, FinPoset, MonotoneMap};
use crate::report::Report;
use crate::Budget;

/// The bilimit `D∞` of a diagram of ep-pairs: coherent tuples under the
/// pointwise order, with its cone of projections and their embeddings.
#[derive(Clone, Debug)]
pub struct Bilimit {
    diagram: EpDiagram,
    apex: FinPoset,
    tuples: Vec<Vec<Elem>>,
    lookup: HashMap<Vec<Elem>, Elem>,
    cone: Vec<EpPair>,
}

impl Bilimit {
    pub fn build(diagram: &EpDiagram) -> Result<Self, BilimitError> {
        diagram.validate()?;
        let index = diagram.index();
        let carriers: Vec<usize> = diagram.objects().iter().map(FinPoset::len).collect();
        let tuples = coherent_tuples(index, &carriers, |i, j, y| diagram.edge(i, j).proj().apply(y));
        let ids = tuples
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().enumerate().map(|(i, &x)| diagram.object(i).id(x)).collect();
                tuple_id(&parts)
            })
            .collect();
        let apex = FinPoset::from_fn("D∞", ids, |a, b| {
            index.elements().all(|i| diagram.object(i).leq(tuples[a][i], tuples[b][i]))
        })?;
        let lookup: HashMap<Vec<Elem>, Elem> = tuples.iter().cloned().enumerate().map(|(e, t)| (t, e)).collect();

        let mut cone = Vec::with_capacity(index.len());
        for i in index.elements() {
            let d = diagram.object(i);
            let proj = MonotoneMap::new_unchecked(&apex, d, tuples.iter().map(|t| t[i]).collect());
            let mut assign = Vec::with_capacity(d.len());
            for x in d.elements() {
                let t: Vec<Elem> = index.elements().map(|j| diagram.transfer(i, j).apply(x)).collect();
                let e = *lookup.get(&t).ok_or_else(|| {
                    BilimitError::NotCoherent(format!("embedding of `{}` from `{}`", d.id(x), index.id(i)))
                })?;
                assign.push(e);
            }
            let emb = MonotoneMap::new(d, &apex, assign)?;
            cone.push(make_ep(emb, proj)?);
        }
        Ok(Bilimit { diagram: diagram.clone(), apex, tuples, lookup, cone })
    }

    pub fn diagram(&self) -> &EpDiagram {
        &self.diagram
    }

    pub fn apex(&self) -> &FinPoset {
        &self.apex
    }

    pub fn tuple(&self, sigma: Elem) -> &[Elem] {
        &self.tuples[sigma]
    }

    pub fn element_of(&self, tuple: &[Elem]) -> Option<Elem> {
        self.lookup.get(tuple).copied()
    }

    /// `(ε_{i<∞}, π_{i<∞})`.
    pub fn cone(&self, i: Elem) -> &EpPair {
        &self.cone[i]
    }

    pub fn cone_proj(&self, i: Elem) -> &MonotoneMap {
        self.cone[i].proj()
    }

    pub fn cone_emb(&self, i: Elem) -> &MonotoneMap {
        self.cone[i].emb()
    }

    pub fn own_cone(&self) -> ProjCone {
        ProjCone { apex: self.apex.clone(), pairs: self.cone.clone() }
    }

    /// The cone with apex `D_t` for the top index `t`, legs `π_{i≤t}`.
    pub fn top_cone(&self) -> ProjCone {
        let t = self.diagram.top();
        let pairs = self.diagram.index().elements().map(|i| self.diagram.edge(i, t).clone()).collect();
        ProjCone { apex: self.diagram.object(t).clone(), pairs }
    }

    fn coherence(&self) -> Option<String> {
        let idx = self.diagram.index();
        for (s, t) in self.tuples.iter().enumerate() {
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
            make_ep(self.cone_emb(i).clone(), self.cone_proj(i).clone())
                .err()
                .map(|e| format!("{}: {e}", self.diagram.index().id(i)))
        })
    }

    /// Every `σ` is the least upper bound of its approximations
    /// `ε_{i<∞}(π_{i<∞}(σ))`, checked against every upper bound in the apex.
    pub fn approximation_identity(&self) -> Report {
        let mut r = Report::new();
        r.record("approximation_identity", self.approximation_witness());
        r
    }

    fn approximation_witness(&self) -> Option<String> {
        let idx = self.diagram.index();
        for sigma in self.apex.elements() {
            let family: Vec<Elem> = idx
                .elements()
                .map(|i| self.cone_emb(i).apply(self.cone_proj(i).apply(sigma)))
                .collect();
            let name = self.apex.id(sigma);
            if let Err(e) = self.apex.directedness_witness(&family) {
                return Some(format!("approximations of {name}: {e}"));
            }
            let ubs = self.apex.upper_bounds(&family);
            if !ubs.contains(&sigma) {
                return Some(format!("{name} is not above its approximations"));
            }
            if let Some(&c) = ubs.iter().find(|&&u| !self.apex.leq(sigma, u)) {
                return Some(format!("{name} is not below the upper bound {}", self.apex.id(c)));
            }
        }
        None
    }

    /// The embeddings form a cocone: `ε_{j<∞} ∘ ε_{i≤j} = ε_{i<∞}`.
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

    /// `π_{t<∞}` is an order isomorphism onto the top object with inverse `ε_{t<∞}`.
    pub fn top_iso(&self) -> Option<String> {
        let t = self.diagram.top();
        let p = self.cone_proj(t);
        match p.inverse() {
            Some(inv) if &inv == self.cone_emb(t) => None,
            Some(_) => Some("inverse of the top projection is not the top embedding".into()),
            None => Some(format!("projection to `{}` is not an isomorphism", self.diagram.index().id(t))),
        }
    }

    /// The full invariant suite for a built bilimit.
    pub fn invariant_report(&self) -> Report {
        let mut r = self.diagram.validation_report();
        r.record("coherence", self.coherence());
        r.record("cone_ep_laws", self.cone_laws());
        r.record("cone_naturality", self.cone_naturality());
        r.extend("", self.diagram.choice_independence_report());
        r.extend("", self.approximation_identity());
        r.extend("", self.colimit_view());
        r.record("top_iso", self.top_iso());
        r
    }
}

/// A cone of projections `H -> D_i` over a diagram, stored with their
/// embeddings as ep-pairs `D_i ⇄ H`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjCone {
    apex: FinPoset,
    pairs: Vec<EpPair>,
}

impl ProjCone {
    pub fn new(diagram: &EpDiagram, apex: FinPoset, pairs: Vec<EpPair>) -> Result<Self, BilimitError> {
        let cone = ProjCone { apex, pairs };
        cone.validate(diagram)?;
        Ok(cone)
    }

    pub fn apex(&self) -> &FinPoset {
        &self.apex
    }

    pub fn pair(&self, i: Elem) -> &EpPair {
        &self.pairs[i]
    }

    pub fn leg(&self, i: Elem) -> &MonotoneMap {
        self.pairs[i].proj()
    }

    pub fn adjoint(&self, i: Elem) -> &MonotoneMap {
        self.pairs[i].emb()
    }

    pub fn validate(&self, diagram: &EpDiagram) -> Result<(), BilimitError> {
        let idx = diagram.index();
        if self.pairs.len() != idx.len() {
            return Err(BilimitError::ConeInvalid(format!(
                "{} legs for {} indexes",
                self.pairs.len(),
                idx.len()
            )));
        }
        for i in idx.elements() {
            if self.pairs[i].lower() != diagram.object(i) || self.pairs[i].upper() != &self.apex {
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

    /// Precomposes every leg with the projection of `ep: apex ⇄ H`.
    pub fn extend(&self, ep: &EpPair) -> Result<ProjCone, BilimitError> {
        let pairs = self.pairs.iter().map(|p| p.then(ep)).collect::<Result<Vec<_>, _>>()?;
        Ok(ProjCone { apex: ep.upper().clone(), pairs })
    }
}

fn commutes(b: &Bilimit, c: &ProjCone, p: &[Elem]) -> bool {
    b.diagram
        .index()
        .elements()
        .all(|i| c.apex.elements().all(|h| b.tuples[p[h]][i] == c.leg(i).apply(h)))
}

/// The mediating pair `(e∞, p∞)` with `p∞: H -> D∞` and `e∞: D∞ -> H`.
///
/// `p∞(h)` is the tuple of leg values; `e∞` is the pointwise lub of
/// `e_i ∘ π_{i<∞}`, whose directedness is checked.
pub fn mediating_projection(b: &Bilimit, c: &ProjCone) -> Result<EpPair, BilimitError> {
    c.validate(&b.diagram)?;
    let idx = b.diagram.index();
    let h = &c.apex;
    let mut p = Vec::with_capacity(h.len());
    for x in h.elements() {
        let t: Vec<Elem> = idx.elements().map(|i| c.leg(i).apply(x)).collect();
        let s = b
            .element_of(&t)
            .ok_or_else(|| BilimitError::ConeInvalid(format!("legs at `{}` are not coherent", h.id(x))))?;
        p.push(s);
    }
    let mut e = Vec::with_capacity(b.apex.len());
    for sigma in b.apex.elements() {
        let family: Vec<Elem> = idx.elements().map(|i| c.adjoint(i).apply(b.tuples[sigma][i])).collect();
        let lub = h
            .lub_of_directed(&family)
            .map_err(|err| BilimitError::LubUndefined(format!("at {}: {err}", b.apex.id(sigma))))?;
        e.push(lub);
    }
    let pair = make_ep(MonotoneMap::new(&b.apex, h, e)?, MonotoneMap::new(h, &b.apex, p)?)?;
    if !commutes(b, c, pair.proj().assignment()) {
        return Err(BilimitError::Inconsistent("mediating projection does not commute".into()));
    }
    Ok(pair)
}

/// Outcome of the exhaustive uniqueness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalReport {
    pub exists: bool,
    pub commutes: bool,
    pub unique_among_projections: bool,
    /// Projections `H -> D∞` making every triangle commute.
    pub commuting_projections: usize,
    /// Arbitrary monotone maps `H -> D∞` making every triangle commute.
    pub commuting_maps: usize,
}

impl UniversalReport {
    pub fn passed(&self) -> bool {
        self.exists && self.commutes && self.unique_among_projections
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        let flag = |b: bool, w: &str| (!b).then(|| w.to_string());
        r.record("mediating_exists", flag(self.exists, "no mediating pair"));
        r.record("mediating_commutes", flag(self.commutes, "a triangle fails"));
        r.record(
            "unique_among_projections",
            flag(
                self.unique_among_projections,
                &format!("{} commuting projections", self.commuting_projections),
            ),
        );
        r
    }
}

/// Brute-forces projections `H -> D∞` and checks that exactly one commutes
/// with the cone, namely the mediating one.
pub fn verify_universal(b: &Bilimit, c: &ProjCone, budget: &Budget) -> Result<UniversalReport, BilimitError> {
    let mediating = mediating_projection(b, c).ok();
    let commutes_med = mediating
        .as_ref()
        .is_some_and(|m| commutes(b, c, m.proj().assignment()));
    let eps = enumerate_ep_pairs(&b.apex, &c.apex, budget)?;
    let commuting: Vec<&EpPair> = eps.iter().filter(|ep| commutes(b, c, ep.proj().assignment())).collect();
    check_budget(function_count(c.apex.len(), b.apex.len()), budget)?;
    let mut maps = 0;
    for_each_monotone(&c.apex, &b.apex, &[], |p| {
        if commutes(b, c, p) {
            maps += 1;
        }
        true
    });
    let unique = commuting.len() == 1 && mediating.as_ref() == Some(commuting[0]);
    Ok(UniversalReport {
        exists: mediating.is_some(),
        commutes: commutes_med,
        unique_among_projections: unique,
        commuting_projections: commuting.len(),
        commuting_maps: maps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{product_family, sub_poset};

    fn at_bottom(n: usize, m: usize) -> EpPair {
        let a = FinPoset::chain(n);
        let b = FinPoset::chain(m);
        make_ep(
            MonotoneMap::from_fn(&a, &b, |x| x).unwrap(),
            MonotoneMap::from_fn(&b, &a, |y| y.min(n - 1)).unwrap(),
        )
        .unwrap()
    }

    fn two_step() -> EpDiagram {
        EpDiagram::new(
            FinPoset::chain(2),
            vec![FinPoset::chain(1), FinPoset::chain(2)],
            vec![(0, 1, at_bottom(1, 2))],
        )
        .unwrap()
    }

    #[test]
    fn two_step_apex() {
        let b = Bilimit::build(&two_step()).unwrap();
        assert_eq!(b.apex().ids(), &["<0,0>", "<0,1>"]);
        // ε_{0<∞}(*) = (*, ⊥)
        assert_eq!(b.cone_emb(0).assignment(), &[0]);
        assert!(b.invariant_report().all_pass());
    }

    #[test]
    fn single_object_apex() {
        let p = FinPoset::antichain(3);
        let b = Bilimit::build(&EpDiagram::single(p.clone())).unwrap();
        assert_eq!(b.apex().len(), 3);
        assert!(b.cone_proj(0).is_order_iso());
        for s in b.apex().elements() {
            assert_eq!(b.cone_emb(0).apply(b.cone_proj(0).apply(s)), s);
        }
    }

    #[test]
    fn apex_matches_filtered_product() {
        let d = EpDiagram::new(
            FinPoset::chain(3),
            vec![FinPoset::chain(1), FinPoset::chain(2), FinPoset::chain(3)],
            vec![(0, 1, at_bottom(1, 2)), (1, 2, at_bottom(2, 3))],
        )
        .unwrap();
        let b = Bilimit::build(&d).unwrap();
        let idx: Vec<String> = d.index().ids().to_vec();
        let prod = product_family(&idx, d.objects()).unwrap();
        let (sub, _) = sub_poset(&prod.poset, |e| {
            let t = prod.tuple(e);
            d.index().elements().all(|i| {
                d.index()
                    .elements()
                    .filter(|&j| d.index().leq(i, j))
                    .all(|j| d.edge(i, j).proj().apply(t[j]) == t[i])
            })
        });
        assert_eq!(sub.ids(), b.apex().ids());
        assert_eq!(sub.relation(), b.apex().relation());
    }

    #[test]
    fn mediating_for_own_and_top_cones() {
        let b = Bilimit::build(&two_step()).unwrap();
        let own = mediating_projection(&b, &b.own_cone()).unwrap();
        assert_eq!(own, EpPair::identity(b.apex()));
        let top = mediating_projection(&b, &b.top_cone()).unwrap();
        assert_eq!(top.proj(), &b.cone_emb(1).clone());
        assert_eq!(Some(top.proj().clone()), b.cone_proj(1).inverse());
        for cone in [b.own_cone(), b.top_cone()] {
            let u = verify_universal(&b, &cone, &Budget::default()).unwrap();
            assert!(u.passed(), "{u:?}");
            assert_eq!(u.commuting_projections, 1);
        }
    }

    #[test]
    fn extended_cone_recovers_the_extension() {
        let b = Bilimit::build(&two_step()).unwrap();
        let h = FinPoset::chain(3);
        let ext = make_ep(
            MonotoneMap::new(b.apex(), &h, vec![0, 1]).unwrap(),
            MonotoneMap::new(&h, b.apex(), vec![0, 1, 1]).unwrap(),
        )
        .unwrap();
        let c = b.own_cone().extend(&ext).unwrap();
        assert_eq!(mediating_projection(&b, &c).unwrap(), ext);
        assert!(verify_universal(&b, &c, &Budget::default()).unwrap().passed());
    }

    #[test]
    fn bad_cone_is_rejected() {
        let b = Bilimit::build(&two_step()).unwrap();
        let c = b.own_cone();
        let mut pairs = c.pairs.clone();
        pairs.swap(0, 1);
        assert!(matches!(
            ProjCone::new(b.diagram(), b.apex().clone(), pairs),
            Err(BilimitError::ConeInvalid(_))
        ));
    }
}
