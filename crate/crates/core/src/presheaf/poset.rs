use std::fmt;

use super::{BaseSite, PresheafError};
use crate::order::{enumerate_monotone_maps, Elem, FinPoset, MonotoneMap};
use crate::Budget;

/// A presheaf of finite posets on a base site: a poset `A(p)` per stage and
/// monotone restrictions `A(p) -> A(q)` for `q <= p`.
#[derive(Clone, PartialEq)]
pub struct PresheafPoset {
    site: BaseSite,
    stages: Vec<FinPoset>,
    restrictions: Vec<Option<MonotoneMap>>,
}

impl PresheafPoset {
    /// Restrictions not given are filled in with identities on the diagonal
    /// and composites elsewhere; the result is checked for functoriality.
    pub fn new(
        site: &BaseSite,
        stages: Vec<FinPoset>,
        given: Vec<(Elem, Elem, MonotoneMap)>,
    ) -> Result<Self, PresheafError> {
        let base = site.base();
        let n = base.len();
        if stages.len() != n {
            return Err(PresheafError::Mismatch(format!("{} stages over a base of {n}", stages.len())));
        }
        let mut restrictions: Vec<Option<MonotoneMap>> = vec![None; n * n];
        for (p, q, m) in given {
            if !base.leq(q, p) {
                return Err(PresheafError::Mismatch(format!(
                    "restriction from `{}` to `{}` against the base order",
                    base.id(p),
                    base.id(q)
                )));
            }
            if m.dom() != &stages[p] || m.cod() != &stages[q] {
                return Err(PresheafError::Mismatch(format!(
                    "restriction `{}` -> `{}` has the wrong type",
                    base.id(p),
                    base.id(q)
                )));
            }
            restrictions[p * n + q] = Some(m);
        }
        for p in 0..n {
            if restrictions[p * n + p].is_none() {
                restrictions[p * n + p] = Some(MonotoneMap::identity(&stages[p]));
            }
        }
        let order = site.top_down();
        // bottom-up in p and top-down in q, so both halves of a composite exist
        for &p in order.iter().rev() {
            for &q in &order {
                if !base.lt(q, p) || restrictions[p * n + q].is_some() {
                    continue;
                }
                let r = (0..n)
                    .find(|&r| {
                        base.lt(q, r)
                            && base.lt(r, p)
                            && restrictions[p * n + r].is_some()
                            && restrictions[r * n + q].is_some()
                    })
                    .ok_or_else(|| {
                        PresheafError::Mismatch(format!("no restriction from `{}` to `{}`", base.id(p), base.id(q)))
                    })?;
                let first = restrictions[p * n + r].clone().expect("checked");
                let composite = first.then(restrictions[r * n + q].as_ref().expect("checked"))?;
                restrictions[p * n + q] = Some(composite);
            }
        }
        let a = PresheafPoset { site: site.clone(), stages, restrictions };
        a.validate()?;
        Ok(a)
    }

    /// The constant presheaf with identity restrictions.
    pub fn constant(site: &BaseSite, poset: &FinPoset) -> Self {
        let base = site.base();
        let given = base
            .elements()
            .flat_map(|p| base.elements().filter(move |&q| base.lt(q, p)).map(move |q| (p, q)))
            .map(|(p, q)| (p, q, MonotoneMap::identity(poset)))
            .collect();
        PresheafPoset::new(site, vec![poset.clone(); site.len()], given).expect("constant presheaf")
    }

    pub fn terminal(site: &BaseSite) -> Self {
        Self::constant(site, &FinPoset::point())
    }

    pub fn empty(site: &BaseSite) -> Self {
        Self::constant(site, &FinPoset::empty())
    }

    pub fn site(&self) -> &BaseSite {
        &self.site
    }

    pub fn stage(&self, p: Elem) -> &FinPoset {
        &self.stages[p]
    }

    pub fn stages(&self) -> &[FinPoset] {
        &self.stages
    }

    /// The restriction `A(p) -> A(q)`; panics unless `q <= p`.
    pub fn restriction(&self, p: Elem, q: Elem) -> &MonotoneMap {
        self.restrictions[p * self.site.len() + q]
            .as_ref()
            .unwrap_or_else(|| panic!("no restriction {p} -> {q}"))
    }

    pub fn restrict(&self, p: Elem, q: Elem, x: Elem) -> Elem {
        self.restriction(p, q).apply(x)
    }

    pub fn total_size(&self) -> usize {
        self.stages.iter().map(FinPoset::len).sum()
    }

    /// Identity restrictions on the diagonal, and `A(r->q) ∘ A(p->r) = A(p->q)`.
    pub fn validate(&self) -> Result<(), PresheafError> {
        let base = self.site.base();
        for p in base.elements() {
            if self.restriction(p, p) != &MonotoneMap::identity(&self.stages[p]) {
                return Err(PresheafError::NotFunctorial(base.id(p).into(), base.id(p).into(), base.id(p).into()));
            }
            for r in base.elements().filter(|&r| base.leq(r, p)) {
                for q in base.elements().filter(|&q| base.leq(q, r)) {
                    let via = self.restriction(p, r).then(self.restriction(r, q)).ok();
                    if via.as_ref() != Some(self.restriction(p, q)) {
                        return Err(PresheafError::NotFunctorial(
                            base.id(p).into(),
                            base.id(r).into(),
                            base.id(q).into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PresheafPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<usize> = self.stages.iter().map(FinPoset::len).collect();
        write!(f, "Presheaf{sizes:?}")
    }
}

/// A natural transformation between presheaves of posets with monotone
/// components.
#[derive(Clone, PartialEq)]
pub struct NatMap {
    dom: PresheafPoset,
    cod: PresheafPoset,
    components: Vec<MonotoneMap>,
}

impl NatMap {
    pub fn new(dom: &PresheafPoset, cod: &PresheafPoset, components: Vec<MonotoneMap>) -> Result<Self, PresheafError> {
        if dom.site != cod.site || components.len() != dom.site.len() {
            return Err(PresheafError::Mismatch("natural map over different bases".into()));
        }
        for (p, c) in components.iter().enumerate() {
            if c.dom() != dom.stage(p) || c.cod() != cod.stage(p) {
                return Err(PresheafError::Mismatch(format!("component at stage {p} has the wrong type")));
            }
        }
        let f = NatMap { dom: dom.clone(), cod: cod.clone(), components };
        if let Some(w) = f.naturality_witness() {
            return Err(w);
        }
        Ok(f)
    }

    pub(crate) fn new_unchecked(dom: &PresheafPoset, cod: &PresheafPoset, components: Vec<MonotoneMap>) -> Self {
        NatMap { dom: dom.clone(), cod: cod.clone(), components }
    }

    /// Builds a natural map from stagewise assignments.
    pub fn from_assignments(
        dom: &PresheafPoset,
        cod: &PresheafPoset,
        assignments: Vec<Vec<Elem>>,
    ) -> Result<Self, PresheafError> {
        let comps = assignments
            .into_iter()
            .enumerate()
            .map(|(p, a)| MonotoneMap::new(dom.stage(p), cod.stage(p), a))
            .collect::<Result<Vec<_>, _>>()?;
        NatMap::new(dom, cod, comps)
    }

    pub fn identity(a: &PresheafPoset) -> Self {
        let comps = a.stages.iter().map(MonotoneMap::identity).collect();
        NatMap::new_unchecked(a, a, comps)
    }

    pub fn dom(&self) -> &PresheafPoset {
        &self.dom
    }

    pub fn cod(&self) -> &PresheafPoset {
        &self.cod
    }

    pub fn component(&self, p: Elem) -> &MonotoneMap {
        &self.components[p]
    }

    pub fn components(&self) -> &[MonotoneMap] {
        &self.components
    }

    #[inline]
    pub fn apply(&self, p: Elem, x: Elem) -> Elem {
        self.components[p].apply(x)
    }

    fn naturality_witness(&self) -> Option<PresheafError> {
        let base = self.dom.site.base();
        for p in base.elements() {
            for q in base.elements().filter(|&q| base.lt(q, p)) {
                for x in self.dom.stage(p).elements() {
                    let down_then = self.apply(q, self.dom.restrict(p, q, x));
                    let then_down = self.cod.restrict(p, q, self.apply(p, x));
                    if down_then != then_down {
                        return Some(PresheafError::NotNatural(
                            base.id(p).into(),
                            base.id(q).into(),
                            self.dom.stage(p).id(x).into(),
                        ));
                    }
                }
            }
        }
        None
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &NatMap) -> Result<NatMap, PresheafError> {
        let comps = self
            .components
            .iter()
            .zip(&inner.components)
            .map(|(f, g)| f.after(g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NatMap::new_unchecked(&inner.dom, &self.cod, comps))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &NatMap) -> Result<NatMap, PresheafError> {
        next.after(self)
    }

    pub fn leq_pointwise(&self, other: &NatMap) -> bool {
        self.components.iter().zip(&other.components).all(|(f, g)| f.leq_pointwise(g))
    }
}

impl fmt::Debug for NatMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&[Elem]> = self.components.iter().map(|c| c.assignment()).collect();
        write!(f, "nat{parts:?}")
    }
}

/// All natural maps `A -> B`, stages assigned from the top of the base down
/// and pruned by naturality against the stages already fixed.
pub fn enumerate_natural_maps(a: &PresheafPoset, b: &PresheafPoset, budget: &Budget) -> Result<Vec<NatMap>, PresheafError> {
    if a.site != b.site {
        return Err(PresheafError::Mismatch("presheaves over different bases".into()));
    }
    let site = &a.site;
    let base = site.base();
    let candidates: Vec<Vec<MonotoneMap>> = base
        .elements()
        .map(|p| enumerate_monotone_maps(a.stage(p), b.stage(p), budget))
        .collect::<Result<_, _>>()?;
    let order = site.top_down();
    let mut chosen: Vec<Option<usize>> = vec![None; base.len()];
    let mut out = Vec::new();

    fn go(
        depth: usize,
        order: &[Elem],
        a: &PresheafPoset,
        b: &PresheafPoset,
        candidates: &[Vec<MonotoneMap>],
        chosen: &mut Vec<Option<usize>>,
        out: &mut Vec<NatMap>,
    ) {
        let base = a.site.base();
        if depth == order.len() {
            let comps = chosen.iter().enumerate().map(|(p, c)| candidates[p][c.expect("all chosen")].clone()).collect();
            out.push(NatMap::new_unchecked(a, b, comps));
            return;
        }
        let q = order[depth];
        for (k, f) in candidates[q].iter().enumerate() {
            let natural = order[..depth].iter().filter(|&&p| base.lt(q, p)).all(|&p| {
                let fp = &candidates[p][chosen[p].expect("assigned above")];
                a.stage(p)
                    .elements()
                    .all(|x| f.apply(a.restrict(p, q, x)) == b.restrict(p, q, fp.apply(x)))
            });
            if natural {
                chosen[q] = Some(k);
                go(depth + 1, order, a, b, candidates, chosen, out);
                chosen[q] = None;
            }
        }
    }
    go(0, &order, a, b, &candidates, &mut chosen, &mut out);
    out.sort_by(|f, g| {
        let fa: Vec<&[Elem]> = f.components.iter().map(|c| c.assignment()).collect();
        let ga: Vec<&[Elem]> = g.components.iter().map(|c| c.assignment()).collect();
        fa.cmp(&ga)
    });
    Ok(out)
}
