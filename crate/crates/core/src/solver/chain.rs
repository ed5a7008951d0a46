use serde::Serialize;

use super::{functor_ep, functor_object, functor_strict_ep, ChainMode, DomainExpr, SolverError};
use crate::bilimit::{Bilimit, PartialBilimit};
use crate::diagram::{EpDiagram, PartialEpDiagram};
use crate::ep::{enumerate_ep_pairs, EpPair};
use crate::lift::{enumerate_strict_ep_pairs, lift_ep, lift_map, LiftPoset, StrictEpPair};
use crate::order::{Elem, FinPoset, MonotoneMap};
use crate::report::Report;
use crate::Budget;

#[derive(Clone, Debug, PartialEq)]
pub enum ChainLinks {
    Total(Vec<EpPair>),
    Partial(Vec<StrictEpPair>),
}

/// The chain `D_0 ⇄ D_1 = F(D_0) ⇄ D_2 ⇄ ... ⇄ D_n` with `link_{k+1} = F(link_k)`.
#[derive(Clone, Debug)]
pub struct ChainApprox {
    expr: DomainExpr,
    mode: ChainMode,
    levels: Vec<FinPoset>,
    links: ChainLinks,
    embs: Vec<MonotoneMap>,
}

impl ChainApprox {
    /// A total chain from a given starter `D_0 ⇄ F(D_0)`.
    pub fn from_total_starter(e: &DomainExpr, starter: EpPair, depth: usize, budget: &Budget) -> Result<Self, SolverError> {
        let base = starter.lower().clone();
        let image = functor_object(e, &base, ChainMode::Total, budget)?;
        if starter.upper() != &image {
            return Err(SolverError::Mismatch(format!("starter does not land in F({})", base.name())));
        }
        let mut links = Vec::with_capacity(depth);
        if depth > 0 {
            links.push(starter);
        }
        while links.len() < depth {
            let next = functor_ep(e, links.last().expect("nonempty"), budget)?;
            links.push(next);
        }
        let mut levels = vec![base];
        levels.extend(links.iter().map(|l| l.upper().clone()));
        let embs = links.iter().map(|l| l.emb().clone()).collect();
        Ok(ChainApprox { expr: e.clone(), mode: ChainMode::Total, levels, links: ChainLinks::Total(links), embs })
    }

    /// A partial chain from a given strict starter `L D_0 ⇄ L F(D_0)`.
    pub fn from_strict_starter(
        e: &DomainExpr,
        starter: StrictEpPair,
        depth: usize,
        budget: &Budget,
    ) -> Result<Self, SolverError> {
        let base = starter.lower().base().clone();
        let image = functor_object(e, &base, ChainMode::Partial, budget)?;
        if starter.upper().base() != &image {
            return Err(SolverError::Mismatch(format!("starter does not land in L F({})", base.name())));
        }
        let mut links = Vec::with_capacity(depth);
        if depth > 0 {
            links.push(starter);
        }
        while links.len() < depth {
            let next = functor_strict_ep(e, links.last().expect("nonempty"), budget)?;
            links.push(next);
        }
        let mut levels = vec![base];
        levels.extend(links.iter().map(|l| l.upper().base().clone()));
        // an embedding keeps defined elements defined
        let embs = links
            .iter()
            .map(|l| {
                MonotoneMap::from_fn(l.lower().base(), l.upper().base(), |x| {
                    l.upper().value(l.emb().apply(l.lower().eta(x))).expect("strict embeddings are total on defined elements")
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(ChainApprox { expr: e.clone(), mode: ChainMode::Partial, levels, links: ChainLinks::Partial(links), embs })
    }

    pub fn expr(&self) -> &DomainExpr {
        &self.expr
    }

    pub fn mode(&self) -> ChainMode {
        self.mode
    }

    pub fn levels(&self) -> &[FinPoset] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Result<&FinPoset, SolverError> {
        self.levels.get(k).ok_or(SolverError::LevelOutOfRange(k))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(FinPoset::len).collect()
    }

    /// Index of the last level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn links(&self) -> &ChainLinks {
        &self.links
    }

    /// `D_k -> D_{k+1}` on elements; in partial mode the embedding restricted
    /// to defined elements, where it stays defined.
    pub fn level_emb(&self, k: usize) -> Result<&MonotoneMap, SolverError> {
        self.embs.get(k).ok_or(SolverError::LevelOutOfRange(k))
    }

    /// Rechecks `D_{k+1} = F(D_k)` and `link_{k+1} = F(link_k)` from scratch.
    pub fn coherence_report(&self, budget: &Budget) -> Result<Report, SolverError> {
        let mut r = Report::new();
        for k in 0..self.depth() {
            let image = functor_object(&self.expr, &self.levels[k], self.mode, budget)?;
            r.record(
                format!("level_{}_is_image", k + 1),
                (image != self.levels[k + 1]).then(|| format!("D_{} differs from F(D_{k})", k + 1)),
            );
        }
        for k in 1..self.depth() {
            let ok = match &self.links {
                ChainLinks::Total(l) => functor_ep(&self.expr, &l[k - 1], budget)? == l[k],
                ChainLinks::Partial(l) => functor_strict_ep(&self.expr, &l[k - 1], budget)? == l[k],
            };
            r.record(format!("link_{k}_is_image"), (!ok).then(|| format!("link {k} differs from F(link {})", k - 1)));
        }
        Ok(r)
    }
}

/// Builds `D_0 .. D_depth` from `base`. Total mode takes the first ep-pair
/// `base ⇄ F(base)` in enumeration order; partial mode starts from the empty
/// strict pair when `base` is empty, and from the first strict pair otherwise.
pub fn iterate_chain(
    e: &DomainExpr,
    base: &FinPoset,
    depth: usize,
    mode: ChainMode,
    budget: &Budget,
) -> Result<ChainApprox, SolverError> {
    if base.len() > budget.level_size {
        return Err(SolverError::BudgetExceeded(format!("base has {} elements", base.len())));
    }
    if depth == 0 {
        return Ok(ChainApprox::trivial(e, base, mode));
    }
    let image = functor_object(e, base, mode, budget)?;
    match mode {
        ChainMode::Total => {
            let starter = enumerate_ep_pairs(base, &image, budget)?
                .into_iter()
                .next()
                .ok_or_else(|| SolverError::NoStarterEp(base.name().to_string()))?;
            ChainApprox::from_total_starter(e, starter, depth, budget)
        }
        ChainMode::Partial => {
            let starter = if base.is_empty() {
                StrictEpPair::from_empty(&image)
            } else {
                enumerate_strict_ep_pairs(base, &image, budget)?
                    .into_iter()
                    .next()
                    .ok_or_else(|| SolverError::NoStarterEp(base.name().to_string()))?
            };
            ChainApprox::from_strict_starter(e, starter, depth, budget)
        }
    }
}

impl ChainApprox {
    fn trivial(e: &DomainExpr, base: &FinPoset, mode: ChainMode) -> Self {
        let links = match mode {
            ChainMode::Total => ChainLinks::Total(Vec::new()),
            ChainMode::Partial => ChainLinks::Partial(Vec::new()),
        };
        ChainApprox { expr: e.clone(), mode, levels: vec![base.clone()], links, embs: Vec::new() }
    }
}

/// The bilimit of `D_0 ⇄ ... ⇄ D_k` and its comparison with `D_k`.
#[derive(Clone, Debug, Serialize)]
pub struct TruncatedBilimit {
    pub level: usize,
    pub level_size: usize,
    pub apex_size: usize,
    /// The isomorphism `D∞ -> D_k` as `(tuple id, element id)` pairs.
    pub iso: Option<Vec<(String, String)>>,
    pub report: Report,
}

impl TruncatedBilimit {
    pub fn passed(&self) -> bool {
        self.iso.is_some() && self.report.all_pass()
    }
}

fn describe_iso(m: &MonotoneMap) -> Vec<(String, String)> {
    m.dom()
        .elements()
        .map(|x| (m.dom().id(x).to_string(), m.cod().id(m.apply(x)).to_string()))
        .collect()
}

pub fn truncated_bilimit(c: &ChainApprox, k: usize) -> Result<TruncatedBilimit, SolverError> {
    let dk = c.level(k)?.clone();
    let index = FinPoset::chain(k + 1);
    let objects = c.levels[..=k].to_vec();
    let (apex_size, iso, mut report) = match &c.links {
        ChainLinks::Total(links) => {
            let given = links[..k].iter().enumerate().map(|(i, l)| (i, i + 1, l.clone())).collect();
            let d = EpDiagram::new(index, objects, given).map_err(|e| SolverError::Bilimit(e.into()))?;
            let b = Bilimit::build(&d)?;
            let p = b.cone_proj(k);
            let iso = p.is_order_iso().then(|| p.clone());
            (b.apex().len(), iso, b.invariant_report())
        }
        ChainLinks::Partial(links) => {
            let given = links[..k].iter().enumerate().map(|(i, l)| (i, i + 1, l.clone())).collect();
            let d = PartialEpDiagram::new(index, objects, given).map_err(|e| SolverError::Bilimit(e.into()))?;
            let b = PartialBilimit::build(&d)?;
            (b.apex().len(), b.top_iso_map(), b.invariant_report())
        }
    };
    let realized = match &iso {
        Some(m) if m.cod() == &dk && m.is_order_iso() => None,
        _ => Some(format!("apex is not isomorphic to D_{k}")),
    };
    report.record("apex_iso_level", realized);
    Ok(TruncatedBilimit {
        level: k,
        level_size: dk.len(),
        apex_size,
        iso: iso.as_ref().map(describe_iso),
        report,
    })
}

/// The lift chain `∅ ⇄ L∅ ⇄ L²∅ ⇄ ...` up to level `n`, with the re-indexing
/// isomorphisms `σ_m: L(D_{m-1}) -> D_m`.
#[derive(Clone, Debug)]
pub struct OmegaBar {
    pub chain: ChainApprox,
    pub sigmas: Vec<MonotoneMap>,
    pub report: Report,
}

pub fn omega_bar(n: usize, budget: &Budget) -> Result<OmegaBar, SolverError> {
    if n == 0 {
        return Err(SolverError::LevelOutOfRange(0));
    }
    let chain = iterate_chain(&DomainExpr::lift(DomainExpr::Var), &FinPoset::empty(), n, ChainMode::Partial, budget)?;
    let lifts: Vec<LiftPoset> = chain.levels.iter().map(LiftPoset::new).collect();
    let mut sigmas = Vec::with_capacity(n);
    let mut r = Report::new();
    for m in 1..=n {
        let src = lifts[m - 1].carrier();
        let dst = &chain.levels[m];
        let assign: Option<Vec<Elem>> = src.elements().map(|u| dst.lookup(src.id(u))).collect();
        let sigma = assign.and_then(|a| MonotoneMap::new(src, dst, a).ok());
        match sigma {
            Some(s) if s.is_order_iso() => {
                r.pass(format!("sigma_{m}_iso"));
                sigmas.push(s);
            }
            _ => {
                r.fail(format!("sigma_{m}_iso"), format!("L(D_{}) and D_{m} are not matched by re-indexing", m - 1));
                return Ok(OmegaBar { chain, sigmas, report: r });
            }
        }
    }
    for m in 1..n {
        // σ_{m+1}(η(top_m)) = top_{m+1}
        let top = chain.levels[m].top().expect("a nonempty chain has a top");
        let image = sigmas[m].apply(lifts[m].eta(top));
        r.record(
            format!("top_to_top_{m}"),
            (Some(image) != chain.levels[m + 1].top()).then(|| format!("top of D_{m} goes to {}", chain.levels[m + 1].id(image))),
        );
    }
    if let ChainLinks::Partial(links) = &chain.links {
        for k in 1..links.len() {
            let ok = links[k] == lift_ep(&links[k - 1].as_ep());
            r.record(format!("link_{k}_is_lift"), (!ok).then(|| format!("link {k} is not L of link {}", k - 1)));
        }
    }
    // e_m = σ_{m+1} ∘ L(e_{m-1}) ∘ σ_m⁻¹
    for m in 1..n {
        let inv = sigmas[m - 1].inverse().expect("checked iso");
        let le = lift_map(chain.level_emb(m - 1)?);
        let via = inv.then(le.map()).and_then(|f| f.then(&sigmas[m]))?;
        r.record(
            format!("sigma_commutes_{m}"),
            (&via != chain.level_emb(m)?).then(|| format!("σ does not commute with the link out of D_{m}")),
        );
    }
    Ok(OmegaBar { chain, sigmas, report: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{builtin_constants, parse_expr};

    fn expr(s: &str) -> DomainExpr {
        parse_expr(s, &builtin_constants()).unwrap()
    }

    #[test]
    fn lift_chain_sizes() {
        let c = iterate_chain(&expr("lift X"), &FinPoset::empty(), 4, ChainMode::Partial, &Budget::default()).unwrap();
        assert_eq!(c.sizes(), vec![0, 1, 2, 3, 4]);
        for (k, d) in c.levels().iter().enumerate() {
            assert_eq!(d.relation().len(), k * (k + 1) / 2, "level {k} is a chain");
        }
        assert!(c.coherence_report(&Budget::default()).unwrap().all_pass());
    }

    #[test]
    fn sum_chain_sizes() {
        let c = iterate_chain(&expr("1 + X"), &FinPoset::empty(), 3, ChainMode::Partial, &Budget::default()).unwrap();
        assert_eq!(c.sizes(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn arrow_chain_sizes() {
        let b = Budget::default();
        let c = iterate_chain(&expr("X -> X"), &FinPoset::chain(2), 2, ChainMode::Total, &b).unwrap();
        assert_eq!(c.sizes(), vec![2, 3, 10]);
        assert!(c.coherence_report(&b).unwrap().all_pass());
    }

    #[test]
    fn no_starter_from_empty() {
        let r = iterate_chain(&expr("X -> X"), &FinPoset::empty(), 2, ChainMode::Total, &Budget::default());
        assert!(matches!(r, Err(SolverError::NoStarterEp(_))));
    }

    #[test]
    fn budget_stops_arrow_chain() {
        let r = iterate_chain(&expr("X -> X"), &FinPoset::chain(2), 3, ChainMode::Total, &Budget::default());
        assert!(matches!(r, Err(SolverError::BudgetExceeded(_))), "{r:?}");
    }

    #[test]
    fn truncations_match_levels() {
        let b = Budget::default();
        let lift = iterate_chain(&expr("lift X"), &FinPoset::empty(), 4, ChainMode::Partial, &b).unwrap();
        let arrow = iterate_chain(&expr("X -> X"), &FinPoset::chain(2), 2, ChainMode::Total, &b).unwrap();
        for c in [&lift, &arrow] {
            for k in 0..=c.depth() {
                let t = truncated_bilimit(c, k).unwrap();
                assert!(t.passed(), "{}", t.report.render_text());
                assert_eq!(t.apex_size, c.sizes()[k]);
            }
        }
        assert_eq!(truncated_bilimit(&lift, 3).unwrap().apex_size, 3);
        assert_eq!(truncated_bilimit(&arrow, 2).unwrap().apex_size, 10);
        assert!(matches!(truncated_bilimit(&arrow, 3), Err(SolverError::LevelOutOfRange(3))));
    }

    #[test]
    fn omega_bar_truncations() {
        for n in 1..=6 {
            let o = omega_bar(n, &Budget::default()).unwrap();
            assert!(o.report.all_pass(), "{}", o.report.render_text());
            assert_eq!(o.sigmas.len(), n);
        }
        let o = omega_bar(1, &Budget::default()).unwrap();
        assert_eq!((o.sigmas[0].dom().len(), o.sigmas[0].cod().len()), (1, 1));
    }
}
