//! Seeded random instances. Case `k` of a run with seed `s` draws from
//! ChaCha8 seeded with `s` on stream `k`, so every case can be regenerated on
//! its own, on any platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Diagram, EpDiagram, EpMorphism, PartialEpDiagram};
use crate::ep::{enumerate_ep_pairs, EpPair};
use crate::lift::{enumerate_strict_ep_pairs, StrictEpPair};
use crate::order::{enumerate_monotone_maps, Elem, FinPoset, MonotoneMap};
use crate::presheaf::{enumerate_internal_strict_eps, BaseSite, InternalLift, InternalStrictEp, PresheafPoset};
use crate::Budget;

pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// Size limits for generated diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub max_index: usize,
    pub min_object: usize,
    pub max_object: usize,
    /// Objects-and-index draws before falling back to a one-object diagram.
    pub attempts: usize,
    /// Edge draws per object draw, retried until the diagram is functorial.
    pub edge_attempts: usize,
}

impl GenConfig {
    pub fn total() -> Self {
        GenConfig { max_index: 4, min_object: 1, max_object: 4, attempts: 200, edge_attempts: 20 }
    }

    pub fn partial() -> Self {
        GenConfig { max_index: 4, min_object: 0, max_object: 3, attempts: 200, edge_attempts: 20 }
    }

    /// Stage sizes for presheaf objects.
    pub fn internal() -> Self {
        GenConfig { max_index: 3, min_object: 1, max_object: 3, attempts: 200, edge_attempts: 20 }
    }
}

fn element_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// A poset on `n` elements: a random set of pairs `i < j` (in a fixed
/// numbering), closed transitively.
pub fn random_poset_of_size<R: Rng>(rng: &mut R, n: usize, name: &str) -> FinPoset {
    let ids = element_ids(n);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                pairs.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    FinPoset::generated(name, &ids, &pairs).expect("acyclic pairs generate a poset")
}

pub fn random_poset<R: Rng>(rng: &mut R, min: usize, max: usize, name: &str) -> FinPoset {
    let n = rng.gen_range(min..=max);
    random_poset_of_size(rng, n, name)
}

/// A directed index: a random poset with a top element added.
pub fn random_index<R: Rng>(rng: &mut R, max: usize) -> FinPoset {
    let n = rng.gen_range(1..=max.max(1));
    let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if j == n - 1 || rng.gen_bool(0.4) {
                pairs.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    FinPoset::generated("I", &ids, &pairs).expect("acyclic pairs generate a poset")
}

/// A generated diagram, or a one-object diagram when no draw succeeded.
#[derive(Debug, Clone)]
pub struct Generated<M: EpMorphism> {
    pub diagram: Diagram<M>,
    pub degenerate: bool,
}

/// Draws the index once, then objects whose sizes grow along a linear
/// extension of it (an ep-pair cannot go from a larger poset to a smaller
/// one), then ep-pairs on the covering edges until the diagram is functorial.
fn random_diagram<M, R, E>(
    rng: &mut R,
    cfg: &GenConfig,
    mut object: impl FnMut(&mut R, usize) -> Option<M::Object>,
    eps: impl Fn(&M::Object, &M::Object) -> Result<Vec<M>, E>,
) -> Result<Generated<M>, E>
where
    M: EpMorphism,
    R: Rng,
{
    let index = random_index(rng, cfg.max_index);
    let order = index.linear_extension();
    let hasse = index.hasse_edges();
    let mut fallback = None;
    for _ in 0..cfg.attempts {
        let mut sizes: Vec<usize> = (0..index.len()).map(|_| rng.gen_range(cfg.min_object..=cfg.max_object)).collect();
        sizes.sort_unstable();
        let mut slots: Vec<Option<M::Object>> = vec![None; index.len()];
        for (&i, &n) in order.iter().zip(&sizes) {
            slots[i] = object(rng, n);
        }
        let Some(objects) = slots.into_iter().collect::<Option<Vec<_>>>() else {
            continue;
        };
        if fallback.is_none() {
            fallback = Some(objects[order[0]].clone());
        }
        let mut candidates = Vec::with_capacity(hasse.len());
        for &(i, j) in &hasse {
            candidates.push(eps(&objects[i], &objects[j])?);
        }
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        for _ in 0..cfg.edge_attempts {
            let given: Vec<(Elem, Elem, M)> = hasse
                .iter()
                .zip(&candidates)
                .map(|(&(i, j), c)| (i, j, c.choose(rng).expect("nonempty").clone()))
                .collect();
            if let Ok(d) = Diagram::new(index.clone(), objects.clone(), given) {
                return Ok(Generated { diagram: d, degenerate: false });
            }
        }
    }
    let obj = match fallback {
        Some(o) => o,
        None => loop {
            if let Some(o) = object(rng, cfg.min_object) {
                break o;
            }
        },
    };
    Ok(Generated { diagram: Diagram::single(obj), degenerate: true })
}

pub fn random_total_diagram<R: Rng>(rng: &mut R, cfg: &GenConfig, budget: &Budget) -> Generated<EpPair> {
    let cfg = GenConfig { min_object: cfg.min_object.max(1), max_object: cfg.max_object.max(1), ..*cfg };
    random_diagram::<EpPair, R, crate::ep::EpError>(
        rng,
        &cfg,
        |r, n| Some(random_poset_of_size(r, n, "D")),
        |a, b| enumerate_ep_pairs(a, b, budget),
    )
    .unwrap_or_else(|_| Generated { diagram: EpDiagram::single(FinPoset::point()), degenerate: true })
}

pub fn random_partial_diagram<R: Rng>(rng: &mut R, cfg: &GenConfig, budget: &Budget) -> Generated<StrictEpPair> {
    let cfg = GenConfig { max_object: cfg.max_object.max(cfg.min_object), ..*cfg };
    random_diagram::<StrictEpPair, R, crate::lift::LiftError>(
        rng,
        &cfg,
        |r, n| Some(random_poset_of_size(r, n, "D")),
        |a, b| enumerate_strict_ep_pairs(a, b, budget),
    )
    .unwrap_or_else(|_| Generated { diagram: PartialEpDiagram::single(FinPoset::empty()), degenerate: true })
}

/// A presheaf with random stages and random restriction maps; `None` when a
/// nonempty stage would have to restrict into an empty one.
pub fn random_presheaf<R: Rng>(rng: &mut R, site: &BaseSite, min: usize, max: usize, budget: &Budget) -> Option<PresheafPoset> {
    let base = site.base();
    let stages: Vec<FinPoset> = base.elements().map(|_| random_poset(rng, min, max, "S")).collect();
    let mut given: Vec<(Elem, Elem, MonotoneMap)> = Vec::new();
    for (p, q) in base.hasse_edges().into_iter().map(|(q, p)| (p, q)) {
        let maps = enumerate_monotone_maps(&stages[p], &stages[q], budget).ok()?;
        given.push((p, q, maps.choose(rng)?.clone()));
    }
    PresheafPoset::new(site, stages, given).ok()
}

pub fn random_internal_diagram<R: Rng>(
    rng: &mut R,
    site: &BaseSite,
    cfg: &GenConfig,
    budget: &Budget,
) -> Result<Generated<InternalStrictEp>, crate::presheaf::PresheafError> {
    let cfg = GenConfig { max_object: cfg.max_object.max(cfg.min_object), ..*cfg };
    let lifted = |a: &PresheafPoset| InternalLift::new(a, budget);
    random_diagram::<InternalStrictEp, R, crate::presheaf::PresheafError>(
        rng,
        &cfg,
        |r, n| random_presheaf(r, site, cfg.min_object, n, budget),
        |a, b| enumerate_internal_strict_eps(&lifted(a)?, &lifted(b)?, budget),
    )
}

/// A poset receiving an ep-pair from `apex`, with that pair, for extending a
/// cone. Falls back to the identity on `apex`.
pub fn random_extension<R: Rng>(rng: &mut R, apex: &FinPoset, budget: &Budget) -> EpPair {
    for _ in 0..20 {
        let h = random_poset(rng, apex.len(), apex.len() + 1, "H");
        if let Ok(eps) = enumerate_ep_pairs(apex, &h, budget) {
            if let Some(e) = eps.choose(rng) {
                return e.clone();
            }
        }
    }
    EpPair::identity(apex)
}

pub fn random_strict_extension<R: Rng>(rng: &mut R, apex: &FinPoset, budget: &Budget) -> StrictEpPair {
    for _ in 0..20 {
        let h = random_poset(rng, apex.len(), apex.len() + 1, "H");
        if let Ok(eps) = enumerate_strict_ep_pairs(apex, &h, budget) {
            if let Some(e) = eps.choose(rng) {
                return e.clone();
            }
        }
    }
    StrictEpPair::identity(apex)
}

pub fn random_internal_extension<R: Rng>(
    rng: &mut R,
    apex: &InternalLift,
    cfg: &GenConfig,
    budget: &Budget,
) -> InternalStrictEp {
    let site = apex.site().clone();
    for _ in 0..20 {
        let Some(h) = random_presheaf(rng, &site, cfg.min_object, cfg.max_object + 1, budget) else {
            continue;
        };
        let Ok(lh) = InternalLift::new(&h, budget) else {
            continue;
        };
        if let Ok(eps) = enumerate_internal_strict_eps(apex, &lh, budget) {
            if let Some(e) = eps.choose(rng) {
                return e.clone();
            }
        }
    }
    InternalStrictEp::identity(apex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_case() {
        let b = Budget::default();
        let cfg = GenConfig::total();
        let d1 = random_total_diagram(&mut case_rng(42, 7), &cfg, &b);
        let d2 = random_total_diagram(&mut case_rng(42, 7), &cfg, &b);
        assert!(d1.diagram == d2.diagram);
        let other = random_total_diagram(&mut case_rng(42, 8), &cfg, &b);
        let _ = other;
    }

    #[test]
    fn indexes_have_a_top() {
        let mut rng = case_rng(1, 0);
        for _ in 0..50 {
            let i = random_index(&mut rng, 4);
            assert!(i.top().is_some());
        }
    }

    #[test]
    fn generated_diagrams_are_valid() {
        let b = Budget::default();
        for k in 0..20 {
            let g = random_total_diagram(&mut case_rng(3, k), &GenConfig::total(), &b);
            g.diagram.validate().unwrap();
            assert!(g.diagram.objects().iter().all(|o| (1..=4).contains(&o.len())));
            let g = random_partial_diagram(&mut case_rng(3, k), &GenConfig::partial(), &b);
            g.diagram.validate().unwrap();
        }
    }

    #[test]
    fn internal_diagrams_over_the_sierpinski_base() {
        let b = Budget::default();
        let site = BaseSite::sierpinski();
        for k in 0..5 {
            let g = random_internal_diagram(&mut case_rng(5, k), &site, &GenConfig::internal(), &b).unwrap();
            g.diagram.validate().unwrap();
        }
    }
}
