mod common;

use common::all_functions;
use dinf_core::bilimit::{verify_universal, verify_universal_partial};
use dinf_core::gen::{case_rng, random_partial_diagram, random_total_diagram, GenConfig};
use dinf_core::lift::{LiftPoset, BOTTOM};
use dinf_core::{Bilimit, Budget, EpDiagram, EpPair, FinPoset, PartialBilimit};
use proptest::prelude::*;

/// Coherent tuples over the given carriers, found by trying all of them.
fn coherent(sizes: &[usize], index: &FinPoset, proj: impl Fn(usize, usize, usize) -> usize) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    let mut out = Vec::new();
    for mut code in 0..total {
        let t: Vec<usize> = sizes
            .iter()
            .map(|&n| {
                let x = code % n;
                code /= n;
                x
            })
            .collect();
        let ok = index
            .elements()
            .all(|i| index.elements().filter(|&j| index.leq(i, j)).all(|j| proj(i, j, t[j]) == t[i]));
        if ok {
            out.push(t);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_apex_is_the_set_of_coherent_tuples(seed in any::<u64>()) {
        let g = random_total_diagram(&mut case_rng(seed, 0), &GenConfig::total(), &Budget::default());
        let d = &g.diagram;
        let b = Bilimit::build(d).unwrap();
        let sizes: Vec<usize> = d.objects().iter().map(|o| o.len()).collect();
        let want = coherent(&sizes, d.index(), |i, j, y| d.edge(i, j).proj().apply(y));
        prop_assert_eq!(b.apex().len(), want.len());
        for t in &want {
            prop_assert!(b.element_of(t).is_some());
        }
        let r = b.invariant_report();
        prop_assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn partial_apex_is_the_set_of_defined_coherent_tuples(seed in any::<u64>()) {
        let g = random_partial_diagram(&mut case_rng(seed, 0), &GenConfig::partial(), &Budget::default());
        let d = &g.diagram;
        let b = PartialBilimit::build(d).unwrap();
        let sizes: Vec<usize> = d.objects().iter().map(|o| o.len() + 1).collect();
        let want: Vec<Vec<usize>> = coherent(&sizes, d.index(), |i, j, y| d.edge(i, j).proj().apply(y))
            .into_iter()
            .filter(|t| t.iter().any(|&u| u != BOTTOM))
            .collect();
        prop_assert_eq!(b.apex().len(), want.len());
        let r = b.invariant_report();
        prop_assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn own_and_top_cones_mediate_uniquely(seed in any::<u64>()) {
        let budget = Budget::default();
        let g = random_total_diagram(&mut case_rng(seed, 1), &GenConfig::total(), &budget);
        let b = Bilimit::build(&g.diagram).unwrap();
        for c in [b.own_cone(), b.top_cone()] {
            let u = verify_universal(&b, &c, &budget).unwrap();
            prop_assert!(u.passed());
            prop_assert_eq!(u.commuting_projections, 1);
        }
        let g = random_partial_diagram(&mut case_rng(seed, 1), &GenConfig::partial(), &budget);
        let b = PartialBilimit::build(&g.diagram).unwrap();
        for c in [b.own_cone(), b.top_cone()] {
            let u = verify_universal_partial(&b, &c, &budget).unwrap();
            prop_assert!(u.passed(), "{:?}", u);
        }
    }

    #[test]
    fn identity_chains_collapse_to_their_object(n in 1usize..5, len in 1usize..4) {
        let p = FinPoset::chain(n);
        let given = (0..len - 1).map(|i| (i, i + 1, EpPair::identity(&p))).collect();
        let d = EpDiagram::new(FinPoset::chain(len), vec![p.clone(); len], given).unwrap();
        let b = Bilimit::build(&d).unwrap();
        prop_assert_eq!(b.apex().len(), n);
        prop_assert!(b.cone_proj(0).is_order_iso());
    }
}

#[test]
fn coherent_tuple_oracle_sanity() {
    // two copies of a 2-chain joined by the identity: the diagonal only
    let i = FinPoset::chain(2);
    let t = coherent(&[2, 2], &i, |_, _, y| y);
    assert_eq!(t, vec![vec![0, 0], vec![1, 1]]);
    assert_eq!(all_functions(2, 2).len(), 4);
    assert_eq!(LiftPoset::new(&FinPoset::empty()).carrier().len(), 1);
}
