mod common;

use common::{brute_ep_pairs, poset};
use dinf_core::ep::{enumerate_ep_pairs, projection_by_formula, projection_from_embedding};
use dinf_core::{Budget, EpPair};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn enumeration_matches_brute_force(a in poset(3), b in poset(4)) {
        let eps = enumerate_ep_pairs(&a, &b, &Budget::default()).unwrap();
        let mut got: Vec<_> = eps.iter().map(|e| (e.emb().assignment().to_vec(), e.proj().assignment().to_vec())).collect();
        let mut want = brute_ep_pairs(&a, &b);
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn embeddings_determine_projections(a in poset(3), b in poset(4)) {
        for e in enumerate_ep_pairs(&a, &b, &Budget::default()).unwrap() {
            prop_assert_eq!(&projection_from_embedding(e.emb(), &Budget::default()).unwrap(), &e);
            prop_assert_eq!(projection_by_formula(e.emb()), Some(e.clone()));
            prop_assert!(e.emb().is_injective() && e.emb().is_order_reflecting());
        }
    }

    #[test]
    fn composites_are_ep_pairs(a in poset(2), b in poset(3), c in poset(4)) {
        let b1 = Budget::default();
        let fs = enumerate_ep_pairs(&a, &b, &b1).unwrap();
        let gs = enumerate_ep_pairs(&b, &c, &b1).unwrap();
        for f in fs.iter().take(4) {
            prop_assert_eq!(&f.then(&EpPair::identity(&b)).unwrap(), f);
            prop_assert_eq!(&EpPair::identity(&a).then(f).unwrap(), f);
            for g in gs.iter().take(4) {
                let h = f.then(g).unwrap();
                let brute = brute_ep_pairs(&a, &c);
                prop_assert!(brute.contains(&(h.emb().assignment().to_vec(), h.proj().assignment().to_vec())));
            }
        }
    }
}
