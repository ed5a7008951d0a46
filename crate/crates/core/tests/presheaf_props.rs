mod common;

use common::poset;
use dinf_core::gen::{case_rng, random_partial_diagram, random_presheaf, GenConfig};
use dinf_core::presheaf::{
    boolean_bilimit_iso, boolean_lift_iso, from_boolean_diagram, monad_law_report, BaseSite, InternalLift,
    InternalPartialBilimit, PresheafPoset,
};
use dinf_core::{Budget, PartialBilimit};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monad_laws_hold_stagewise(seed in any::<u64>()) {
        let site = BaseSite::sierpinski();
        let b = Budget::default();
        let a = random_presheaf(&mut case_rng(seed, 0), &site, 0, 3, &b);
        prop_assume!(a.is_some());
        let r = monad_law_report(&a.unwrap(), &b).unwrap();
        prop_assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn stage_sizes_count_supports(seed in any::<u64>()) {
        // over 0 < 1 the sieves on 1 are {}, {0} and {0, 1}
        let site = BaseSite::sierpinski();
        let b = Budget::default();
        let a = random_presheaf(&mut case_rng(seed, 1), &site, 0, 3, &b);
        prop_assume!(a.is_some());
        let a = a.unwrap();
        let la = InternalLift::new(&a, &b).unwrap();
        let (lo, hi) = (site.base().bottom().unwrap(), site.base().top().unwrap());
        prop_assert_eq!(la.stage(lo).len(), 1 + a.stage(lo).len());
        prop_assert_eq!(la.stage(hi).len(), 1 + a.stage(lo).len() + a.stage(hi).len());
    }

    #[test]
    fn one_point_base_agrees_with_the_two_valued_lift(p in poset(4)) {
        let r = boolean_lift_iso(&p, &Budget::default()).unwrap();
        prop_assert!(r.all_pass(), "{}", r.render_text());
        let la = InternalLift::new(&PresheafPoset::constant(&BaseSite::point(), &p), &Budget::default()).unwrap();
        prop_assert!(la.proper_support_witness().is_none());
    }

    #[test]
    fn one_point_base_agrees_with_the_partial_bilimit(seed in any::<u64>()) {
        let b = Budget::default();
        let g = random_partial_diagram(&mut case_rng(seed, 2), &GenConfig::partial(), &b);
        let boolean = PartialBilimit::build(&g.diagram).unwrap();
        let internal = InternalPartialBilimit::build(&from_boolean_diagram(&g.diagram, &b).unwrap(), &b).unwrap();
        let r = boolean_bilimit_iso(&boolean, &internal).unwrap();
        prop_assert!(r.all_pass(), "{}", r.render_text());
    }
}
