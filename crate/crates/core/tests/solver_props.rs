mod common;

use std::cmp::Ordering;
use std::sync::Arc;

use common::{monotone_functions, poset};
use dinf_core::ep::enumerate_ep_pairs;
use dinf_core::lift::LiftPoset;
use dinf_core::order::enumerate_monotone_maps;
use dinf_core::solver::{
    builtin_constants, compare, functor_ep, functor_object, iterate_chain, lfp, parse_expr, ChainMode, DomainExpr,
    FiniteRankElem,
};
use dinf_core::{Budget, FinPoset};
use proptest::prelude::*;

fn expr() -> impl Strategy<Value = DomainExpr> {
    let consts = builtin_constants();
    let bool_ = consts["bool"].clone();
    let sier = consts["sierpinski"].clone();
    let leaf = prop_oneof![
        Just(DomainExpr::Var),
        Just(DomainExpr::Unit),
        Just(DomainExpr::Empty),
        Just(DomainExpr::Const("bool".into(), bool_)),
        Just(DomainExpr::Const("sierpinski".into(), sier)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(DomainExpr::lift),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| DomainExpr::sum(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| DomainExpr::prod(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| DomainExpr::arrow(a, b)),
        ]
    })
}

fn e(s: &str) -> DomainExpr {
    parse_expr(s, &builtin_constants()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn printing_then_parsing_is_the_identity(x in expr()) {
        prop_assert_eq!(parse_expr(&x.to_string(), &builtin_constants()).unwrap(), x);
    }

    #[test]
    fn object_sizes_follow_the_constructors(p in poset(3)) {
        let b = Budget::default();
        let n = p.len();
        let size = |s: &str, m| functor_object(&e(s), &p, m, &b).unwrap().len();
        prop_assert_eq!(size("lift X", ChainMode::Total), n + 1);
        prop_assert_eq!(size("X + X", ChainMode::Total), 2 * n);
        prop_assert_eq!(size("X * X", ChainMode::Total), n * n);
        prop_assert_eq!(size("1 + X", ChainMode::Partial), n + 1);
        prop_assert_eq!(size("X -> X", ChainMode::Total), monotone_functions(&p, &p).len());
        let lp = LiftPoset::new(&p);
        prop_assert_eq!(size("X -> X", ChainMode::Partial), monotone_functions(&p, lp.carrier()).len());
    }

    #[test]
    fn functor_action_preserves_composition(a in poset(2), b in poset(2), c in poset(3), k in 0usize..4) {
        let budget = Budget::default();
        let x = [e("lift X"), e("X -> X"), e("X * bool"), e("1 + X")][k].clone();
        let fs = enumerate_ep_pairs(&a, &b, &budget).unwrap();
        let gs = enumerate_ep_pairs(&b, &c, &budget).unwrap();
        for f in fs.iter().take(3) {
            for g in gs.iter().take(3) {
                let whole = functor_ep(&x, &f.then(g).unwrap(), &budget).unwrap();
                let parts = functor_ep(&x, f, &budget).unwrap().then(&functor_ep(&x, g, &budget).unwrap()).unwrap();
                prop_assert_eq!(whole, parts);
            }
        }
    }

    #[test]
    fn kleene_iteration_finds_the_least_fixed_point(p in poset(3), pick in any::<prop::sample::Index>()) {
        let d = LiftPoset::new(&p).carrier().clone();
        let maps = enumerate_monotone_maps(&d, &d, &Budget::default()).unwrap();
        let f = &maps[pick.index(maps.len())];
        let (x, steps) = lfp(f).unwrap();
        let fixed: Vec<usize> = d.elements().filter(|&y| f.apply(y) == y).collect();
        prop_assert!(fixed.contains(&x));
        prop_assert!(fixed.iter().all(|&y| d.leq(x, y)));
        prop_assert!(steps <= d.len());
    }

    #[test]
    fn finite_rank_elements_compare_through_coercion(r1 in 0usize..5, r2 in 0usize..5, v1 in 0usize..5, v2 in 0usize..5) {
        let chain = Arc::new(
            iterate_chain(&e("lift X"), &FinPoset::empty(), 4, ChainMode::Partial, &Budget::default()).unwrap(),
        );
        prop_assume!(v1 < r1 && v2 < r2);
        let x = FiniteRankElem::new(&chain, r1, v1).unwrap();
        let y = FiniteRankElem::new(&chain, r2, v2).unwrap();
        let cx = x.canonical_rank();
        prop_assert!(cx.is_canonical());
        prop_assert_eq!(cx.canonical_rank().rank(), cx.rank());
        prop_assert_eq!(compare(&x, &cx).unwrap(), Some(Ordering::Equal));
        for r in r1..5 {
            prop_assert_eq!(compare(&x, &x.coerce(r).unwrap()).unwrap(), Some(Ordering::Equal));
        }
        let top = r1.max(r2);
        let (a, b) = (x.coerce(top).unwrap().value(), y.coerce(top).unwrap().value());
        let level = &chain.levels()[top];
        let want = match (level.leq(a, b), level.leq(b, a)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        };
        prop_assert_eq!(compare(&x, &y).unwrap(), want);
    }
}
