#![allow(dead_code)]

use dinf_core::{Elem, FinPoset};
use proptest::prelude::*;

/// Posets with at most `max` elements: a random set of pairs `i < j` in a
/// fixed numbering, closed transitively.
pub fn poset(max: usize) -> impl Strategy<Value = FinPoset> {
    (0..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
            let ids: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
            let mut pairs = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        pairs.push((ids[i].clone(), ids[j].clone()));
                    }
                    k += 1;
                }
            }
            FinPoset::generated("P", &ids, &pairs).unwrap()
        })
    })
}

pub fn nonempty_poset(max: usize) -> impl Strategy<Value = FinPoset> {
    poset(max).prop_filter("nonempty", |p| !p.is_empty())
}

/// Every function `{0..m} -> {0..n}` as an assignment vector.
pub fn all_functions(m: usize, n: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|f| (0..n).map(move |y| {
                let mut g = f.clone();
                g.push(y);
                g
            }))
            .collect();
    }
    out
}

pub fn is_monotone(a: &FinPoset, b: &FinPoset, f: &[Elem]) -> bool {
    a.elements().all(|x| a.elements().all(|y| !a.leq(x, y) || b.leq(f[x], f[y])))
}

pub fn monotone_functions(a: &FinPoset, b: &FinPoset) -> Vec<Vec<Elem>> {
    all_functions(a.len(), b.len()).into_iter().filter(|f| is_monotone(a, b, f)).collect()
}

/// Ep-pairs `A ⇄ B` found by checking the two laws on every pair of monotone maps.
pub fn brute_ep_pairs(a: &FinPoset, b: &FinPoset) -> Vec<(Vec<Elem>, Vec<Elem>)> {
    let embs = monotone_functions(a, b);
    let projs = monotone_functions(b, a);
    let mut out = Vec::new();
    for e in &embs {
        for p in &projs {
            let section = a.elements().all(|x| p[e[x]] == x);
            let deflation = b.elements().all(|y| b.leq(e[p[y]], y));
            if section && deflation {
                out.push((e.clone(), p.clone()));
            }
        }
    }
    out
}
