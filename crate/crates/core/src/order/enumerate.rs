use super::{Elem, FinPoset, MonotoneMap, OrderError};
use crate::Budget;

/// `|B|^|A|` as a saturating count.
pub(crate) fn function_count(a: usize, b: usize) -> u128 {
    let mut n: u128 = 1;
    for _ in 0..a {
        n = n.saturating_mul(b as u128);
        if n == u128::MAX {
            break;
        }
    }
    n
}

pub(crate) fn check_budget(candidates: u128, budget: &Budget) -> Result<(), OrderError> {
    if candidates > budget.enumeration as u128 {
        return Err(OrderError::BudgetExceeded { needed: candidates, budget: budget.enumeration });
    }
    Ok(())
}

/// Visits every monotone assignment `A -> B` in lexicographic order of the
/// assignment vector. `fixed[x] = Some(y)` pins `x` to `y`. The visitor
/// returns `false` to stop early.
pub(crate) fn for_each_monotone(
    a: &FinPoset,
    b: &FinPoset,
    fixed: &[Option<Elem>],
    mut visit: impl FnMut(&[Elem]) -> bool,
) {
    let n = a.len();
    if n == 0 {
        visit(&[]);
        return;
    }
    if b.is_empty() {
        return;
    }
    let mut assign = vec![0usize; n];
    // candidate images at position x must respect every earlier-assigned y
    fn ok(a: &FinPoset, b: &FinPoset, assign: &[Elem], x: Elem, v: Elem) -> bool {
        (0..x).all(|y| {
            (!a.leq(y, x) || b.leq(assign[y], v)) && (!a.leq(x, y) || b.leq(v, assign[y]))
        })
    }
    let mut x = 0usize;
    let mut next = vec![0usize; n];
    loop {
        let mut placed = false;
        while next[x] < b.len() {
            let v = next[x];
            next[x] += 1;
            if fixed.get(x).copied().flatten().is_some_and(|f| f != v) {
                continue;
            }
            if ok(a, b, &assign, x, v) {
                assign[x] = v;
                placed = true;
                break;
            }
        }
        if placed {
            if x + 1 == n {
                if !visit(&assign) {
                    return;
                }
            } else {
                x += 1;
                next[x] = 0;
            }
        } else {
            if x == 0 {
                return;
            }
            x -= 1;
        }
    }
}

/// All monotone maps `A -> B` in a deterministic order (lexicographic on the
/// assignment vector). Fails when `|B|^|A|` exceeds the enumeration budget.
pub fn enumerate_monotone_maps(a: &FinPoset, b: &FinPoset, budget: &Budget) -> Result<Vec<MonotoneMap>, OrderError> {
    check_budget(function_count(a.len(), b.len()), budget)?;
    let mut out = Vec::new();
    for_each_monotone(a, b, &[], |assign| {
        out.push(MonotoneMap::new_unchecked(a, b, assign.to_vec()));
        true
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: every function in `B^A`, filtered for monotonicity.
    fn brute_force_count(a: &FinPoset, b: &FinPoset) -> usize {
        let total = function_count(a.len(), b.len()) as usize;
        (0..total)
            .filter(|&code| {
                let mut rest = code;
                let f: Vec<Elem> = (0..a.len())
                    .map(|_| {
                        let v = rest % b.len();
                        rest /= b.len();
                        v
                    })
                    .collect();
                a.elements()
                    .all(|x| a.elements().all(|y| !a.leq(x, y) || b.leq(f[x], f[y])))
            })
            .count()
    }

    #[test]
    fn small_counts() {
        let budget = Budget::default();
        let c2 = FinPoset::chain(2);
        let a2 = FinPoset::antichain(2);
        assert_eq!(enumerate_monotone_maps(&c2, &c2, &budget).unwrap().len(), 3);
        assert_eq!(enumerate_monotone_maps(&a2, &c2, &budget).unwrap().len(), 4);
        assert_eq!(
            enumerate_monotone_maps(&FinPoset::chain(3), &FinPoset::point(), &budget).unwrap().len(),
            1
        );
        assert_eq!(brute_force_count(&c2, &c2), 3);
        assert_eq!(brute_force_count(&a2, &c2), 4);
    }

    #[test]
    fn empty_domain_has_one_map() {
        let budget = Budget::default();
        let maps = enumerate_monotone_maps(&FinPoset::empty(), &FinPoset::chain(2), &budget).unwrap();
        assert_eq!(maps.len(), 1);
        assert!(enumerate_monotone_maps(&FinPoset::point(), &FinPoset::empty(), &budget)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = Budget { enumeration: 8, ..Budget::default() };
        let c3 = FinPoset::chain(3);
        let err = enumerate_monotone_maps(&c3, &c3, &tiny).unwrap_err();
        assert_eq!(err, OrderError::BudgetExceeded { needed: 27, budget: 8 });
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let c2 = FinPoset::chain(2);
        let maps = enumerate_monotone_maps(&c2, &c2, &Budget::default()).unwrap();
        let assigns: Vec<&[Elem]> = maps.iter().map(|m| m.assignment()).collect();
        assert_eq!(assigns, vec![&[0, 0][..], &[0, 1], &[1, 1]]);
    }

    #[test]
    fn matches_brute_force_on_assorted_pairs() {
        let budget = Budget::default();
        let posets = [
            FinPoset::empty(),
            FinPoset::point(),
            FinPoset::chain(3),
            FinPoset::antichain(3),
            FinPoset::generated("v", &["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap(),
            FinPoset::generated("d", &["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]).unwrap(),
        ];
        for a in &posets {
            for b in &posets {
                let n = enumerate_monotone_maps(a, b, &budget).unwrap().len();
                if b.is_empty() && !a.is_empty() {
                    assert_eq!(n, 0);
                } else {
                    assert_eq!(n, brute_force_count(a, b), "{a:?} -> {b:?}");
                }
            }
        }
    }
}
