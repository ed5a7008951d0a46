use super::PresheafError;
use crate::order::{Elem, FinPoset, MonotoneMap};

/// A finite base poset, with each principal downset `↓p` cached as a bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSite {
    base: FinPoset,
    down: Vec<u64>,
}

/// A downward-closed subset of `↓at`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Sieve {
    pub at: Elem,
    pub members: u64,
}

impl BaseSite {
    pub fn new(base: FinPoset) -> Result<Self, PresheafError> {
        if base.len() > 64 {
            return Err(PresheafError::TooLarge(format!("base has {} elements, at most 64 supported", base.len())));
        }
        let down = base
            .elements()
            .map(|p| base.elements().filter(|&q| base.leq(q, p)).fold(0u64, |m, q| m | 1 << q))
            .collect();
        Ok(BaseSite { base, down })
    }

    /// The one-point space; presheaves over it are plain posets.
    pub fn point() -> Self {
        BaseSite::new(FinPoset::point()).expect("small")
    }

    /// The Sierpiński space as the 2-chain `0 < 1`.
    pub fn sierpinski() -> Self {
        BaseSite::new(FinPoset::chain(2)).expect("small")
    }

    pub fn base(&self) -> &FinPoset {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn down(&self, p: Elem) -> u64 {
        self.down[p]
    }

    pub fn is_sieve(&self, p: Elem, mask: u64) -> bool {
        mask & !self.down[p] == 0 && members(mask).all(|q| self.down[q] & !mask == 0)
    }

    /// All sieves at `p`, smallest first (by size, then mask).
    pub fn sieves_at(&self, p: Elem) -> Vec<u64> {
        let full = self.down[p];
        let mut out = Vec::new();
        let mut sub = full;
        loop {
            if self.is_sieve(p, sub) {
                out.push(sub);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
        out.sort_by_key(|&m| (m.count_ones(), m));
        out
    }

    pub fn sieve_id(&self, mask: u64) -> String {
        let ids: Vec<&str> = members(mask).map(|q| self.base.id(q)).collect();
        format!("{{{}}}", ids.join(","))
    }

    /// The elements below `p` from the top down, so that every element comes
    /// before everything below it.
    pub fn top_down(&self) -> Vec<Elem> {
        self.base.linear_extension().into_iter().rev().collect()
    }
}

impl Sieve {
    pub fn is_maximal(&self, site: &BaseSite) -> bool {
        self.members == site.down(self.at)
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn contains(&self, q: Elem) -> bool {
        self.members >> q & 1 == 1
    }

    /// Neither empty nor maximal: definedness that is only local.
    pub fn is_proper(&self, site: &BaseSite) -> bool {
        !self.is_empty() && !self.is_maximal(site)
    }
}

pub(crate) fn members(mask: u64) -> impl Iterator<Item = Elem> {
    (0..64).filter(move |&q| mask >> q & 1 == 1)
}

/// The subobject classifier: sieves at `p` under inclusion, restricted by
/// intersecting with `↓q`.
pub fn omega_presheaf(site: &BaseSite) -> super::PresheafPoset {
    let sieves: Vec<Vec<u64>> = site.base.elements().map(|p| site.sieves_at(p)).collect();
    let stages: Vec<FinPoset> = site
        .base
        .elements()
        .map(|p| {
            let ids = sieves[p].iter().map(|&m| site.sieve_id(m)).collect();
            FinPoset::from_fn(format!("Ω({})", site.base.id(p)), ids, |a, b| {
                sieves[p][a] & !sieves[p][b] == 0
            })
            .expect("inclusion order")
        })
        .collect();
    let mut given = Vec::new();
    for p in site.base.elements() {
        for q in site.base.elements().filter(|&q| site.base.lt(q, p)) {
            let assign = sieves[p]
                .iter()
                .map(|&m| {
                    let r = m & site.down[q];
                    sieves[q].iter().position(|&s| s == r).expect("restriction of a sieve is a sieve")
                })
                .collect();
            given.push((p, q, MonotoneMap::new_unchecked(&stages[p], &stages[q], assign)));
        }
    }
    super::PresheafPoset::new(site, stages, given).expect("Ω is a presheaf")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_over_a_point_is_boolean() {
        let om = omega_presheaf(&BaseSite::point());
        assert_eq!(om.stage(0).len(), 2);
        assert!(om.stage(0).leq(0, 1));
    }

    #[test]
    fn omega_over_sierpinski() {
        let site = BaseSite::sierpinski();
        let om = omega_presheaf(&site);
        assert_eq!(om.stage(1).ids(), &["{}", "{0}", "{0,1}"]);
        assert_eq!(om.stage(0).ids(), &["{}", "{0}"]);
        assert!(om.stage(1).leq(0, 1) && om.stage(1).leq(1, 2));
        // {0,1} at 1 restricts to the top sieve at 0
        assert_eq!(om.restrict(1, 0, 2), 1);
        assert_eq!(om.restrict(1, 0, 1), 1);
        assert_eq!(om.restrict(1, 0, 0), 0);
    }

    #[test]
    fn sieves_on_a_vee() {
        // a, b below c: sieves at c are downsets of {a,b,c}
        let base = FinPoset::generated("v", &["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let site = BaseSite::new(base).unwrap();
        assert_eq!(site.sieves_at(2).len(), 5);
        assert_eq!(site.sieves_at(0).len(), 2);
    }

    #[test]
    fn omega_stages_are_lattices() {
        let base = FinPoset::generated("v", &["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let site = BaseSite::new(base).unwrap();
        let om = omega_presheaf(&site);
        for p in site.base().elements() {
            let s = om.stage(p);
            for x in s.elements() {
                for y in s.elements() {
                    assert!(s.join(&[x, y]).is_some());
                }
            }
            assert!(s.bottom().is_some() && s.top().is_some());
        }
    }
}
