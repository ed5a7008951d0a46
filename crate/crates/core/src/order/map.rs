use std::fmt;

use super::{Elem, FinPoset, OrderError};

/// A monotone map between finite posets, stored as its assignment table.
#[derive(Clone)]
pub struct MonotoneMap {
    dom: FinPoset,
    cod: FinPoset,
    assignment: Vec<Elem>,
}

impl MonotoneMap {
    pub fn new(dom: &FinPoset, cod: &FinPoset, assignment: Vec<Elem>) -> Result<Self, OrderError> {
        if assignment.len() != dom.len() {
            let missing = dom.id(assignment.len().min(dom.len().saturating_sub(1))).to_string();
            return Err(OrderError::NotTotal(missing));
        }
        if let Some((x, _)) = assignment.iter().enumerate().find(|(_, &y)| y >= cod.len()) {
            return Err(OrderError::NotTotal(dom.id(x).into()));
        }
        let map = MonotoneMap { dom: dom.clone(), cod: cod.clone(), assignment };
        map.check_monotone()?;
        Ok(map)
    }

    pub fn from_fn(dom: &FinPoset, cod: &FinPoset, f: impl Fn(Elem) -> Elem) -> Result<Self, OrderError> {
        Self::new(dom, cod, dom.elements().map(f).collect())
    }

    /// Builds a map from `(x, f(x))` identifier pairs.
    pub fn from_id_pairs<S: AsRef<str>>(
        dom: &FinPoset,
        cod: &FinPoset,
        pairs: &[(S, S)],
    ) -> Result<Self, OrderError> {
        let mut assignment = vec![None; dom.len()];
        for (x, y) in pairs {
            let x = dom.require(x.as_ref())?;
            let y = cod.require(y.as_ref())?;
            assignment[x] = Some(y);
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| OrderError::NotTotal(dom.id(x).into())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dom, cod, assignment)
    }

    pub(crate) fn new_unchecked(dom: &FinPoset, cod: &FinPoset, assignment: Vec<Elem>) -> Self {
        debug_assert_eq!(assignment.len(), dom.len());
        MonotoneMap { dom: dom.clone(), cod: cod.clone(), assignment }
    }

    pub fn identity(p: &FinPoset) -> Self {
        Self::new_unchecked(p, p, p.elements().collect())
    }

    pub fn constant(dom: &FinPoset, cod: &FinPoset, c: Elem) -> Self {
        assert!(c < cod.len(), "constant out of range");
        Self::new_unchecked(dom, cod, vec![c; dom.len()])
    }

    fn check_monotone(&self) -> Result<(), OrderError> {
        for x in self.dom.elements() {
            for y in self.dom.elements() {
                if self.dom.leq(x, y) && !self.cod.leq(self.apply(x), self.apply(y)) {
                    return Err(OrderError::NotMonotone(
                        self.dom.id(x).into(),
                        self.dom.id(y).into(),
                        self.cod.id(self.apply(x)).into(),
                        self.cod.id(self.apply(y)).into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dom(&self) -> &FinPoset {
        &self.dom
    }

    pub fn cod(&self) -> &FinPoset {
        &self.cod
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.assignment[x]
    }

    pub fn assignment(&self) -> &[Elem] {
        &self.assignment
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &MonotoneMap) -> Result<MonotoneMap, OrderError> {
        if inner.cod != self.dom {
            return Err(OrderError::Mismatch(inner.cod.name().into(), self.dom.name().into()));
        }
        Ok(Self::new_unchecked(
            &inner.dom,
            &self.cod,
            inner.assignment.iter().map(|&y| self.apply(y)).collect(),
        ))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MonotoneMap) -> Result<MonotoneMap, OrderError> {
        next.after(self)
    }

    /// Pointwise order between parallel maps.
    pub fn leq_pointwise(&self, other: &MonotoneMap) -> bool {
        self.dom == other.dom
            && self.cod == other.cod
            && self
                .assignment
                .iter()
                .zip(&other.assignment)
                .all(|(&a, &b)| self.cod.leq(a, b))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.assignment.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    /// `f(x) <= f(y)` implies `x <= y`.
    pub fn is_order_reflecting(&self) -> bool {
        self.dom.elements().all(|x| {
            self.dom
                .elements()
                .all(|y| !self.cod.leq(self.apply(x), self.apply(y)) || self.dom.leq(x, y))
        })
    }

    /// Bijective and order-reflecting.
    pub fn is_order_iso(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective() && self.is_order_reflecting()
    }

    /// The inverse of an order isomorphism.
    pub fn inverse(&self) -> Option<MonotoneMap> {
        if !self.is_order_iso() {
            return None;
        }
        let mut inv = vec![0; self.cod.len()];
        for (x, &y) in self.assignment.iter().enumerate() {
            inv[y] = x;
        }
        Some(Self::new_unchecked(&self.cod, &self.dom, inv))
    }

    /// Renders the assignment as `x↦y` pairs of identifiers.
    pub fn describe(&self) -> String {
        let parts: Vec<_> = self
            .dom
            .elements()
            .map(|x| format!("{}↦{}", self.dom.id(x), self.cod.id(self.apply(x))))
            .collect();
        format!("[{}]", parts.join(", "))
    }
}

impl PartialEq for MonotoneMap {
    fn eq(&self, other: &Self) -> bool {
        self.assignment == other.assignment && self.dom == other.dom && self.cod == other.cod
    }
}

impl Eq for MonotoneMap {}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {}", self.dom.name(), self.cod.name(), self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_monotone() {
        let c2 = FinPoset::chain(2);
        let err = MonotoneMap::new(&c2, &c2, vec![1, 0]).unwrap_err();
        assert!(matches!(err, OrderError::NotMonotone(..)));
    }

    #[test]
    fn composition_order() {
        let c3 = FinPoset::chain(3);
        let up = MonotoneMap::new(&c3, &c3, vec![1, 2, 2]).unwrap();
        let bot = MonotoneMap::constant(&c3, &c3, 0);
        assert_eq!(up.after(&bot).unwrap().assignment(), &[1, 1, 1]);
        assert_eq!(up.then(&bot).unwrap().assignment(), &[0, 0, 0]);
    }

    #[test]
    fn composition_mismatch() {
        let f = MonotoneMap::identity(&FinPoset::chain(2));
        let g = MonotoneMap::identity(&FinPoset::chain(3));
        assert!(matches!(f.after(&g), Err(OrderError::Mismatch(..))));
    }

    #[test]
    fn iso_and_inverse() {
        let a2 = FinPoset::antichain(2);
        let swap = MonotoneMap::new(&a2, &a2, vec![1, 0]).unwrap();
        assert!(swap.is_order_iso());
        assert_eq!(swap.inverse().unwrap(), swap);
        // a bijection from an antichain onto a chain is monotone but not an iso
        let c2 = FinPoset::chain(2);
        let b = MonotoneMap::new(&a2, &c2, vec![0, 1]).unwrap();
        assert!(!b.is_order_iso());
    }
}
