//! Composite posets: products, subposets, coproducts, function spaces.

use super::{enumerate_monotone_maps, Elem, FinPoset, MonotoneMap, OrderError};
use crate::Budget;

/// A finite product with lexicographically ordered tuples (last coordinate
/// varies fastest). Tuple identifiers are `<x0,x1,...>`.
#[derive(Clone, Debug)]
pub struct Product {
    pub poset: FinPoset,
    pub projections: Vec<MonotoneMap>,
    factors: Vec<FinPoset>,
}

impl Product {
    pub fn factors(&self) -> &[FinPoset] {
        &self.factors
    }

    /// Coordinates of a product element.
    pub fn tuple(&self, e: Elem) -> Vec<Elem> {
        let mut rest = e;
        let mut out = vec![0; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            out[i] = rest % f.len();
            rest /= f.len();
        }
        out
    }

    pub fn index_of(&self, tuple: &[Elem]) -> Elem {
        tuple
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&x, f)| acc * f.len() + x)
    }
}

/// Renders a tuple identifier from component identifiers.
pub fn tuple_id<S: AsRef<str>>(parts: &[S]) -> String {
    let parts: Vec<&str> = parts.iter().map(|s| s.as_ref()).collect();
    format!("<{}>", parts.join(","))
}

/// The product of an indexed family under the pointwise order.
pub fn product_family(index: &[String], factors: &[FinPoset]) -> Result<Product, OrderError> {
    if index.is_empty() {
        return Err(OrderError::EmptyIndex);
    }
    assert_eq!(index.len(), factors.len(), "one factor per index");
    let size: usize = factors.iter().map(FinPoset::len).product();
    let shell = Product {
        poset: FinPoset::empty(),
        projections: Vec::new(),
        factors: factors.to_vec(),
    };
    let tuples: Vec<Vec<Elem>> = (0..size).map(|e| shell.tuple(e)).collect();
    let ids = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().zip(factors).map(|(&x, f)| f.id(x)).collect();
            tuple_id(&parts)
        })
        .collect();
    let name = format!("Π[{}]", index.join(","));
    let poset = FinPoset::from_fn(name, ids, |a, b| {
        tuples[a]
            .iter()
            .zip(&tuples[b])
            .zip(factors)
            .all(|((&x, &y), f)| f.leq(x, y))
    })?;
    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, f)| MonotoneMap::new_unchecked(&poset, f, tuples.iter().map(|t| t[i]).collect()))
        .collect();
    Ok(Product { poset, projections, factors: factors.to_vec() })
}

/// The induced subposet on the elements satisfying `keep`, with its inclusion.
pub fn sub_poset(p: &FinPoset, keep: impl Fn(Elem) -> bool) -> (FinPoset, MonotoneMap) {
    let kept: Vec<Elem> = p.elements().filter(|&x| keep(x)).collect();
    let ids = kept.iter().map(|&x| p.id(x).to_string()).collect();
    let sub = FinPoset::from_fn(format!("{}|sub", p.name()), ids, |a, b| p.leq(kept[a], kept[b]))
        .expect("induced order of a poset is a poset");
    let inclusion = MonotoneMap::new_unchecked(&sub, p, kept);
    (sub, inclusion)
}

/// Disjoint union with no order across the summands. `A`'s elements come
/// first, as `inl(a)`, then `B`'s as `inr(b)`.
pub fn coproduct(a: &FinPoset, b: &FinPoset) -> FinPoset {
    let n = a.len();
    let ids = a
        .ids()
        .iter()
        .map(|x| format!("inl({x})"))
        .chain(b.ids().iter().map(|y| format!("inr({y})")))
        .collect();
    FinPoset::from_fn(format!("{}+{}", a.name(), b.name()), ids, |x, y| match (x < n, y < n) {
        (true, true) => a.leq(x, y),
        (false, false) => b.leq(x - n, y - n),
        _ => false,
    })
    .expect("coproduct of posets")
}

/// The poset of monotone maps `A -> B` under the pointwise order. Elements
/// follow the deterministic enumeration order; identifiers list images in
/// domain order as `{f(a0),f(a1),...}`.
#[derive(Clone, Debug)]
pub struct FunctionSpace {
    pub poset: FinPoset,
    maps: Vec<MonotoneMap>,
    index: std::collections::HashMap<Vec<Elem>, Elem>,
}

impl FunctionSpace {
    pub fn map(&self, e: Elem) -> &MonotoneMap {
        &self.maps[e]
    }

    pub fn maps(&self) -> &[MonotoneMap] {
        &self.maps
    }

    pub fn index_of(&self, f: &MonotoneMap) -> Option<Elem> {
        self.index.get(f.assignment()).copied()
    }

    pub fn index_of_assignment(&self, assignment: &[Elem]) -> Option<Elem> {
        self.index.get(assignment).copied()
    }
}

pub fn function_space(a: &FinPoset, b: &FinPoset, budget: &Budget) -> Result<FunctionSpace, OrderError> {
    let maps = enumerate_monotone_maps(a, b, budget)?;
    let ids = maps
        .iter()
        .map(|f| {
            let parts: Vec<&str> = f.assignment().iter().map(|&y| b.id(y)).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let poset = FinPoset::from_fn(format!("[{}->{}]", a.name(), b.name()), ids, |x, y| {
        maps[x].leq_pointwise(&maps[y])
    })?;
    let index = maps
        .iter()
        .enumerate()
        .map(|(e, f)| (f.assignment().to_vec(), e))
        .collect();
    Ok(FunctionSpace { poset, maps, index })
}
