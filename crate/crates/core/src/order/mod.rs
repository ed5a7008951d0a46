//! Finite posets, monotone maps, directed subsets, and the constructions built
//! from them. Finite posets stand in for dcpos: a finite directed subset has a
//! greatest member, which is its least upper bound.

mod construct;
mod enumerate;
mod map;
mod poset;

pub use construct::{coproduct, function_space, product_family, sub_poset, tuple_id, FunctionSpace, Product};
pub use enumerate::enumerate_monotone_maps;
pub(crate) use enumerate::{check_budget, for_each_monotone, function_count};
pub use map::MonotoneMap;
pub use poset::{directed_lub, DirectedSubset, Elem, FinPoset};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("relation is not antisymmetric: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    NotAntisymmetric(String, String),
    #[error("relation is not transitive: `{0}` <= `{1}` <= `{2}` but not `{0}` <= `{2}`")]
    NotTransitive(String, String, String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("subset is empty, so not directed")]
    EmptySubset,
    #[error("subset is not directed: `{0}` and `{1}` have no upper bound in it")]
    NotDirected(String, String),
    #[error("map is not monotone: `{0}` <= `{1}` but `{2}` is not below `{3}`")]
    NotMonotone(String, String, String, String),
    #[error("map has no valid image for `{0}`")]
    NotTotal(String),
    #[error("maps do not compose: `{0}` is not `{1}`")]
    Mismatch(String, String),
    #[error("product over an empty index")]
    EmptyIndex,
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}
