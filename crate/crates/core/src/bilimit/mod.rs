//! Bilimits of directed diagrams of ep-pairs: total maps over posets and
//! partial maps presented as strict maps between lifts.

mod partial;
mod total;

use thiserror::Error;

use crate::diagram::DiagramError;
use crate::ep::EpError;
use crate::lift::LiftError;
use crate::order::{Elem, FinPoset, OrderError};

pub use partial::{
    mediating_projection_partial, support_of_e_infinity, termination_support, verify_universal_partial,
    PartialBilimit, PartialProjCone, PartialUniversalReport,
};
pub use total::{mediating_projection, verify_universal, Bilimit, ProjCone, UniversalReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BilimitError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Ep(#[from] EpError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error("tuple {0} is not coherent")]
    NotCoherent(String),
    #[error("cone is invalid: {0}")]
    ConeInvalid(String),
    #[error("directed lub undefined: {0}")]
    LubUndefined(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

/// All tuples `σ` with `σ_j` in `carriers[j]` such that `down(i, j, σ_j) = σ_i`
/// for every `i <= j`, in lexicographic order of index positions.
///
/// Components are assigned from the top of the index downwards, so each one is
/// checked against every already-assigned component above it.
pub(crate) fn coherent_tuples(
    index: &FinPoset,
    carriers: &[usize],
    down: impl Fn(Elem, Elem, Elem) -> Elem,
) -> Vec<Vec<Elem>> {
    let order: Vec<Elem> = index.linear_extension().into_iter().rev().collect();
    let n = index.len();
    let mut out = Vec::new();
    let mut tuple = vec![0; n];
    fn go(
        depth: usize,
        order: &[Elem],
        index: &FinPoset,
        carriers: &[usize],
        down: &dyn Fn(Elem, Elem, Elem) -> Elem,
        tuple: &mut Vec<Elem>,
        out: &mut Vec<Vec<Elem>>,
    ) {
        if depth == order.len() {
            out.push(tuple.clone());
            return;
        }
        let i = order[depth];
        for x in 0..carriers[i] {
            let ok = order[..depth]
                .iter()
                .filter(|&&j| index.leq(i, j))
                .all(|&j| down(i, j, tuple[j]) == x);
            if ok {
                tuple[i] = x;
                go(depth + 1, order, index, carriers, down, tuple, out);
            }
        }
    }
    go(0, &order, index, carriers, &down, &mut tuple, &mut out);
    out.sort();
    out
}
