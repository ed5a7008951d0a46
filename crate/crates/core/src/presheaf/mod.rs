//! Posets internal to presheaves on a finite base poset.
//!
//! Truth values at a stage `p` are sieves on `p`, so definedness of a partial
//! element can hold over part of `↓p` without holding everywhere. The lift,
//! its monad structure, strict ep-pairs and the partial bilimit are all
//! recomputed stagewise and checked there. Over a one-point base everything
//! collapses to the two-valued constructions, which `compare` checks through
//! explicit isomorphisms.

mod bilimit;
mod compare;
mod lift;
mod poset;
mod site;

use thiserror::Error;

use crate::diagram::DiagramError;
use crate::ep::EpError;
use crate::order::OrderError;

pub use bilimit::{
    mediating_projection_internal, verify_universal_internal, InternalDiagram, InternalPartialBilimit, InternalProjCone,
};
pub use compare::{boolean_bilimit_iso, boolean_lift_iso, from_boolean_diagram};
pub use lift::{
    enumerate_internal_strict_eps, enumerate_internal_strict_maps, internal_kleisli, internal_lift, internal_mu,
    lift_nat, monad_law_report, InternalLift, InternalLiftElem, InternalStrictEp, InternalStrictMap,
};
pub use poset::{enumerate_natural_maps, NatMap, PresheafPoset};
pub use site::{omega_presheaf, BaseSite, Sieve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("restrictions are not functorial at ({0}, {1}, {2})")]
    NotFunctorial(String, String, String),
    #[error("map is not natural: square from `{0}` to `{1}` fails at `{2}`")]
    NotNatural(String, String, String),
    #[error("map is not strict at stage `{0}` on `{1}`")]
    NotStrict(String, String),
    #[error("not an ep-pair: {0}")]
    NotEp(String),
    #[error("type mismatch: {0}")]
    Mismatch(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("apex is not stable under restriction: {0}")]
    NotStable(String),
    #[error("cone is invalid: {0}")]
    ConeInvalid(String),
    #[error("directed lub undefined: {0}")]
    LubUndefined(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Ep(#[from] EpError),
    #[error(transparent)]
    Order(#[from] OrderError),
}
