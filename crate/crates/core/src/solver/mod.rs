//! Recursive domain equations `D ≅ F(D)` for a constructor expression `F` in
//! one variable, solved at finite depth by iterating `F` on ep-pairs along an
//! ω-chain and checking each truncation against the bilimit construction.

mod chain;
mod expr;
mod functor;
mod rank;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bilimit::BilimitError;
use crate::ep::EpError;
use crate::lift::LiftError;
use crate::order::OrderError;

pub use chain::{iterate_chain, omega_bar, truncated_bilimit, ChainApprox, ChainLinks, OmegaBar, TruncatedBilimit};
pub use expr::{builtin_constants, parse_expr, Constants, DomainExpr};
pub use functor::{functor_ep, functor_object, functor_strict_ep};
pub use rank::{compare, lfp, lub_finite_rank, FiniteRankElem};

/// Whether chain links are ordinary ep-pairs or strict ones between lifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    Total,
    Partial,
}

impl std::fmt::Display for ChainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChainMode::Total => "total",
            ChainMode::Partial => "partial",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("only the variable `X` is allowed, found `{0}`")]
    MultipleVariables(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("no ep-pair from `{0}` into its image under the functor; total chains need a starter")]
    NoStarterEp(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("poset `{0}` has no least element")]
    NotPointed(String),
    #[error("finite-rank elements live on different chains")]
    DifferentChains,
    #[error("level {0} is out of range")]
    LevelOutOfRange(usize),
    #[error("type mismatch: {0}")]
    Mismatch(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Order(OrderError),
    #[error(transparent)]
    Ep(EpError),
    #[error(transparent)]
    Lift(LiftError),
    #[error(transparent)]
    Bilimit(BilimitError),
}

fn budget_message(e: &OrderError) -> Option<String> {
    match e {
        OrderError::BudgetExceeded { .. } => Some(e.to_string()),
        _ => None,
    }
}

impl From<OrderError> for SolverError {
    fn from(e: OrderError) -> Self {
        match budget_message(&e) {
            Some(m) => SolverError::BudgetExceeded(m),
            None => SolverError::Order(e),
        }
    }
}

impl From<EpError> for SolverError {
    fn from(e: EpError) -> Self {
        match e {
            EpError::Order(o) => o.into(),
            e => SolverError::Ep(e),
        }
    }
}

impl From<LiftError> for SolverError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::Order(o) => o.into(),
            LiftError::Ep(ep) => ep.into(),
            e => SolverError::Lift(e),
        }
    }
}

impl From<BilimitError> for SolverError {
    fn from(e: BilimitError) -> Self {
        SolverError::Bilimit(e)
    }
}
