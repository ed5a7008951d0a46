//! A finite-scale domain theory kernel.
//!
//! Finite posets play the role of dcpos. On top of them this crate builds
//! embedding–projection pairs, bilimits of directed diagrams of ep-pairs (for
//! total maps and, through the lift monad, for partial maps), a presheaf-valued
//! rerun of the partial construction over a sieve-valued truth object, and a
//! solver for recursive domain equations by iterating ep-pairs along ω-chains.
//!
//! Every construction comes with an exhaustive checker so that its universal
//! property can be verified on the instances at hand.

pub mod bilimit;
pub mod diagram;
pub mod ep;
pub mod format;
pub mod gen;
pub mod lift;
pub mod order;
pub mod presheaf;
pub mod report;
pub mod solver;
pub mod suite;

pub use bilimit::{Bilimit, PartialBilimit, PartialProjCone, ProjCone};
pub use diagram::{Diagram, EpDiagram, PartialEpDiagram};
pub use ep::{EpError, EpPair};
pub use lift::{LiftPoset, StrictEpPair, StrictMap};
pub use order::{DirectedSubset, Elem, FinPoset, MonotoneMap, OrderError};
pub use report::{Check, Report};

/// Resource limits for exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on candidate functions an enumeration may consider.
    pub enumeration: u64,
    /// Upper bound on the size of any level of a domain-equation chain.
    pub level_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { enumeration: 1_000_000, level_size: 512 }
    }
}
