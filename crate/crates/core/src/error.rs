use thiserror::Error;

use crate::execution::RunStatus;
use crate::model::Violation;

/// Errors raised by the kernel, the checker and the transformations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of range for dimension {dim}")]
    VarOutOfRange { index: usize, dim: usize },

    #[error("polyhedron is unbounded")]
    UnboundedPolyhedron,

    #[error("strict inequality not allowed in a closed polyhedron")]
    StrictConstraint,

    #[error("unsupported guard: {0}")]
    UnsupportedGuard(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("run did not halt (status: {0})")]
    RunNotHalted(RunStatus),

    #[error("invalid transition system: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidSystem(Vec<Violation>),

    #[error("invariant labeling mismatch: {0}")]
    LabelingMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
