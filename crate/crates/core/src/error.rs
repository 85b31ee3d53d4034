//! Error type shared by every layer of the crate.

use thiserror::Error;

/// Errors raised by model construction, certification, simulation and synthesis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid space decomposition: {0}")]
    Decomposition(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("generator admits no positive unit-trace stationary element (kernel dimension {kernel_dim})")]
    NoStationaryState { kernel_dim: usize },

    #[error("mode error: {0}")]
    Mode(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("model is not invariant for the decomposition: {0}")]
    NotInvariant(String),

    #[error("state left the admissible set at t = {time}: min eigenvalue {min_eigenvalue:.3e}")]
    StateInvariantViolation { time: f64, min_eigenvalue: f64 },

    #[error("time grids of the trajectory records differ")]
    GridMismatch,

    #[error("target state is not pure (purity {0:.6})")]
    NotPure(f64),

    #[error("target is not stabilizable: commutator residual {residual:.3e}")]
    NotStabilizable { residual: f64 },

    #[error("ladder coupling m[{0}] is zero")]
    ZeroCoupling(usize),

    #[error("required compensation is not realizable: residual {residual:.3e} on {condition}")]
    NotCompensable { condition: String, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
