//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the solvers and assembly routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed or non-evaluable input (bad coefficient data, unknown
    /// boundary-condition name, inconsistent dimensions).
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was invoked before the data it depends on was supplied.
    #[error("missing dependency: {0}")]
    MissingDependency(String),

    /// A precondition stated by the operation contract does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The adaptive integrator could not resolve the solution.
    #[error("integration failure near x = {location}: {message}")]
    Integration { location: f64, message: String },

    /// A series was requested beyond the order that is available or
    /// trustworthy.
    #[error("truncation: {0}")]
    Truncation(String),

    /// A quantity that the theory guarantees to be nonzero (or real, or of
    /// bounded order) failed its numerical check. Signals a tolerance
    /// problem rather than a user error.
    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),

    /// Root bracketing or refinement gave up; the reported interval still
    /// contains the unresolved feature.
    #[error("refinement failure on [{lo}, {hi}]: {message}")]
    Refinement { lo: f64, hi: f64, message: String },

    /// The downward search for a spectral floor ran away; the operator is
    /// suspected to be unbounded below (which the hypotheses exclude).
    #[error("floor search passed {floor}; operator suspected unbounded below")]
    UnboundedBelow { floor: f64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
