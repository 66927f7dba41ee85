//! Error types shared across the library.

use thiserror::Error;

/// Unified error type for state construction, criterion evaluation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A local dimension below 2, or an inconsistent dimension list.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// A bipartition that is empty, full, or out of range for the system.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// Operands with incompatible shapes or local-dimension lists.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// Operator bases with the wrong normalization or length for an operation.
    #[error("operator basis mismatch: {0}")]
    BasisMismatch(String),

    /// A candidate operator that fails density-matrix validation, with the
    /// failed check named.
    #[error("not a state: {0}")]
    NotAState(String),

    /// Input data violating a structural invariant (Hermiticity, trace,
    /// positivity, normalization, vector ordering).
    #[error("validation failed: {0}")]
    Validation(String),

    /// Mutually inconsistent criterion reports (an empty feasible set), which
    /// signals a bug or an invalid input state rather than a strong bound.
    #[error("inconsistent reports: {0}")]
    Inconsistent(String),

    /// Malformed configuration (unknown criterion names, bad experiment
    /// parameters, unsupported dimension lists for a given experiment).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed state files or serialized reports.
    #[error("parse error: {0}")]
    Parse(String),

    /// Filesystem failures while reading or writing state files and reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// An internal consistency check failed (e.g. a pinned basis construction
    /// no longer reproduces its defining identity).
    #[error("internal error: {0}")]
    Internal(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
