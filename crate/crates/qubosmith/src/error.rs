//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector was evaluated against a matrix of a different dimension.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An index fell outside `0..n`.
    #[error("index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },

    /// A coefficient was NaN or infinite.
    #[error("non-finite coefficient at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    /// A size exceeded a configured cap (brute-force enumeration, generator
    /// memory cap, ...).
    #[error("capacity exceeded: {what} = {value} is above the cap of {cap}")]
    Capacity {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    /// Invalid solver or run configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed input text; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An argument was outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Not enough data points for a fit or aggregate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Unknown solver id string.
    #[error("unknown solver id '{0}' (expected bf, sa, sd, ts, pticm or qbsolv-like:<inner>)")]
    UnknownSolver(String),

    /// An inner solver failed inside the decomposition loop.
    #[error("decomposition: inner solve failed on round {round}, subset {subset}: {source}")]
    Decomposition {
        round: usize,
        subset: usize,
        #[source]
        source: Box<Error>,
    },

    /// A solve exceeded its memory or wall-clock budget.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
