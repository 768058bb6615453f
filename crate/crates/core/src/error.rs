use std::io;

use thiserror::Error;

use crate::combinatorics::ContentViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid partition {parts:?}: {reason}")]
    InvalidPartition { parts: Vec<i64>, reason: String },

    #[error("invalid content vector: {0}")]
    ContentInvariant(ContentViolation),

    #[error("dimension guard: {what} has dimension {dimension}, cap is {cap}")]
    DimensionGuard {
        what: String,
        dimension: usize,
        cap: usize,
    },

    #[error("generators do not define a representation: {0}")]
    HomomorphismViolation(String),

    #[error("generator validation failed: {0}")]
    Validation(String),

    #[error("spectrum is not integral: {0}")]
    SpectrumNotInteger(String),

    #[error("matrices do not commute (invariance residual {residual:e})")]
    NotCommuting { residual: f64 },

    #[error("numerical failure in {stage}: residual {residual:e} exceeds {tolerance:e}")]
    NumericalFailure {
        stage: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("inconsistent spectrum: partition {partition:?} occurs {count} times, not a multiple of its dimension {dimension}")]
    InconsistentSpectrum {
        partition: Vec<usize>,
        count: usize,
        dimension: usize,
    },

    #[error("null space has dimension {found}, expected multiplicity {expected}")]
    MultiplicityMismatch { expected: usize, found: usize },

    #[error("column {index} is linearly dependent on the previous columns")]
    DependentColumns { index: usize },

    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
