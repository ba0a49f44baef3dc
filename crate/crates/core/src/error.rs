use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {0} is outside the open unit disk")]
    OutOfDomain(Complex64),

    #[error("weight model violation: {0}")]
    ModelViolation(String),

    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("function is not resolved on its grid (tail ratio {tail:.3e})")]
    Unresolved { tail: f64 },

    #[error("resolution exceeded: grid n = {n} still leaves tail ratio {tail:.3e}")]
    ResolutionExceeded { n: usize, tail: f64 },

    #[error("iteration diverged after {iterations} steps (last update {last:.3e})")]
    Divergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("map is not univalent: {0}")]
    NotUnivalent(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid region sequence at index {index}: {reason}")]
    InvalidSequence { index: usize, reason: String },

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
