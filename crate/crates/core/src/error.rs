use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cube function: {0}")]
    InvalidFunction(String),

    #[error("invalid subcube: {0}")]
    InvalidSubcube(String),

    #[error("invalid query family: {0}")]
    InvalidFamily(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: index {index} is out of range for n={n}")]
    OutOfRange { line: usize, index: usize, n: usize },

    #[error("function is not odd")]
    NotOdd,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("function is not balanced (mean {mean:e})")]
    Unbalanced { mean: f64 },

    #[error("{what} exceeds the supported limit {limit}")]
    Capability { what: String, limit: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error(
        "solver did not converge after {iterations} iterations \
         (feasibility residual {residual:e}, duality gap {gap:e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        gap: f64,
    },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    Eigensolver { dim: usize },

    #[error("inconsistent solution: {0}")]
    Inconsistent(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
