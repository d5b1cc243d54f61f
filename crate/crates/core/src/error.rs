use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("matrix is not hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("matrix is rank deficient (s_min / s_max = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("conjugate gradient breakdown at iteration {iteration}")]
    CgBreakdown { iteration: usize },

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("Jacobi SVD did not converge after {sweeps} sweeps")]
    SvdNotConverged { sweeps: usize },

    #[error("phase undefined: zero entry at index {index} of {what}")]
    ZeroPhase { what: &'static str, index: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    MagicMismatch { expected: String, found: String },

    #[error("truncated payload: header declares {expected} bytes, file holds {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
