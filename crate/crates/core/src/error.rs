use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension overflow: {0}")]
    Overflow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("design degree {have} is below the required degree {need}")]
    DesignDegree { have: usize, need: usize },

    #[error("no cached design: {0}")]
    DesignCacheMiss(String),

    #[error("certificate undefined: minimum of the form is {0}, it must be strictly positive")]
    NotPositive(f64),

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("Laguerre root finding did not converge for m = {0}")]
    NonConvergence(usize),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
