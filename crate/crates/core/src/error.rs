use thiserror::Error;

/// Errors surfaced by path generation, scanning and experiment orchestration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("circulant embedding not positive definite for H={hurst}, n={n}, and grid too large for dense fallback")]
    EmbeddingFailed { hurst: f64, n: usize },

    #[error("price ratio {ratio} matches neither boundary (delta1={delta1}, delta2={delta2})")]
    InconsistentOutcome { ratio: f64, delta1: f64, delta2: f64 },

    #[error("bet {bet} outside the nonnegativity window [{lo}, {hi}]")]
    CollateralViolation { bet: f64, lo: f64, hi: f64 },

    #[error("round budget of {budget} rounds exceeded while scanning")]
    RoundBudgetExceeded { budget: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
