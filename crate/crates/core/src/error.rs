use thiserror::Error;

/// Errors produced by model construction, transfer-matrix work, oracles and certification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance {0}: must satisfy 0 < eps < 1")]
    InvalidTolerance(f64),

    #[error("Cesàro averaging did not converge after {rounds} rounds (last residual {residual:e})")]
    NonConvergence { rounds: u32, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: level {k} needs a {required}x{required} transfer matrix, cap is {cap}")]
    Capacity { k: usize, required: u128, cap: usize },

    #[error("kernel rank and Cesàro rank disagree at level {k}: kernel={kernel}, cesaro={cesaro}")]
    Inconsistency { k: usize, kernel: usize, cesaro: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size guard exceeded: {what} would exceed {limit}")]
    SizeGuard { what: &'static str, limit: usize },

    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("transfer matrix at level {k} is not contractive: norm estimate {norm}")]
    NotContractive { k: usize, norm: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
