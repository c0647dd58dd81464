use thiserror::Error;

/// Errors raised by the solvers and the distribution calculus.
///
/// Row indices are 0-based; the rendered message uses 1-based equation
/// numbers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid initialization: {0}")]
    InvalidInit(String),

    #[error("unsupported shape: {rows} equations in {cols} unknowns (need rows <= cols)")]
    UnsupportedShape { rows: usize, cols: usize },

    #[error("system is incompatible at equation {}", row + 1)]
    Incompatible { row: usize },

    #[error("equation {} is ill-conditioned: |a^T p| = {value:e} is below tolerance", row + 1)]
    IllConditioned { row: usize, value: f64 },

    #[error("invalid state: {0}")]
    State(String),

    #[error("equation {} was skipped and has no steplength", row + 1)]
    NoSteplength { row: usize },

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
