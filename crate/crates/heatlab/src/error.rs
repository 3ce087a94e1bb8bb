//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("balls {i} and {j} overlap (gap {gap:e})")]
    OverlappingBalls { i: usize, j: usize, gap: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("separation gap is not positive: delta = {delta:e}")]
    NonPositiveGap { delta: f64 },

    #[error("quadrature did not reach tolerance {requested:e}: best value {value:e}, achieved {achieved:e}")]
    QuadratureBudget {
        value: f64,
        requested: f64,
        achieved: f64,
    },

    #[error("error budget {requested:e} unattainable: value {value:e}, achieved {achieved:e}")]
    EpsUnattainable {
        value: f64,
        requested: f64,
        achieved: f64,
    },

    #[error("parameter out of admissible regime: {0}")]
    OutOfRegime(String),

    #[error("monotonicity violated: {0}")]
    NonMonotonic(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
