//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("unsupported (dim, scheme) pairing: dim {dim}, scheme {scheme}")]
    UnsupportedScheme { dim: usize, scheme: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("bodies live on different grids")]
    GridMismatch,

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("sample at index {index} must be positive, got {value}")]
    NonPositive { index: usize, value: f64 },

    #[error("convexity margin violated: min(h'' + h) = {min_value}, required {required}")]
    ConvexityViolation { min_value: f64, required: f64 },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("interpolation failed: {0}")]
    Interpolation(String),

    #[error("unknown rule id: {0}")]
    UnknownRule(String),

    #[error("rule arity/class violation: {0}")]
    ArityViolation(String),

    #[error("ill-conditioned fit (condition number {0:.3e})")]
    IllConditioned(f64),
}

pub type Result<V> = std::result::Result<V, GeoError>;
