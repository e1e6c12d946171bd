use thiserror::Error;

/// Failures raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically singular (pivot {pivot:e} below tolerance {tolerance:e})")]
    SingularMatrix { pivot: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("predefined time exceeded: t = {t} with t_c = {t_c}")]
    PredefinedTimeExceeded { t: f64, t_c: f64 },

    #[error("adaptive feedback overflow: {value:e} exceeds {limit:e}")]
    Overflow { value: f64, limit: f64 },

    #[error("degenerate geometry: {0}")]
    GeometryDegenerate(String),

    #[error("trace is empty")]
    EmptyTrace,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
