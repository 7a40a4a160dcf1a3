use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("direction is not unit norm (|norm - 1| = {deviation:.3e})")]
    NonUnitDirection { deviation: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("covariance is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid order p = {0} (need p >= 1)")]
    InvalidOrder(f64),

    #[error("weights do not sum to one (sum = {0})")]
    NotNormalized(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("fundamental system for degree {degree} failed to reach full rank (condition estimate {condition:.3e})")]
    FundamentalSystem { degree: usize, condition: f64 },

    #[error("least-squares problem is ill-posed: {0}")]
    IllPosed(String),

    #[error("degenerate point in low-discrepancy map at index {0}")]
    DegeneratePoint(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("missing ground truth: {0}")]
    MissingGroundTruth(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
