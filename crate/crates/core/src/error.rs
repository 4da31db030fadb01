use thiserror::Error;

/// Errors returned by the distance, sampling and testing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DksError {
    #[error("point set is empty")]
    EmptyPointSet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("point {index} has {found} coordinates, expected {expected}")]
    RaggedPoint {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("point {index} has a non-finite coordinate on axis {axis}")]
    NonFinite { index: usize, axis: usize },

    #[error("rectangle lower corner exceeds upper corner on axis {axis}")]
    InvalidRect { axis: usize },

    #[error("map for axis {axis} is not strictly increasing on the data")]
    NonMonotoneMap { axis: usize },

    #[error("expected {expected} per-axis maps, found {found}")]
    MapCount { expected: usize, found: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension {dim} is not supported here (supported: {supported})")]
    UnsupportedDimension { dim: usize, supported: &'static str },

    #[error("need at least {min} points, found {found}")]
    TooFewPoints { min: usize, found: usize },

    #[error("input too large for {what}: {found} exceeds {max}")]
    TooLarge {
        what: &'static str,
        found: usize,
        max: usize,
    },

    #[error("two-sample test requires equal sample sizes, found {left} and {right}")]
    UnequalSampleSizes { left: usize, right: usize },

    #[error("infeasible construction: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, DksError>;
