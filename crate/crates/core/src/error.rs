use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("derived masks require a smooth filter, got {0}")]
    SharpFilterMask(&'static str),

    #[error("samples do not form an exact {size}-point equispaced grid: {reason}")]
    GridMismatch { size: usize, reason: String },

    #[error("quadrature weights are required for this operation")]
    MissingWeights,

    #[error("empty data set")]
    EmptyData,

    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degree {degree} exceeds the basis maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("argument {0} lies outside [-1, 1]")]
    OutOfDomain(f64),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("quadrature construction failed: {0}")]
    QuadratureFailure(String),

    #[error("least squares system is rank deficient: {0}")]
    RankDeficient(String),

    #[error("point is outside the estimated data support (denominator {0:e})")]
    OutOfSupport(f64),

    #[error("2*gamma+1 = {0} is an even integer")]
    EvenExponent(f64),

    #[error("mask coefficient for degree {degree} vanishes ({value:e})")]
    VanishingMask { degree: usize, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
