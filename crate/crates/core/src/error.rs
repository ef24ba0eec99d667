use thiserror::Error;

use crate::space::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    Validation(ValidationReport),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("field has {got} values but the space has {expected} points")]
    FieldLength { expected: usize, got: usize },

    #[error("field must be nonnegative (value {value} at index {index})")]
    NegativeField { index: usize, value: f64 },

    #[error("empty side: intermediate sets need nonempty A and B")]
    EmptySide,

    #[error("exponent p = {p} is below -1/N = {bound}")]
    ExponentDomain { p: f64, bound: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exhaustive search over {n} points refused (limit {limit}); use sampled mode")]
    TooLargeForExhaustive { n: usize, limit: usize },

    #[error("size guard exceeded: {size} points requested, limit {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("space fails PL({k_lo}): minimal defect {defect}")]
    FailsAtLowerBound { k_lo: f64, defect: f64 },

    #[error("zero-measure ball at the smallest radius {radius}")]
    ZeroMeasureBall { radius: f64 },

    #[error("marginals mismatch: {0}")]
    Marginal(String),

    #[error("entropy undefined: the field integrates to zero")]
    ZeroMass,
}
