use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent must satisfy 1 < p < inf, got {0}")]
    InvalidExponent(f64),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("invalid vector entries: {0}")]
    InvalidEntries(String),
    #[error("invalid measure space: {0}")]
    InvalidMeasureSpace(String),
    #[error("step function lives on a different measure space")]
    SpaceMismatch,
    #[error("base vector must be nonzero")]
    ZeroBase,
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("direction is not tangent to the base (relative pairing {0:e})")]
    NotTangent(f64),
    #[error("point is not on the boundary (norm {norm}, radius {radius})")]
    OffBoundary { norm: f64, radius: f64 },
    #[error("point does not belong to the target")]
    NotInTarget,
    #[error("target does not support this operation: {0}")]
    UnsupportedTarget(&'static str),
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finder stopped after {iterations} iterations with residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("dimension {dim} exceeds the oracle cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid step schedule: {0}")]
    InvalidSchedule(String),
    #[error("witness precondition failed: {0}")]
    WitnessPrecondition(String),
}
