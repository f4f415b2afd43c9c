use thiserror::Error;

/// Errors raised by the geometric constructions and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("box contains the origin; argument enclosure is undefined")]
    BoxContainsOrigin,
    #[error("zero vector has no argument")]
    ZeroVector,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("sector index {0} is outside the index set")]
    IndexOutOfRange(i64),
    #[error("operation not defined for slab variant {0}")]
    WrongVariant(&'static str),
    #[error("slab parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("argument {value} outside domain [{lo}, {hi}]")]
    DomainError { value: f64, lo: f64, hi: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("sample size must be at least 1")]
    InvalidSample,
    #[error("epsilon {0} must lie in (0, 1/2)")]
    InvalidEpsilon(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
