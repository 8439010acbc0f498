use thiserror::Error;

/// Errors produced by every layer of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("incompatible elements: {0}")]
    IncompatibleElements(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("missing parameter: {0}")]
    MissingParameter(String),

    #[error("schema error in {source_name}: {message}")]
    Schema { source_name: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
