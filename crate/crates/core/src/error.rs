use thiserror::Error;

/// Errors produced by network construction, evaluation and (de)serialization.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed network at {location}: {reason}")]
    Parse { location: String, reason: String },

    #[error("capacity exceeded: {limit} ({detail})")]
    Capacity { limit: &'static str, detail: String },

    #[error("adjacent gap |y[{index}] - y[{prev}]| = {gap} exceeds epsilon = {epsilon}", prev = .index - 1)]
    GapViolation {
        index: usize,
        gap: f64,
        epsilon: f64,
    },

    #[error(
        "sampler starvation: accepted {accepted} of {attempted} draws outside the trifling region"
    )]
    SamplerStarvation { accepted: usize, attempted: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
