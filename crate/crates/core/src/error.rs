use thiserror::Error;

/// Errors produced by qtel-core operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QtelError {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("validation failed: {what} (deviation {deviation:.3e})")]
    Validation { what: String, deviation: f64 },

    #[error("precondition failed: {what} (deviation {deviation:.3e})")]
    Precondition { what: String, deviation: f64 },

    #[error("internal consistency check failed: {what} (deviation {deviation:.3e})")]
    Internal { what: String, deviation: f64 },

    #[error("resource bound exceeded: {0}")]
    Resource(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl QtelError {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        QtelError::Shape {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, QtelError>;
