use thiserror::Error;

/// Errors produced across the crate.
///
/// Validation errors (bad input, shape mismatches) are kept apart from
/// numeric failures so front ends can map them to different exit codes.
#[derive(Debug, Error)]
pub enum MgspError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("duplicate edge ({a},{i},{b},{j})")]
    DuplicateEdge { a: usize, i: usize, b: usize, j: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MgspError {
    /// True for failures of the numerical kernels rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, MgspError::Numeric(_))
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        MgspError::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, MgspError>;
