use thiserror::Error;

/// Errors raised by the rank correlation kernels, tests, samplers and readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A margin has no variation, so every correlation-type ratio is undefined.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// `row` is the 1-based data row (header excluded).
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("insufficient data: {available} complete pairs, need at least {required}")]
    InsufficientData { available: usize, required: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateSample(msg.into())
    }

    /// True for errors caused by the data rather than by the caller's arguments.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSample(_)
                | Error::Parse { .. }
                | Error::InsufficientData { .. }
                | Error::Io(_)
                | Error::Csv(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
