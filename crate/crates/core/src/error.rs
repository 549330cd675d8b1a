use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The sampling period does not satisfy `ts * w < 1/2`.
    #[error("infeasible sampling rate: w*ts = {wts} must be strictly below 1/2")]
    InfeasibleRate { wts: f64 },

    #[error("chebyshev order {k} exceeds the supported maximum {max}")]
    OrderTooLarge { k: u64, max: u32 },

    #[error("predictor error bound {bound:e} is not below the decision limit {limit:e}")]
    BoundViolation { bound: f64, limit: f64 },

    #[error("history length {got} does not match filter length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// Samples needed for an operation are not present in the stream.
    #[error("{} sample indices unavailable ({}..={})", missing.len(), missing.first().unwrap_or(&0), missing.last().unwrap_or(&0))]
    OutOfRange { missing: Vec<i64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
