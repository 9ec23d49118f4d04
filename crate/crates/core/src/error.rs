use thiserror::Error;

/// Errors raised by the optimizer, problem definitions and metrics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller violated an operation's preconditions (mismatched lengths, empty input).
    #[error("usage error: {0}")]
    Usage(String),
    /// A parameter block or run configuration is out of range.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input data is malformed or non-finite.
    #[error("data error: {0}")]
    Data(String),
    /// A problem returned non-finite objective values.
    #[error("non-finite objective at generation {generation}, candidate {index}: {detail}")]
    NonFinite {
        generation: usize,
        index: usize,
        detail: String,
    },
    /// An internal invariant was broken.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
