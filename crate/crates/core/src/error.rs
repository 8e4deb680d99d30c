use thiserror::Error;

/// Errors produced by the entanglement-potential toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{n} qubits exceeds the configured dimension limit of {max}")]
    DimensionLimit { n: u32, max: u32 },

    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: u32, right: u32 },

    #[error("numeric failure after {iterations} iterations (residuals {residuals:?})")]
    NumericFailure {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("empty histogram")]
    EmptyHistogram,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
