use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid input: out-of-range index, mismatched shapes, bad parameter.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// An operation was invoked outside the regime where it is valid.
    #[error("protocol violation: {0}")]
    Protocol(String),
    /// Iterative solver failed to reach its tolerance.
    #[error("numerical failure: {message} (residual {residual:.3e})")]
    Numerical { message: String, residual: f64 },
    /// Input series unsuitable for a diagnostic (too short, nonpositive values).
    #[error("diagnostics error: {0}")]
    Diagnostics(String),
    /// The collapse analysis could not produce an estimate.
    #[error("analysis error: {0}")]
    Analysis(String),
    /// Requested system is larger than the representation supports.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
