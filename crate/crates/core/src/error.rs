use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// A documented precondition was violated by the caller.
    #[error("contract violation: {what} (measured {measured:e})")]
    Contract { what: &'static str, measured: f64 },
    /// An iterative method did not reach its tolerance.
    #[error("numeric failure: {what} (best estimate {estimate:e})")]
    Numeric { what: &'static str, estimate: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
