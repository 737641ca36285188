use thiserror::Error;

/// Errors produced across the toolkit.
///
/// The variants line up with the process exit codes used by the CLI:
/// domain problems map to 2, budget refusals to 3, failed verifications to 4.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },

    #[error("unsupported arity r = {0} (this operation requires r = 3)")]
    UnsupportedArity(u32),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("non-integral result: {0}")]
    NonIntegralResult(String),

    #[error("retries exhausted after {0} attempts")]
    RetriesExhausted(u64),

    #[error("invalid switching: {0}")]
    InvalidSwitching(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn check(msg: impl Into<String>) -> Self {
        Error::CheckFailed(msg.into())
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::UnsupportedArity(_)
            | Error::NonIntegralResult(_)
            | Error::InvalidSwitching(_)
            | Error::HypothesisViolated(_) => 2,
            Error::BudgetExceeded { .. } | Error::RetriesExhausted(_) => 3,
            Error::NumericalInstability(_) | Error::CheckFailed(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
