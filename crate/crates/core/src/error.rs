use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescentError {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point {0} is in the support of the function")]
    InSupport(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("element is not rational over the base field: {0}")]
    NotRational(String),
    #[error("linear algebra failure: {0}")]
    Linear(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("retry budget exhausted: {0}")]
    RetryExhausted(String),
    #[error("algebra is not split or not central simple: {0}")]
    NotSplit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, DescentError>;

pub(crate) fn verify(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(DescentError::Verification(what()))
    }
}
