use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("empty projection: {0}")]
    EmptyProjection(String),
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("action failure: {0}")]
    ActionFailure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
