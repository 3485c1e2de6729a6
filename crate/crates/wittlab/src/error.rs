use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input that fails to parse under the descriptor/element grammar.
    #[error("parse error: {0}")]
    Parse(String),
    /// Structurally valid input that violates a precondition (zero
    /// coefficient, duplicate names, exceeded cap, wrong arity, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Well-formed input over a domain for which no decision procedure
    /// exists in this crate.
    #[error("unsupported domain: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: input problems exit 1, unsupported domains exit 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Invalid(_) => 1,
            Error::Unsupported(_) => 2,
        }
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
