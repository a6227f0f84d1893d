use thiserror::Error;

use crate::frontend::Span;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{span}: lex error: {message}")]
    Lex { span: Span, message: String },

    #[error("{span}: parse error: expected {expected}, found {found}")]
    Parse { span: Span, expected: String, found: String },

    #[error("{span}: unsupported construct: {construct}")]
    Unsupported { span: Span, construct: String },

    #[error("{span}: resolve error: {message}")]
    Resolve { span: Span, message: String },

    #[error("{span}: type error: {message}")]
    Type { span: Span, message: String },

    #[error("{span}: cannot lower: {message}")]
    Lower { span: Span, message: String },

    #[error("fixpoint iteration limit exceeded in `{function}` (block B{block} visited {visits} times)")]
    IterationLimitExceeded { function: String, block: usize, visits: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Source location of the error, if it has one.
    pub fn span(&self) -> Option<Span> {
        match self {
            Error::Lex { span, .. }
            | Error::Parse { span, .. }
            | Error::Unsupported { span, .. }
            | Error::Resolve { span, .. }
            | Error::Type { span, .. }
            | Error::Lower { span, .. } => Some(*span),
            Error::IterationLimitExceeded { .. } | Error::Config(_) => None,
        }
    }
}
