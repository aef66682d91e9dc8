use std::io;

use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two families that the CLI maps onto exit codes:
/// input problems (`Parse`, `Io`) and contract violations (everything else).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("edge list is empty")]
    EmptyEdges,

    #[error("cycle detected through edge {parent} -> {child}")]
    Cycle { parent: String, child: String },

    #[error("unknown synset `{0}`")]
    UnknownSynset(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),
}

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_owned(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }

    /// True when the error stems from unreadable or malformed input rather than
    /// from a violated precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Format(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
