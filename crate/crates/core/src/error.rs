use std::fmt;

use thiserror::Error;

/// A 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Position, message: String },

    #[error("empty formula")]
    EmptyFormula,

    #[error("empty timeline")]
    EmptyTimeline,

    #[error("formula is not ground: {0}")]
    NotGround(String),

    #[error("formula already contains variables: {0}")]
    AlreadyLifted(String),

    #[error("formula contains negated literals: {0}")]
    NegationUnsupported(String),

    #[error("model `{model}`: {message}")]
    Model { model: String, message: String },

    #[error("atom `{atom}` of model `{model}` is missing from the vocabulary")]
    VocabularyMismatch { model: String, atom: String },

    #[error("object correspondence error: {0}")]
    Correspondence(String),

    #[error("labels error: {0}")]
    Labels(String),

    #[error("{0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            pos: Position { line, column },
            message: message.into(),
        }
    }

    pub(crate) fn model(model: &str, message: impl Into<String>) -> Self {
        Error::Model {
            model: model.to_string(),
            message: message.into(),
        }
    }

    /// True for errors caused by malformed input text.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::EmptyFormula | Error::EmptyTimeline
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
