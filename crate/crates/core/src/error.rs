use thiserror::Error;

use crate::window::IndexWindow;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input text (symbol, matrix dump, expression).
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("duplicate degree {0}")]
    DuplicateDegree(i64),

    /// An operator was asked to act on a window outside its side of the space.
    #[error("{operator} cannot act on window {window}: {reason}")]
    Domain {
        operator: String,
        window: IndexWindow,
        reason: String,
    },

    #[error("window mismatch: {0}")]
    WindowMismatch(String),

    /// The requested product would silently drop terms of the infinite sum.
    #[error("exactness lost: {0}")]
    ExactnessLoss(String),

    #[error("index {index} outside window {window}")]
    OutOfWindow { index: i64, window: IndexWindow },

    #[error("unresolved symbol `{0}`")]
    UnresolvedSymbol(String),

    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            column,
            message: message.into(),
        }
    }

    /// True for errors that stem from window bookkeeping rather than input syntax.
    pub fn is_window_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::WindowMismatch(_)
                | Error::ExactnessLoss(_)
                | Error::OutOfWindow { .. }
                | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
