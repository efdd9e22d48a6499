use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZolError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("no expansion exists at reduct level {level}; the measure is undefined for this class")]
    NoExpansion { level: usize },
}

impl ZolError {
    pub fn validation(msg: impl Into<String>) -> Self {
        ZolError::Validation(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        ZolError::Precondition(msg.into())
    }

    pub fn budget(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        ZolError::Budget {
            what: what.into(),
            needed,
            limit,
        }
    }
}

pub type Result<T> = std::result::Result<T, ZolError>;
