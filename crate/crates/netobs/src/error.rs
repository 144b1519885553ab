use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure categories shared by every module.
///
/// The CLI maps these onto process exit codes: `InvalidInput`, `Undefined`
/// and `Io` are input-data failures (exit 3), `Budget` is a resource-guard
/// failure (exit 4).
#[derive(Debug, Error)]
pub enum Error {
    /// An argument or file record lies outside the documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested quantity is mathematically undefined for this instance
    /// (e.g. an average over an empty set).
    #[error("undefined value: {0}")]
    Undefined(String),

    /// A guarded computation would exceed its enumeration budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
}
