//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Vector or image shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The requested operation is not available for this operator kind.
    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),

    /// A numerical routine failed (non-finite values, factorization failure).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Configuration file could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for the CLI: 2 for configuration problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            _ => 2,
        }
    }
}
