use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0:?}: exponents must be rationals >= 1 or `inf`")]
    InvalidExponent(String),

    #[error("invalid space: {0}")]
    InvalidSpec(String),

    #[error("parse error in {input:?} at position {position}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed tensor data: {0}")]
    Malformed(String),

    #[error("length mismatch: header declares {expected} entries, payload has {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line surface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceGuard(_) => 2,
            Error::Numerical(_) => 3,
            Error::Verification(_) => 4,
            _ => 1,
        }
    }
}
