//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GistError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("failed to decode {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("failed to encode {path}: {reason}")]
    Encode { path: PathBuf, reason: String },

    /// Bad caller-supplied configuration: weights, labels, flag combinations.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Shape constraint violated (divisibility, mismatched dims, bad rect).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A masked statistic was requested over zero pixels.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    /// Non-finite data where finite values are required.
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, GistError>;

impl GistError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GistError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn decode(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        GistError::Decode {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn encode(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        GistError::Encode {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
