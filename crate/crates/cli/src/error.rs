//! CLI error taxonomy. Exit codes: 0 success, 1 validation error,
//! 2 IO/file-format error.

use std::path::Path;

/// Structural problems in a binary data file.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}: bad magic")]
    BadMagic(String),
    #[error("{0}: bad header")]
    BadHeader(String),
    #[error("{path}: unsupported version {got} (expected {expected})")]
    VersionMismatch {
        path: String,
        expected: u32,
        got: u32,
    },
    #[error("{0}: truncated file")]
    TruncatedFile(String),
    #[error("{0}: implausible dimensions")]
    DimensionOverflow(String),
    #[error("{path}: {source}")]
    Image {
        path: String,
        source: image::ImageError,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Core(dscv_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: invalid JSON: {msg}")]
    Json { path: String, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Core(_) | CliError::Json { .. } => 1,
            CliError::Io { .. } | CliError::Format(_) => 2,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

impl From<dscv_core::Error> for CliError {
    fn from(e: dscv_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
