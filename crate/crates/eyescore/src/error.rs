//! Errors of the std layer and their mapping to CLI exit codes.

use std::path::{Path, PathBuf};

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Usage = 2,
    Data = 3,
    Internal = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(PathBuf),
    #[error("malformed annotation in {path}: {reason}")]
    MalformedAnnotation { path: PathBuf, reason: String },
    #[error("empty dataset: {0}")]
    EmptyDataset(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("{0}")]
    Core(#[from] eyescore_core::Error),
    #[error("internal: {0}")]
    Internal(String),
}

impl AppError {
    pub fn unreadable(path: &Path, e: impl std::fmt::Display) -> Self {
        AppError::UnreadableFile { path: path.to_path_buf(), reason: e.to_string() }
    }

    pub fn malformed(path: &Path, reason: impl Into<String>) -> Self {
        AppError::MalformedAnnotation { path: path.to_path_buf(), reason: reason.into() }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        AppError::Io { path: path.to_path_buf(), reason: e.to_string() }
    }

    /// Stable machine-readable code printed as `error: CODE: message`.
    pub fn code(&self) -> &'static str {
        match self {
            AppError::Usage(_) => "usage",
            AppError::UnreadableFile { .. } => "unreadable-file",
            AppError::UnsupportedFormat(_) => "unsupported-format",
            AppError::MalformedAnnotation { .. } => "malformed-annotation",
            AppError::EmptyDataset(_) => "empty-dataset",
            AppError::Config(_) => "config",
            AppError::Io { .. } => "io",
            AppError::Core(e) => match e {
                eyescore_core::Error::RadiusTooSmall(_) => "radius-too-small",
                eyescore_core::Error::EmptyDataset => "empty-dataset",
                eyescore_core::Error::MalformedAnnotation => "malformed-annotation",
                _ => "data",
            },
            AppError::Internal(_) => "internal",
        }
    }

    pub fn exit_class(&self) -> ExitClass {
        match self {
            AppError::Usage(_) | AppError::Config(_) => ExitClass::Usage,
            AppError::Internal(_) => ExitClass::Internal,
            AppError::Core(eyescore_core::Error::RadiusTooSmall(_)) => ExitClass::Usage,
            _ => ExitClass::Data,
        }
    }

    /// Single line, no embedded newlines.
    pub fn render(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error: {}: {}", self.code(), msg.trim())
    }
}

pub type AppResult<T> = Result<T, AppError>;
