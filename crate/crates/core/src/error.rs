use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("parse error at byte offset {offset}: {message}")]
    ParseAt { offset: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown information type label {0:?}")]
    UnknownLabel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported model bundle format_version {found} (this build reads {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("resource not found: {0}")]
    NotFound(String),

    #[error("GitHub rate limit exceeded; resets at unix time {reset}")]
    RateLimited { reset: i64 },

    #[error("HTTP {status} from {url}")]
    Http { status: u16, url: String },

    #[error("transport error: {0}")]
    Transport(String),

    #[error("undefined: {0}")]
    Undefined(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the input data rather than the environment.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::ParseAt { .. }
                | Error::Validation(_)
                | Error::UnknownLabel(_)
                | Error::InvalidInput(_)
                | Error::UnsupportedVersion { .. }
                | Error::Undefined(_)
        )
    }
}

/// Converts a serde_json error into a byte-offset parse error against `text`.
pub(crate) fn json_error_at(text: &str, err: &serde_json::Error) -> Error {
    let line = err.line();
    let column = err.column();
    let mut offset = 0usize;
    if line > 0 {
        for (i, l) in text.split_inclusive('\n').enumerate() {
            if i + 1 == line {
                offset += column.saturating_sub(1).min(l.len());
                break;
            }
            offset += l.len();
        }
    }
    Error::ParseAt {
        offset,
        message: err.to_string(),
    }
}
