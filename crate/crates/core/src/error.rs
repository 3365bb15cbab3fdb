use std::path::PathBuf;

use thiserror::Error;

use crate::relation::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The relation table is not rectangular or not square.
    #[error("malformed relation: {0}")]
    Shape(String),

    #[error("invalid relation: {}", summarize(.0))]
    Invalid(ValidationReport),

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("k = {k} is outside 1..={n}")]
    ScaleOutOfRange { k: usize, n: usize },

    #[error("{0}")]
    Domain(String),

    #[error("image {0:?} has an empty foreground")]
    EmptyImage(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for parse and I/O failures, as opposed to domain errors on
    /// well-formed input.
    pub fn is_io_or_parse(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Parse { .. } | Error::Shape(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

fn summarize(report: &ValidationReport) -> String {
    match report.violations.first() {
        Some(v) if report.violations.len() == 1 => v.to_string(),
        Some(v) => format!("{v} (and {} more)", report.violations.len() - 1),
        None => "no violations".into(),
    }
}
