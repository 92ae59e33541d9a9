use std::path::PathBuf;

/// Errors raised by the numerical modules and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time {time} is not on the path grid (horizon {horizon}, {n_steps} steps)")]
    OffGrid { time: f64, horizon: f64, n_steps: usize },

    #[error("non-finite state after path step {step}: {detail}")]
    NonFinite { step: usize, detail: String },

    #[error("entropy production below tolerance: {count} cells, worst {worst:e} (tolerance {tolerance:e})")]
    NegativeEntropyProduction { count: usize, worst: f64, tolerance: f64 },

    #[error("coverage violation: {0}")]
    Coverage(String),

    #[error("config error in [{section}] `{key}`: {reason}")]
    Config { section: String, key: String, reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn config(section: &str, key: &str, reason: impl Into<String>) -> Self {
        Error::Config { section: section.to_string(), key: key.to_string(), reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
