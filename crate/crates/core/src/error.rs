use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the calculus, the decomposition engine and the experiments.
#[derive(Debug, Error)]
pub enum HodgeError {
    #[error("degree error: {0}")]
    Degree(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("exponent error: {0}")]
    Exponent(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("exponent {p} is at or below the critical exponent {critical}; pass the gate override to run anyway")]
    Gate { p: f64, critical: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HodgeError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HodgeError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HodgeError>;
