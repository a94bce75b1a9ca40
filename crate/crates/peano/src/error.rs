use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown fractal `{0}` (expected one of sg, pg, og, mc, torus, triangle)")]
    UnknownFractal(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("level {level} below base level {base} for {fractal}")]
    BelowBase { fractal: &'static str, level: u32, base: u32 },

    #[error("level {level} exceeds the cap of {cap} for {fractal}")]
    LevelCap { fractal: &'static str, level: u32, cap: u32 },

    #[error("matrix dimension {dim} needs an explicit eigenvalue count above {limit}")]
    DimensionCap { dim: usize, limit: usize },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("operation not supported for {fractal}: {what}")]
    Unsupported { fractal: &'static str, what: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("serialization: {0}")]
    Format(String),
}

impl Error {
    /// Process exit code: 2 usage, 3 numerical, 4 resource cap, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownFractal(_) | Error::Invalid(_) | Error::BelowBase { .. } => 2,
            Error::Unsupported { .. } => 2,
            Error::Numerical(_) => 3,
            Error::LevelCap { .. } | Error::DimensionCap { .. } => 4,
            Error::Structure(_) | Error::Io { .. } | Error::Format(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
