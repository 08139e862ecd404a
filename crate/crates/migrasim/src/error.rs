use std::path::PathBuf;

use migrasim_core::engine::SimError;
use migrasim_core::ConfigError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed JSON or a field of the wrong shape.
    #[error("{0}")]
    ConfigParse(String),
    #[error(transparent)]
    ConfigInvalid(#[from] ConfigError),
    #[error("{0}")]
    Sweep(String),
    #[error("{path}:{line}: {message}")]
    EdgeList {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Sim(SimError),
    #[error("{failed} of {total} sweep cells failed; see the manifest")]
    SweepFailures { failed: usize, total: usize },
    #[error("{0}")]
    Usage(String),
}

impl From<SimError> for Error {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(c) => Error::ConfigInvalid(c),
            other => Error::Sim(other),
        }
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable code printed as `error[CODE]`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "E_IO",
            Error::ConfigParse(_) => "E_CONFIG_PARSE",
            Error::ConfigInvalid(_) => "E_CONFIG_INVALID",
            Error::Sweep(_) => "E_SWEEP_SPEC",
            Error::EdgeList { .. } => "E_GRAPH_FORMAT",
            Error::Sim(_) => "E_SIM",
            Error::SweepFailures { .. } => "E_SWEEP_PARTIAL",
            Error::Usage(_) => "E_USAGE",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 2,
            Error::ConfigParse(_) | Error::ConfigInvalid(_) | Error::Sweep(_) => 3,
            Error::EdgeList { .. } => 3,
            Error::Io { .. } => 4,
            Error::Sim(_) => 5,
            Error::SweepFailures { .. } => 6,
        }
    }

    /// `error[CODE]: message` on one line.
    pub fn diagnostic(&self) -> String {
        let text = self.to_string().replace(['\n', '\r'], " ");
        format!("error[{}]: {}", self.code(), text)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
