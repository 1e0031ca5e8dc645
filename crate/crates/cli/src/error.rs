use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// A checked property failed (bound violation, non-zero entry, ...).
    pub const VIOLATION: u8 = 1;
    /// The requested accuracy could not be reached.
    pub const ACCURACY: u8 = 2;
    pub const IO: u8 = 3;
    /// Bad flags, config entries or out-of-domain input.
    pub const USAGE: u8 = 64;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] etaorbit::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[source] std::io::Error),
    #[error("{}:{line}: {msg}", path.display())]
    Config {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use etaorbit::Error as E;
        match self {
            CliError::Core(
                E::AccuracyUnreachable { .. } | E::NonFinite(_) | E::WindowExhausted { .. },
            ) => exit::ACCURACY,
            CliError::Core(_)
            | CliError::Config { .. }
            | CliError::Usage(_)
            | CliError::Pool(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Output(_) | CliError::Json(_) => exit::IO,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
