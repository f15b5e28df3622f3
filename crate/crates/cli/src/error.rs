use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Failure classes with stable process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or input data (exit 2).
    #[error("{0}")]
    Config(String),
    /// The numerics hit a singularity or did not converge (exit 3).
    #[error("{0}")]
    Numerical(String),
    /// Reading or writing a file failed (exit 4).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Wraps a library error, prefixing the configuration path it came from.
    pub fn from_core_at(path: &str, e: railnoise_core::Error) -> Self {
        let msg = format!("{path}: {e}");
        Self::classify(e, msg)
    }

    fn classify(e: railnoise_core::Error, msg: String) -> Self {
        use railnoise_core::Error as E;
        match e {
            E::Io(_) => CliError::Io(msg),
            E::Fit(_) => CliError::Numerical(msg),
            e if e.is_numerical() => CliError::Numerical(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<railnoise_core::Error> for CliError {
    fn from(e: railnoise_core::Error) -> Self {
        let msg = e.to_string();
        Self::classify(e, msg)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
