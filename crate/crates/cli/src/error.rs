use thiserror::Error;

/// CLI failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 3,
            CliError::Capacity(_) => 4,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<critquench::Error> for CliError {
    fn from(e: critquench::Error) -> Self {
        use critquench::Error as E;
        match e {
            E::Argument(_) | E::Protocol(_) => CliError::Config(e.to_string()),
            E::Capacity(_) => CliError::Capacity(e.to_string()),
            E::Numerical { .. } | E::Diagnostics(_) | E::Analysis(_) => CliError::Numerical(e.to_string()),
        }
    }
}
