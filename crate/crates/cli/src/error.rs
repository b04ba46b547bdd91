use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] photomech_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for bad input, 3 for numeric or stability failures.
    pub fn exit_code(&self) -> i32 {
        use photomech_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(E::Config(_) | E::Domain(_)) => 2,
            CliError::Core(E::Unstable(_) | E::Numeric { .. }) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
