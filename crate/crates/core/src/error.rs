use thiserror::Error;

/// Errors raised by the model and its solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameter record is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// The linearized dynamics are not asymptotically stable, so no
    /// steady state exists.
    #[error("unstable system: {0}")]
    Unstable(String),

    /// A numerical routine failed to converge or produced an unphysical value.
    #[error("numeric error: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },
}

impl Error {
    pub(crate) fn numeric(message: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            message: message.into(),
            residual,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
