use thiserror::Error;

/// Errors raised by the rate, congestion and optimization routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A log-det argument or a matrix that must be inverted is not positive definite.
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no strictly feasible starting point: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Error::Io(e.to_string())
        } else {
            Error::Config(e.to_string())
        }
    }
}
