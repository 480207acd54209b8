use thiserror::Error;

/// Errors raised by the estimation and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two von Mises factors cancel, leaving no defined mean direction.
    #[error("degenerate fusion: resultant length {resultant:e} below threshold")]
    DegenerateFusion { resultant: f64 },
    /// The agent estimate coincides with the landmark.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Every module concentration is zero, so a readout carries no information.
    #[error("no information: all phase concentrations are zero")]
    NoInformation,
    /// A linear-algebra step failed (singular innovation covariance etc).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Malformed or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
