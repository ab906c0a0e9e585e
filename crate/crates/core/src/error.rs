use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is antipodal to the chart base")]
    AntipodalPoint,
    #[error("coincident points (chordal distance {0:e})")]
    CoincidentPoints(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value encountered: {0}")]
    NonFiniteValue(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("no start converged (best gradient norm {0:e})")]
    NonConvergence(f64),
    #[error("no interior maximum: {0}")]
    NoInteriorMax(String),
    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),
    #[error("Jacobian is singular (condition estimate {0:e})")]
    JacobianSingular(f64),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter(_) | Error::AntipodalPoint | Error::CoincidentPoints(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
