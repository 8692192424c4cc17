use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("split strategy `{0}` is not supported for this weight")]
    UnsupportedStrategy(&'static str),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("trajectory reaches the reference point at t = {t} (distance {distance:e})")]
    TrajectoryHitsReference { t: f64, distance: f64 },

    #[error("outer radius search exceeded R_max = {r_max} (last sampled max rotation {max_rot})")]
    RadiusSearchFailure { r_max: f64, max_rot: f64 },

    #[error("g s - n̄ F0(s) has no sign change on ]a, 1[ for n̄ = {nbar}")]
    NoEquilibrium { nbar: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("invalid energy level c = {c} (admissible range ]{lower}, {upper}])")]
    InvalidLevel { c: f64, lower: f64, upper: f64 },

    #[error("quadrature did not converge (estimate {estimate}, last change {change:e})")]
    QuadratureNonConvergence { estimate: f64, change: f64 },

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidParameter { .. }
                | Error::InvalidWeight(_)
                | Error::InvalidNonlinearity(_)
                | Error::UnsupportedStrategy(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
