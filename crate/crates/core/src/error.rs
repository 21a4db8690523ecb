use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The configuration file could not be parsed.
    #[error("config: {0}")]
    Config(String),

    /// `d psi / d rho <= 0` somewhere on the branch that has to be inverted.
    /// Usually means `r` is too large for the curve parameters.
    #[error(
        "monotonicity violated: d(psi)/d(rho) / rho = {dpsi_over_rho:e} <= 0 at xi = {xi}, rho = {rho}, theta = {theta} (r = {r} too large for these curve parameters)"
    )]
    MonotonicityViolated {
        xi: f64,
        rho: f64,
        theta: f64,
        dpsi_over_rho: f64,
        r: f64,
    },

    /// Newton and the bisection fallback both failed to invert `psi = v^2`.
    #[error("no convergence solving psi = v^2 at xi = {xi}, theta = {theta}, v = {v} ({reason})")]
    NoConvergence {
        xi: f64,
        theta: f64,
        v: f64,
        reason: &'static str,
    },

    /// Refining an integration grid changed the result by more than the tolerance.
    #[error("grid unresolved: {what} changed from {coarse:e} to {fine:e} under refinement (tol {tol:e})")]
    GridUnresolved {
        what: &'static str,
        coarse: f64,
        fine: f64,
        tol: f64,
    },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
