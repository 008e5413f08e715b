use thiserror::Error;

/// Errors raised by the phase-space, shock and delta-shock routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("elasticity constant must be >= 0, got {0}")]
    NegativeK(f64),
    #[error("velocity jump is zero (u_L = u_R); the shock speed is undefined")]
    ZeroVelocityJump,
    #[error("Lax condition violated: need u < u_L, got u = {u}, u_L = {u_left}")]
    LaxViolation { u: f64, u_left: f64 },
    #[error("family S2 does not exist for the limiting system (k = 0)")]
    InvalidFamily,
    #[error("operation requires the limiting system (k = 0), got k = {0}")]
    RequiresLimitingSystem(f64),
    #[error("operation requires k > 0, got k = {0}")]
    RequiresPositiveK(f64),
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("datum is not admissible: {0}")]
    NonAdmissible(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("grid cannot resolve eps = {eps} within {budget} nodes")]
    Resolution { eps: f64, budget: usize },
    #[error("path evaluation returned a non-finite value at t = {0}")]
    PathNonFinite(f64),
    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}
