use thiserror::Error;

use crate::dynamics::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters or arguments violate a documented invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A point was evaluated outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two computations that must agree did not. Indicates a bug, not bad data.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    /// The adaptive integrator could not make progress.
    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        t: f64,
        reason: String,
        partial: Box<Trajectory>,
    },

    /// Adaptive quadrature hit its subdivision limit.
    #[error("quadrature did not converge (estimate {estimate}, error bound {error_bound})")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// The shooting solution grazes the threshold and the switching point is ill-defined.
    #[error("degenerate event: {0}")]
    DegenerateEvent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::InternalConsistency(msg.into())
    }

    /// True for errors caused by the caller's input rather than by the solver.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Domain(_))
    }
}
