use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("quadrature did not converge: achieved error estimate {achieved:.3e} (target {target:.3e})")]
    Quadrature { achieved: f64, target: f64 },

    #[error("domain too narrow: {0}")]
    DomainTooNarrow(String),

    #[error("Picard iteration stalled at t = {time}: residual {residual:.3e} after {iterations} iterations")]
    PicardDivergence {
        time: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("tail mass {tail_mass:.3e} at t = {time} exceeds budget {budget:.3e}; enlarge the half-width to at least {recommended_half_width:.1}")]
    TailBudget {
        time: f64,
        tail_mass: f64,
        budget: f64,
        recommended_half_width: f64,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
