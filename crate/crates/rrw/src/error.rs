//! Crate-wide error type.

/// Errors raised by the numerical kernels.
///
/// Every failure names the violated contract so that callers (in particular
/// the CLI) can report which module gave up and why.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Construction-time parameter validation failed.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The evolution kernel lost probability mass beyond tolerance.
    /// This indicates a numerical fault, not a modelling choice: mass is
    /// monitored, never renormalized.
    #[error("chain: mass conservation violated at step {step}: |sum - 1| = {drift:e}")]
    MassConservation { step: u64, drift: f64 },

    /// Overflow/underflow produced a non-finite probability.
    #[error("chain: non-finite probability at step {step}")]
    NonFinite { step: u64 },

    /// Bessel functions of the first kind are only evaluated on x >= 0.
    #[error("specfun: negative argument {x} for J_nu")]
    NegativeArgument { x: f64 },

    /// Newton + bisection both failed to pin down a Bessel zero.
    #[error("specfun: zero search failed for order {nu} at index {index}")]
    ZeroSearch { nu: f64, index: usize },

    /// Adaptive quadrature hit its depth limit before reaching tolerance.
    #[error("specfun: quadrature did not converge on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },

    /// A truncated eigenseries could not meet the requested tolerance.
    #[error("continuum: truncation estimate {estimate:e} exceeds tolerance {tolerance:e} (more terms needed)")]
    Truncation { estimate: f64, tolerance: f64 },

    /// Tail-slope estimation had too little usable data or no decaying tail.
    #[error("qstats: tail estimation failed: {0}")]
    TailEstimation(String),

    /// The one-parameter fit did not converge.
    #[error("qstats: fit did not converge: {0}")]
    FitNonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
