//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameter or configuration validation failed.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The ODE integrator could not finish (step underflow, non-finite
    /// state, step budget exhausted, or a collapsed wavepacket width).
    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    /// Norm drift along a trajectory exceeded the configured guard.
    /// Signals integrator tolerances too loose for the requested run.
    #[error("unitarity violation: |norm - 1| = {residual:.3e} exceeds {tol:.3e} at tau = {tau:.6e}")]
    UnitarityViolation { residual: f64, tol: f64, tau: f64 },

    /// Adaptive quadrature could not reach the requested accuracy.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// r = eps_bar / h is undefined when h = 0.
    #[error("detuning ratio r = eps_bar/h is undefined for h = 0")]
    UndefinedRatio,

    /// Fewer usable data points than a fit requires.
    #[error("insufficient points for fit: need {needed}, have {got}")]
    InsufficientPoints { needed: usize, got: usize },

    /// The regressor has no variance (or the data admit no fit).
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// A sweep does not cross the requested threshold.
    #[error("no crossing found: {0}")]
    NoCrossing(String),
}
