//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition (bad grid, negative
    /// frequency, non-monotone list, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input breaks a standing hypothesis of the analysis (zero cubic
    /// stiffness, vanishing fundamental Fourier coefficients, ...).
    #[error("hypothesis violated: {0}")]
    DegenerateHypothesis(String),

    /// The adaptive integrator could not shrink the step any further.
    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// A state component exceeded the blow-up guard during integration.
    #[error("solution exceeded blow-up guard {guard} at t = {t}")]
    BlowUp { t: f64, guard: f64 },

    /// The integrator hit its step budget before reaching the end time.
    #[error("integration exceeded {max_steps} steps at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },

    /// Newton iteration stopped without reaching the requested tolerance.
    /// Carries the best iterate seen so far.
    #[error("no convergence after {iterations} iterations: residual {residual} at ({x}, {y})")]
    NoConvergence {
        x: f64,
        y: f64,
        residual: f64,
        iterations: usize,
    },

    /// A linear solve met an exactly singular system that regularization
    /// could not rescue.
    #[error("singular system in Newton solve")]
    SingularSystem,

    /// Bisection bracket does not straddle (or touch) the target level.
    #[error("no sign change in bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// Monodromy determinant drifted too far from 1 to trust a verdict.
    #[error("monodromy determinant {det} deviates from 1 beyond {limit}")]
    IntegrationQuality { det: f64, limit: f64 },
}

impl Error {
    /// Best iterate carried by a `NoConvergence` error, if any.
    pub fn best_iterate(&self) -> Option<(f64, f64, f64)> {
        match self {
            Error::NoConvergence { x, y, residual, .. } => Some((*x, *y, *residual)),
            _ => None,
        }
    }
}
