//! Numerical toolkit for the forced Mathieu-Duffing oscillator
//!
//! ```text
//! x'' + (omega_n^2 + eps*cos(omega_p*t)) x + eps*alpha*x^3 = eps*f(t)
//! ```
//!
//! with a truncated zero-mean Fourier forcing `f`. The crate covers, and
//! cross-validates by independent numerical routes:
//!
//! - the averaged bifurcation function of the resonant system, its
//!   closed-form zeros, and the nondegeneracy certificate ([`averaging`]);
//! - two-timing slow flows: the resonant amplitude/phase system and the
//!   first-tongue detuned system with its equilibrium census and pitchfork
//!   structure ([`two_timing`]);
//! - Floquet stability of the linear Mathieu equation, Ince-Strutt chart
//!   sweeps, and numeric tongue-boundary location ([`floquet`]);
//! - refinement of the averaging prediction into a true periodic orbit by
//!   shooting, with convergence measurements as the perturbation vanishes
//!   ([`orbit`]).
//!
//! Everything is built on the plain vector fields and integrators in
//! [`ode`]. See the `examples/` directory for one runnable program per
//! capability, and the `mathieu-duffing` binary for file-oriented runs.

// `!(x > 0.0)`-style guards are used on purpose: they reject NaN inputs,
// which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod cli;
pub mod error;
pub mod floquet;
pub mod ode;
pub mod orbit;
pub mod two_timing;

pub use error::Error;
pub use ode::{ForcingSeries, Mat2, ModelParams, State};
