//! Multiple-scales slow flows: the resonant amplitude/phase system and the
//! detuned first-tongue system.
//!
//! Writing the solution as `A(T1) cos(w T0 + psi(T1))` with fast time
//! `T0 = t` and slow time `T1 = eps*t`, eliminating secular terms at first
//! order yields planar ODEs for `(A, psi)`. Two cases are covered:
//!
//! - **Resonant** (`omega_n = omega_p = w`): the slow flow driven by the
//!   fundamental forcing pair `(a1, b1)` and the cubic term. Its equilibrium
//!   reproduces the averaged-function zero and the zeroth-order periodic
//!   solution `x0* cos(wt) + (y0*/w) sin(wt)`.
//! - **First tongue** (`omega_n^2 = omega_p^2/4 + eps*omega_1`): the
//!   detuned slow flow whose equilibria encode the pitchfork structure
//!   around the first instability tongue. In the Cartesian variables
//!   `M = A cos psi`, `N = -A sin psi` the origin is a genuine equilibrium
//!   and the census over the detuning `omega_1` has one, three, or five
//!   points.
//!
//! The tongue Jacobian is trace-free, so every nondegenerate equilibrium is
//! a center (`det > 0`) or a saddle (`det < 0`).

use std::f64::consts::TAU;

use crate::error::Error;
use crate::ode::{reduced_angle, Mat2};

/// Boundary of the degenerate-detuning guard around `|omega_1| = 1/2`.
pub const BOUNDARY_GUARD: f64 = 1e-9;

/// Amplitude/phase point of a slow flow. Amplitude is kept nonnegative and
/// the phase is reported in `[0, 2*pi)`; sign flips are absorbed into the
/// phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowState {
    pub amplitude: f64,
    pub phase: f64,
}

impl SlowState {
    pub fn new(amplitude: f64, phase: f64) -> Self {
        let (amplitude, phase) = if amplitude < 0.0 {
            (-amplitude, phase + std::f64::consts::PI)
        } else {
            (amplitude, phase)
        };
        Self {
            amplitude,
            phase: phase.rem_euclid(TAU),
        }
    }

    /// Cartesian chart `M = A cos psi`, `N = -A sin psi`.
    pub fn to_cartesian(self) -> CartesianSlowState {
        CartesianSlowState {
            m: self.amplitude * self.phase.cos(),
            n: -self.amplitude * self.phase.sin(),
        }
    }
}

/// Cartesian slow-flow point `(M, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartesianSlowState {
    pub m: f64,
    pub n: f64,
}

impl CartesianSlowState {
    pub fn new(m: f64, n: f64) -> Self {
        Self { m, n }
    }

    pub fn norm(&self) -> f64 {
        self.m.hypot(self.n)
    }

    pub fn to_polar(self) -> SlowState {
        SlowState::new(self.norm(), (-self.n).atan2(self.m))
    }
}

/// Parameters of the first-tongue slow flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TongueParams {
    /// Parametric frequency (> 0).
    pub omega_p: f64,
    /// Detuning: coefficient of eps in `omega_n^2 = omega_p^2/4 + eps*omega_1`.
    pub omega_1: f64,
    /// Cubic stiffness (!= 0).
    pub alpha: f64,
    /// Perturbation size.
    pub epsilon: f64,
}

impl TongueParams {
    pub fn new(omega_p: f64, omega_1: f64, alpha: f64, epsilon: f64) -> Result<Self, Error> {
        if !(omega_p > 0.0) || !omega_p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega_p must be positive and finite, got {omega_p}"
            )));
        }
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::DegenerateHypothesis(
                "cubic stiffness alpha must be nonzero".into(),
            ));
        }
        if !omega_1.is_finite() || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(
                "omega_1 and epsilon must be finite".into(),
            ));
        }
        Ok(Self {
            omega_p,
            omega_1,
            alpha,
            epsilon,
        })
    }

    /// `omega_n^2` this detuning corresponds to at the stored `epsilon`.
    pub fn natural_frequency_squared(&self) -> f64 {
        self.omega_p * self.omega_p / 4.0 + self.epsilon * self.omega_1
    }
}

// ---------------------------------------------------------------------------
// Resonant slow flow
// ---------------------------------------------------------------------------

/// Resonant slow flow:
///
/// ```text
/// dA/dT1   = -(a1 sin psi + b1 cos psi) / (2 w)
/// dpsi/dT1 = (3 alpha A^3 / 4 - a1 cos psi + b1 sin psi) / (2 w A)
/// ```
///
/// The phase equation divides by `A`, so `A = 0` is rejected.
pub fn resonant_slow_rhs(
    omega: f64,
    alpha: f64,
    a1: f64,
    b1: f64,
    s: &SlowState,
) -> Result<(f64, f64), Error> {
    if s.amplitude == 0.0 {
        return Err(Error::InvalidParameter(
            "resonant slow flow needs amplitude > 0 for the phase equation".into(),
        ));
    }
    let (sin_psi, cos_psi) = s.phase.sin_cos();
    let da = -(a1 * sin_psi + b1 * cos_psi) / (2.0 * omega);
    let a = s.amplitude;
    let dpsi =
        (3.0 * alpha * a * a * a / 4.0 - a1 * cos_psi + b1 * sin_psi) / (2.0 * omega * a);
    Ok((da, dpsi))
}

/// Equilibrium of the resonant slow flow with its state-space counterpart.
///
/// `x0_star` is the cosine coefficient of the zeroth-order solution;
/// `y0_star` is the initial velocity (the sine coefficient times `omega`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantEquilibrium {
    pub amplitude: f64,
    pub phase: f64,
    pub x0_star: f64,
    pub y0_star: f64,
    pub omega: f64,
}

/// Equilibrium `(A0, psi0)` of the resonant slow flow:
///
/// ```text
/// A0 = (16 (a1^2 + b1^2) / (9 alpha^2))^(1/6)
/// cos psi0 = sign(alpha) a1 / sqrt(a1^2 + b1^2)
/// sin psi0 = -sign(alpha) b1 / sqrt(a1^2 + b1^2)
/// ```
///
/// This follows the amplitude identity `a1^2 + b1^2 = 9 alpha^2 A0^6 / 16`,
/// a float path independent of the cube-root form used by
/// [`crate::averaging::predicted_zero`]; the two agree to machine precision.
pub fn resonant_equilibrium(
    omega: f64,
    alpha: f64,
    a1: f64,
    b1: f64,
) -> Result<ResonantEquilibrium, Error> {
    if alpha == 0.0 {
        return Err(Error::DegenerateHypothesis(
            "cubic stiffness alpha must be nonzero".into(),
        ));
    }
    if a1 == 0.0 && b1 == 0.0 {
        return Err(Error::DegenerateHypothesis(
            "fundamental Fourier pair (a1, b1) must not vanish".into(),
        ));
    }
    let sum = a1 * a1 + b1 * b1;
    let amplitude = (16.0 * sum / (9.0 * alpha * alpha)).powf(1.0 / 6.0);
    let norm = sum.sqrt();
    let sign = alpha.signum();
    let cos_psi = sign * a1 / norm;
    let sin_psi = -sign * b1 / norm;
    let phase = sin_psi.atan2(cos_psi).rem_euclid(TAU);
    let x0_star = amplitude * cos_psi;
    // Position-solution sine coefficient is -A0 sin psi0; the state-space
    // velocity carries an extra factor omega.
    let y0_star = omega * (-amplitude * sin_psi);
    Ok(ResonantEquilibrium {
        amplitude,
        phase,
        x0_star,
        y0_star,
        omega,
    })
}

/// Zeroth-order periodic solution
/// `x0* cos(wt) + (y0*/w) sin(wt)` carried by a resonant equilibrium.
pub fn zeroth_order_solution(eq: &ResonantEquilibrium, omega: f64, t: f64) -> f64 {
    let (s, c) = reduced_angle(omega, t).sin_cos();
    eq.x0_star * c + eq.y0_star / omega * s
}

// ---------------------------------------------------------------------------
// First-tongue slow flow
// ---------------------------------------------------------------------------

/// Polar first-tongue slow flow:
///
/// ```text
/// dA/dT1   = A sin(2 psi) / (2 omega_p)
/// dpsi/dT1 = (omega_1 + (3/4) alpha A^2 + (1/2) cos(2 psi)) / omega_p
/// ```
///
/// No division by `A`; the axis `A = 0` is invariant.
pub fn tongue_slow_rhs_polar(tp: &TongueParams, s: &SlowState) -> (f64, f64) {
    let a = s.amplitude;
    let (s2, c2) = (2.0 * s.phase).sin_cos();
    (
        a * s2 / (2.0 * tp.omega_p),
        (tp.omega_1 + 0.75 * tp.alpha * a * a + 0.5 * c2) / tp.omega_p,
    )
}

/// Cartesian first-tongue slow flow:
///
/// ```text
/// M' = [ omega_1 N - N/2 + (3 alpha N / 4)(M^2 + N^2)] / omega_p
/// N' = [-omega_1 M - M/2 - (3 alpha M / 4)(M^2 + N^2)] / omega_p
/// ```
pub fn tongue_slow_rhs_cartesian(tp: &TongueParams, c: &CartesianSlowState) -> (f64, f64) {
    let r2 = c.m * c.m + c.n * c.n;
    (
        (tp.omega_1 * c.n - 0.5 * c.n + 0.75 * tp.alpha * c.n * r2) / tp.omega_p,
        (-tp.omega_1 * c.m - 0.5 * c.m - 0.75 * tp.alpha * c.m * r2) / tp.omega_p,
    )
}

/// Jacobian of the Cartesian slow flow at `(M, N)`:
///
/// ```text
/// [  3 alpha M N / (2 wp)                (omega_1 - 1/2 + (3/4) alpha (M^2 + 3 N^2)) / wp ]
/// [ (-omega_1 - 1/2 - (3/4) alpha (3 M^2 + N^2)) / wp   -3 alpha M N / (2 wp)             ]
/// ```
///
/// The trace vanishes identically.
pub fn tongue_jacobian(tp: &TongueParams, c: &CartesianSlowState) -> Mat2 {
    let diag = 3.0 * tp.alpha * c.m * c.n / (2.0 * tp.omega_p);
    Mat2::new(
        diag,
        (tp.omega_1 - 0.5 + 0.75 * tp.alpha * (c.m * c.m + 3.0 * c.n * c.n)) / tp.omega_p,
        (-tp.omega_1 - 0.5 - 0.75 * tp.alpha * (3.0 * c.m * c.m + c.n * c.n)) / tp.omega_p,
        -diag,
    )
}

/// Stability class of a trace-free planar equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// det(J) > 0: purely imaginary eigenvalues, stable center.
    Center,
    /// det(J) < 0: real eigenvalues of opposite sign, unstable saddle.
    Saddle,
    /// det(J) = 0 within the guard: no verdict.
    Degenerate,
}

impl Classification {
    pub fn from_det(det: f64) -> Self {
        if det > BOUNDARY_GUARD {
            Classification::Center
        } else if det < -BOUNDARY_GUARD {
            Classification::Saddle
        } else {
            Classification::Degenerate
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Center => "center",
            Classification::Saddle => "saddle",
            Classification::Degenerate => "degenerate",
        }
    }
}

/// Position of the detuning relative to the first instability tongue
/// `omega_1 in (-1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetuningRegime {
    BelowTongue,
    InsideTongue,
    AboveTongue,
}

impl DetuningRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            DetuningRegime::BelowTongue => "below-tongue",
            DetuningRegime::InsideTongue => "inside-tongue",
            DetuningRegime::AboveTongue => "above-tongue",
        }
    }
}

/// One equilibrium of the Cartesian slow flow with its certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub point: CartesianSlowState,
    pub det_j: f64,
    pub classification: Classification,
}

/// Census of slow-flow equilibria at one detuning value.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub omega_1: f64,
    pub regime: DetuningRegime,
    /// True for `alpha > 0`, where the census conditions are the sign
    /// mirror of the `alpha < 0` case.
    pub mirrored_convention: bool,
    pub entries: Vec<Equilibrium>,
}

/// Outcome of the equilibrium census: either a report or a degenerate
/// boundary marker where `det(J)` changes sign and no classification holds.
#[derive(Debug, Clone, PartialEq)]
pub enum SlowFlowCensus {
    Census(EquilibriumReport),
    /// `omega_1` within the guard of `boundary` (+1/2 or -1/2).
    DegenerateBoundary { omega_1: f64, boundary: f64 },
}

impl SlowFlowCensus {
    pub fn report(&self) -> Option<&EquilibriumReport> {
        match self {
            SlowFlowCensus::Census(r) => Some(r),
            SlowFlowCensus::DegenerateBoundary { .. } => None,
        }
    }
}

/// Enumerate the equilibria of the Cartesian slow flow at `tp.omega_1`.
///
/// The origin always qualifies. The on-axis pairs exist where their squared
/// amplitude `-(4/(3 alpha))(omega_1 -+ 1/2)` is positive, giving counts 1,
/// 3, 5 over the detuning regimes (for `alpha < 0`: one below the tongue,
/// three inside, five above; mirrored for `alpha > 0`). Detunings within
/// [`BOUNDARY_GUARD`] of the boundaries return a degenerate marker.
pub fn tongue_equilibria(tp: &TongueParams) -> SlowFlowCensus {
    for boundary in [-0.5, 0.5] {
        if (tp.omega_1 - boundary).abs() <= BOUNDARY_GUARD {
            return SlowFlowCensus::DegenerateBoundary {
                omega_1: tp.omega_1,
                boundary,
            };
        }
    }

    let mut entries = Vec::with_capacity(5);
    let mut push = |point: CartesianSlowState| {
        let det = tongue_jacobian(tp, &point).det();
        entries.push(Equilibrium {
            point,
            det_j: det,
            classification: Classification::from_det(det),
        });
    };

    push(CartesianSlowState::new(0.0, 0.0));
    // Pair on the M axis (phase 0 or pi): A^2 = -(4/(3 alpha))(omega_1 + 1/2).
    let m_sq = -(4.0 / (3.0 * tp.alpha)) * (tp.omega_1 + 0.5);
    if m_sq > 0.0 {
        let m = m_sq.sqrt();
        push(CartesianSlowState::new(m, 0.0));
        push(CartesianSlowState::new(-m, 0.0));
    }
    // Pair on the N axis (phase pi/2 or 3 pi/2): A^2 = -(4/(3 alpha))(omega_1 - 1/2).
    let n_sq = -(4.0 / (3.0 * tp.alpha)) * (tp.omega_1 - 0.5);
    if n_sq > 0.0 {
        let n = n_sq.sqrt();
        push(CartesianSlowState::new(0.0, n));
        push(CartesianSlowState::new(0.0, -n));
    }

    let regime = if tp.omega_1 < -0.5 {
        DetuningRegime::BelowTongue
    } else if tp.omega_1 > 0.5 {
        DetuningRegime::AboveTongue
    } else {
        DetuningRegime::InsideTongue
    };

    SlowFlowCensus::Census(EquilibriumReport {
        omega_1: tp.omega_1,
        regime,
        mirrored_convention: tp.alpha > 0.0,
        entries,
    })
}

/// First-order transition curves of the first instability tongue:
/// `omega_n^2 = omega_p^2/4 -+ eps/2`, returned as `(lower, upper)`.
pub fn transition_curves(omega_p: f64, epsilon: f64) -> (f64, f64) {
    let tip = omega_p * omega_p / 4.0;
    (tip - epsilon / 2.0, tip + epsilon / 2.0)
}

/// Flavor of a pitchfork bifurcation of the slow flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PitchforkKind {
    /// A stable pair is born while the origin loses stability.
    Supercritical,
    /// An unstable pair is born while the origin is (or becomes) stable.
    Subcritical,
}

impl PitchforkKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PitchforkKind::Supercritical => "supercritical",
            PitchforkKind::Subcritical => "subcritical",
        }
    }
}

/// A census-count change detected while sweeping the detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationEvent {
    /// Exact boundary value crossed (-1/2 or +1/2).
    pub omega_1: f64,
    pub kind: PitchforkKind,
    pub count_before: usize,
    pub count_after: usize,
}

fn census_count(alpha: f64, omega_1: f64) -> usize {
    let mut count = 1;
    if -(omega_1 + 0.5) / alpha > 0.0 {
        count += 2;
    }
    if -(omega_1 - 0.5) / alpha > 0.0 {
        count += 2;
    }
    count
}

/// Sweep a monotone detuning grid and report the pitchfork events at the
/// tongue boundaries it straddles.
///
/// Labels come from the census structure on either side of the boundary: a
/// pair of centers born where the origin is unstable is supercritical, a
/// pair of saddles born where the origin is stable is subcritical. Events
/// are listed in traversal order; a grid that straddles no boundary yields
/// an empty list.
pub fn bifurcation_scan(
    alpha: f64,
    omega_p: f64,
    omega_1_grid: &[f64],
) -> Result<Vec<BifurcationEvent>, Error> {
    if alpha == 0.0 {
        return Err(Error::DegenerateHypothesis(
            "cubic stiffness alpha must be nonzero".into(),
        ));
    }
    if omega_1_grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "detuning sweep needs at least two grid points".into(),
        ));
    }
    let increasing = omega_1_grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = omega_1_grid.windows(2).all(|w| w[1] < w[0]);
    if !increasing && !decreasing {
        return Err(Error::InvalidParameter(
            "detuning sweep must be strictly monotone".into(),
        ));
    }

    let first = omega_1_grid[0];
    let last = *omega_1_grid.last().expect("nonempty grid");
    let (lo, hi) = if increasing { (first, last) } else { (last, first) };

    let mut boundaries: Vec<f64> = [-0.5, 0.5]
        .into_iter()
        .filter(|b| lo < *b && *b < hi)
        .collect();
    if decreasing {
        boundaries.reverse();
    }

    let h = 1e-4;
    let mut events = Vec::new();
    for b in boundaries {
        let before_side = if increasing { b - h } else { b + h };
        let after_side = if increasing { b + h } else { b - h };
        let count_before = census_count(alpha, before_side);
        let count_after = census_count(alpha, after_side);
        // Side where the on-axis pair born at this boundary exists.
        let pair_side = if count_after > count_before {
            after_side
        } else {
            before_side
        };
        let pair_det = if b < 0.0 {
            // M-axis pair.
            (2.0 * pair_side + 1.0) / (omega_p * omega_p)
        } else {
            // N-axis pair.
            (-2.0 * pair_side + 1.0) / (omega_p * omega_p)
        };
        let kind = if pair_det > 0.0 {
            PitchforkKind::Supercritical
        } else {
            PitchforkKind::Subcritical
        };
        events.push(BifurcationEvent {
            omega_1: b,
            kind,
            count_before,
            count_after,
        });
    }
    Ok(events)
}

/// Cross-module consistency helper: the resonant equilibrium expressed as
/// the averaged-function prediction `(x0*, y0*)`.
pub fn resonant_equilibrium_as_prediction(
    omega: f64,
    alpha: f64,
    a1: f64,
    b1: f64,
) -> Result<(f64, f64), Error> {
    let eq = resonant_equilibrium(omega, alpha, a1, b1)?;
    Ok((eq.x0_star, eq.y0_star))
}
