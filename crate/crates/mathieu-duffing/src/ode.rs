//! Vector fields, closed-form flows, and time integration for the forced
//! Mathieu-Duffing oscillator
//!
//! ```text
//! x'' + (omega_n^2 + eps*cos(omega_p*t)) x + eps*alpha*x^3 = eps*f(t)
//! ```
//!
//! written as the planar system `x' = y`, `y' = -omega_n^2 x + eps*(f(t) -
//! alpha*x^3 - cos(omega_p t) x)`. Provides an adaptive Dormand-Prince 5(4)
//! integrator with PI step control, a fixed-step classical RK4 mode for
//! reproducible parameter sweeps, and monodromy matrices of the variational
//! equations.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Error;

/// Hard ceiling on any state component during integration.
pub const BLOW_UP_GUARD: f64 = 1e8;

/// Default absolute/relative tolerance of the adaptive integrator.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default number of fixed RK4 steps per forcing period.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 4000;

/// Reduce `w * t` modulo 2*pi so trigonometric arguments stay small on long
/// horizons and phase error does not grow with `t`.
#[inline]
pub fn reduced_angle(w: f64, t: f64) -> f64 {
    (w * t).rem_euclid(TAU)
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Scalar parameter set of the full equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Natural frequency (rad per unit time, > 0).
    pub omega_n: f64,
    /// Parametric frequency (rad per unit time, > 0).
    pub omega_p: f64,
    /// Perturbation size.
    pub epsilon: f64,
    /// Cubic stiffness.
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(omega_n: f64, omega_p: f64, epsilon: f64, alpha: f64) -> Result<Self, Error> {
        if !(omega_n > 0.0) || !omega_n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega_n must be positive and finite, got {omega_n}"
            )));
        }
        if !(omega_p > 0.0) || !omega_p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega_p must be positive and finite, got {omega_p}"
            )));
        }
        if !epsilon.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameter(
                "epsilon and alpha must be finite".into(),
            ));
        }
        Ok(Self {
            omega_n,
            omega_p,
            epsilon,
            alpha,
        })
    }

    /// Resonant parameter set: natural and parametric frequency coincide.
    pub fn resonant(omega: f64, epsilon: f64, alpha: f64) -> Result<Self, Error> {
        Self::new(omega, omega, epsilon, alpha)
    }

    pub fn is_resonant(&self) -> bool {
        self.omega_n == self.omega_p
    }

    /// Forcing period `T = 2*pi / omega_p`.
    pub fn period(&self) -> f64 {
        TAU / self.omega_p
    }
}

/// Truncated zero-mean Fourier series for the external forcing.
///
/// Index 0 of each coefficient list is harmonic 1; there is no constant term,
/// so the series has zero mean over one period by construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForcingSeries {
    /// Cosine coefficients `a_1 .. a_N`.
    pub a: Vec<f64>,
    /// Sine coefficients `b_1 .. b_N`.
    pub b: Vec<f64>,
}

impl ForcingSeries {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        Self { a, b }
    }

    /// The identically-zero forcing.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Pure first-harmonic cosine forcing `a1 * cos(omega t)`.
    pub fn cosine(a1: f64) -> Self {
        Self::new(vec![a1], vec![])
    }

    /// First-harmonic pair `(a_1, b_1)`, zero when absent.
    pub fn first_harmonic(&self) -> (f64, f64) {
        (
            self.a.first().copied().unwrap_or(0.0),
            self.b.first().copied().unwrap_or(0.0),
        )
    }

    /// Whether `(a_1, b_1) != (0, 0)`, the hypothesis of the averaging and
    /// two-timing results.
    pub fn has_fundamental(&self) -> bool {
        let (a1, b1) = self.first_harmonic();
        a1 != 0.0 || b1 != 0.0
    }

    /// Number of harmonics carried by either coefficient list.
    pub fn harmonics(&self) -> usize {
        self.a.len().max(self.b.len())
    }

    /// Evaluate `sum_n a_n cos(n w t) + b_n sin(n w t)`.
    ///
    /// Arguments are reduced modulo 2*pi before evaluation.
    pub fn eval(&self, omega: f64, t: f64) -> f64 {
        let phase = reduced_angle(omega, t);
        let mut sum = 0.0;
        for n in 1..=self.harmonics() {
            let arg = (n as f64 * phase).rem_euclid(TAU);
            let (s, c) = arg.sin_cos();
            let an = self.a.get(n - 1).copied().unwrap_or(0.0);
            let bn = self.b.get(n - 1).copied().unwrap_or(0.0);
            sum += an * c + bn * s;
        }
        sum
    }
}

/// Planar phase point `(x, y) = (position, velocity)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        State::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        State::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for State {
    type Output = State;
    fn mul(self, k: f64) -> State {
        State::new(self.x * k, self.y * k)
    }
}

impl From<[f64; 2]> for State {
    fn from(u: [f64; 2]) -> Self {
        State::new(u[0], u[1])
    }
}

impl From<State> for [f64; 2] {
    fn from(s: State) -> [f64; 2] {
        [s.x, s.y]
    }
}

/// Real 2x2 matrix used for fundamental, monodromy, and Jacobian matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    /// Largest absolute entry; cheap conditioning scale for solves.
    pub fn max_abs(&self) -> f64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }

    pub fn apply(&self, v: State) -> State {
        State::new(
            self.m11 * v.x + self.m12 * v.y,
            self.m21 * v.x + self.m22 * v.y,
        )
    }

    pub fn matmul(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m11, self.m21, self.m12, self.m22)
    }

    /// Direct solve of `self * v = rhs`. `None` when the determinant is
    /// negligibly small relative to the entries.
    pub fn solve(&self, rhs: State) -> Option<State> {
        let d = self.det();
        let scale = self.max_abs().powi(2).max(f64::MIN_POSITIVE);
        if d.abs() <= 1e-14 * scale {
            return None;
        }
        Some(State::new(
            (rhs.x * self.m22 - rhs.y * self.m12) / d,
            (self.m11 * rhs.y - self.m21 * rhs.x) / d,
        ))
    }

    /// Tikhonov-regularized solve of `self * v = rhs`: solves
    /// `(A^T A + floor * I) v = A^T rhs`. Used where the system is allowed to
    /// be near-singular (shooting Jacobians of size O(eps), degenerate Newton
    /// iterates).
    pub fn solve_regularized(&self, rhs: State, floor: f64) -> State {
        let at = self.transpose();
        let mut ata = at.matmul(self);
        ata.m11 += floor;
        ata.m22 += floor;
        let atb = at.apply(rhs);
        let d = ata.det();
        if d == 0.0 {
            return State::new(0.0, 0.0);
        }
        State::new(
            (atb.x * ata.m22 - atb.y * ata.m12) / d,
            (ata.m11 * atb.y - ata.m21 * atb.x) / d,
        )
    }

    /// Eigenvalues via the characteristic polynomial
    /// `lambda^2 - tr*lambda + det = 0`.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let tr = self.trace();
        let det = self.det();
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            let r = disc.sqrt();
            (
                Complex64::new((tr + r) / 2.0, 0.0),
                Complex64::new((tr - r) / 2.0, 0.0),
            )
        } else {
            let i = (-disc).sqrt() / 2.0;
            (
                Complex64::new(tr / 2.0, i),
                Complex64::new(tr / 2.0, -i),
            )
        }
    }
}

impl std::ops::Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 - rhs.m11,
            self.m12 - rhs.m12,
            self.m21 - rhs.m21,
            self.m22 - rhs.m22,
        )
    }
}

// ---------------------------------------------------------------------------
// Vector fields and closed-form flow
// ---------------------------------------------------------------------------

/// Right-hand side of the full system:
/// `(y, -omega_n^2 x + eps*(f(t) - alpha x^3 - cos(omega_p t) x))`.
pub fn rhs_full(p: &ModelParams, f: &ForcingSeries, t: f64, s: State) -> State {
    let cos_pump = reduced_angle(p.omega_p, t).cos();
    let drive = f.eval(p.omega_p, t);
    State::new(
        s.y,
        -p.omega_n * p.omega_n * s.x
            + p.epsilon * (drive - p.alpha * s.x * s.x * s.x - cos_pump * s.x),
    )
}

/// Right-hand side of the unperturbed oscillator `(y, -omega_n^2 x)`.
pub fn rhs_unperturbed(p: &ModelParams, s: State) -> State {
    State::new(s.y, -p.omega_n * p.omega_n * s.x)
}

/// Closed-form flow of the unperturbed oscillator:
/// `x(t) = (w x0 cos wt + y0 sin wt)/w`, `y(t) = -w x0 sin wt + y0 cos wt`.
pub fn unperturbed_flow_closed(p: &ModelParams, z0: State, t: f64) -> State {
    let w = p.omega_n;
    let (s, c) = reduced_angle(w, t).sin_cos();
    State::new(
        (w * z0.x * c + z0.y * s) / w,
        -w * z0.x * s + z0.y * c,
    )
}

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) integrator
// ---------------------------------------------------------------------------

// Butcher tableau (Dormand & Prince 1980). b-row is the 5th-order weights;
// E is the difference to the embedded 4th-order solution.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Options for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub blow_up: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_TOL,
            atol: DEFAULT_TOL,
            max_steps: 10_000_000,
            blow_up: BLOW_UP_GUARD,
        }
    }
}

impl AdaptiveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

/// Integrate `y' = rhs(t, y)` from `t0` to `t1 >= t0` with mixed
/// absolute/relative error control (`tol` sets both).
pub fn integrate<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<[f64; N], Error>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    integrate_with(rhs, y0, t0, t1, AdaptiveOptions::with_tol(tol))
}

/// Adaptive Dormand-Prince 5(4) with PI step-size control and FSAL.
pub fn integrate_with<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    opts: AdaptiveOptions,
) -> Result<[f64; N], Error>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!(
            "integration interval must have t1 >= t0, got [{t0}, {t1}]"
        )));
    }
    if !(opts.rtol > 0.0) || !(opts.atol > 0.0) {
        return Err(Error::InvalidParameter(
            "integration tolerances must be positive".into(),
        ));
    }
    if t1 == t0 {
        return Ok(y0);
    }

    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k0 = rhs(t, &y);

    // Initial step from the scale of the first derivative.
    let d0 = weighted_norm(&y, &y, opts.atol, opts.rtol);
    let d1 = weighted_norm(&k0, &y, opts.atol, opts.rtol);
    let mut h = if d0 > 1e-10 && d1 > 1e-10 {
        (0.01 * d0 / d1).min(span)
    } else {
        (1e-6 * span).max(f64::MIN_POSITIVE)
    };

    // Conservative safety factor: long multi-period integrations (energy
    // drift, monodromy sweeps) need accumulated error well under n_steps*tol.
    const SAFE: f64 = 0.7;
    const FAC_MIN: f64 = 0.2;
    const FAC_MAX: f64 = 10.0;
    const BETA: f64 = 0.04;
    const EXPO: f64 = 0.2 - BETA * 0.75;
    let mut err_old: f64 = 1e-4;

    let mut k = [[0.0; N]; 7];
    for step in 0..opts.max_steps {
        if step == opts.max_steps - 1 {
            return Err(Error::MaxStepsExceeded {
                t,
                max_steps: opts.max_steps,
            });
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        k[0] = k0;
        for i in 1..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = DP_A[i][j];
                if a != 0.0 {
                    for n in 0..N {
                        yi[n] += h * a * kj[n];
                    }
                }
            }
            k[i] = rhs(t + DP_C[i] * h, &yi);
        }

        let mut y_new = y;
        for (j, kj) in k.iter().enumerate() {
            if DP_B[j] != 0.0 {
                for n in 0..N {
                    y_new[n] += h * DP_B[j] * kj[n];
                }
            }
        }

        // Scaled RMS of the embedded error estimate.
        let mut err = 0.0;
        for n in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += DP_E[j] * kj[n];
            }
            e *= h;
            let sk = opts.atol + opts.rtol * y[n].abs().max(y_new[n].abs());
            err += (e / sk) * (e / sk);
        }
        err = (err / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_new;
            k0 = k[6]; // FSAL
            for v in &y {
                if !v.is_finite() || v.abs() > opts.blow_up {
                    return Err(Error::BlowUp {
                        t,
                        guard: opts.blow_up,
                    });
                }
            }
            if last {
                return Ok(y);
            }
            let fac = (SAFE * err.max(1e-10).powf(-EXPO) * err_old.powf(BETA))
                .clamp(FAC_MIN, FAC_MAX);
            err_old = err.max(1e-4);
            h *= fac;
        } else {
            let fac = (SAFE * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h *= fac;
        }
    }
    Err(Error::MaxStepsExceeded {
        t,
        max_steps: opts.max_steps,
    })
}

fn weighted_norm<const N: usize>(v: &[f64; N], y: &[f64; N], atol: f64, rtol: f64) -> f64 {
    let mut s = 0.0;
    for n in 0..N {
        let sk = atol + rtol * y[n].abs();
        s += (v[n] / sk) * (v[n] / sk);
    }
    (s / N as f64).sqrt()
}

/// Classical fixed-step RK4 with `steps` equal steps over `[t0, t1]`.
/// Deterministic across platforms for a fixed step count; used for
/// reproducible monodromy sweeps.
pub fn integrate_fixed_rk4<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<[f64; N], Error>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!(
            "integration interval must have t1 >= t0, got [{t0}, {t1}]"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "fixed-step integration needs at least one step".into(),
        ));
    }
    if t1 == t0 {
        return Ok(y0);
    }
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &y);
        let mut y2 = y;
        for n in 0..N {
            y2[n] += 0.5 * h * k1[n];
        }
        let k2 = rhs(t + 0.5 * h, &y2);
        let mut y3 = y;
        for n in 0..N {
            y3[n] += 0.5 * h * k2[n];
        }
        let k3 = rhs(t + 0.5 * h, &y3);
        let mut y4 = y;
        for n in 0..N {
            y4[n] += h * k3[n];
        }
        let k4 = rhs(t + h, &y4);
        for n in 0..N {
            y[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        }
        for v in &y {
            if !v.is_finite() || v.abs() > BLOW_UP_GUARD {
                return Err(Error::BlowUp {
                    t: t + h,
                    guard: BLOW_UP_GUARD,
                });
            }
        }
    }
    Ok(y)
}

/// Adaptive integration of a planar vector field expressed on `State`.
pub fn flow<F>(rhs: F, z0: State, t0: f64, t1: f64, tol: f64) -> Result<State, Error>
where
    F: Fn(f64, State) -> State,
{
    let u = integrate(
        |t, u: &[f64; 2]| {
            let d = rhs(t, State::new(u[0], u[1]));
            [d.x, d.y]
        },
        [z0.x, z0.y],
        t0,
        t1,
        tol,
    )?;
    Ok(State::new(u[0], u[1]))
}

/// States of a planar flow at an ascending list of sample times (all >= t0).
pub fn flow_samples<F>(
    rhs: F,
    z0: State,
    t0: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<State>, Error>
where
    F: Fn(f64, State) -> State,
{
    let mut out = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut z = z0;
    for &ti in times {
        if ti < t {
            return Err(Error::InvalidParameter(
                "sample times must be ascending and >= t0".into(),
            ));
        }
        z = flow(&rhs, z, t, ti, tol)?;
        t = ti;
        out.push(z);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Monodromy matrices
// ---------------------------------------------------------------------------

/// How to drive the time integration underneath a monodromy computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationMethod {
    Adaptive { tol: f64 },
    FixedStep { steps_per_period: usize },
}

impl Default for IntegrationMethod {
    fn default() -> Self {
        IntegrationMethod::Adaptive { tol: DEFAULT_TOL }
    }
}

/// Which linear system the monodromy matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonodromyMode {
    /// Flow of the linear Mathieu equation
    /// `x'' + (omega_n^2 + eps*cos(omega_p t)) x = 0`.
    LinearMathieu,
    /// Variational equations of the full system linearized about the orbit
    /// launched from the given initial state.
    LinearizedAboutOrbit(State),
}

/// Time-T fundamental matrix of the Hill equation
/// `x'' + (delta + eps*cos(omega_p t)) x = 0` with identity initial
/// condition, `T = 2*pi/omega_p`. Any real `delta` is admitted.
///
/// The linear part is traceless, so det = 1 up to integration error
/// (Liouville).
pub fn mathieu_monodromy(
    delta: f64,
    epsilon: f64,
    omega_p: f64,
    method: IntegrationMethod,
) -> Result<Mat2, Error> {
    if !(omega_p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega_p must be positive, got {omega_p}"
        )));
    }
    let period = TAU / omega_p;
    // Columns of the fundamental matrix integrated together:
    // u = [v11, v21, v12, v22].
    let rhs = |t: f64, u: &[f64; 4]| {
        let q = -(delta + epsilon * reduced_angle(omega_p, t).cos());
        [u[1], q * u[0], u[3], q * u[2]]
    };
    let u0 = [1.0, 0.0, 0.0, 1.0];
    let u = match method {
        IntegrationMethod::Adaptive { tol } => integrate(rhs, u0, 0.0, period, tol)?,
        IntegrationMethod::FixedStep { steps_per_period } => {
            integrate_fixed_rk4(rhs, u0, 0.0, period, steps_per_period)?
        }
    };
    Ok(Mat2::new(u[0], u[2], u[1], u[3]))
}

/// Monodromy matrix over one forcing period `T = 2*pi/omega_p`.
///
/// In `LinearizedAboutOrbit` mode the orbit and the two variational columns
/// are integrated together as one augmented system.
pub fn monodromy(
    p: &ModelParams,
    f: &ForcingSeries,
    mode: MonodromyMode,
    method: IntegrationMethod,
) -> Result<Mat2, Error> {
    match mode {
        MonodromyMode::LinearMathieu => {
            mathieu_monodromy(p.omega_n * p.omega_n, p.epsilon, p.omega_p, method)
        }
        MonodromyMode::LinearizedAboutOrbit(z0) => {
            let period = p.period();
            // u = [x, y, v11, v21, v12, v22].
            let rhs = |t: f64, u: &[f64; 6]| {
                let s = State::new(u[0], u[1]);
                let ds = rhs_full(p, f, t, s);
                let q = -(p.omega_n * p.omega_n
                    + p.epsilon * reduced_angle(p.omega_p, t).cos()
                    + 3.0 * p.epsilon * p.alpha * u[0] * u[0]);
                [ds.x, ds.y, u[3], q * u[2], u[5], q * u[4]]
            };
            let u0 = [z0.x, z0.y, 1.0, 0.0, 0.0, 1.0];
            let u = match method {
                IntegrationMethod::Adaptive { tol } => integrate(rhs, u0, 0.0, period, tol)?,
                IntegrationMethod::FixedStep { steps_per_period } => {
                    integrate_fixed_rk4(rhs, u0, 0.0, period, steps_per_period)?
                }
            };
            Ok(Mat2::new(u[2], u[4], u[3], u[5]))
        }
    }
}

/// Full-system flow over one forcing period together with the monodromy of
/// the variational equations about that trajectory. One augmented
/// integration; the workhorse of the shooting refinement.
pub fn period_map_with_monodromy(
    p: &ModelParams,
    f: &ForcingSeries,
    z0: State,
    tol: f64,
) -> Result<(State, Mat2), Error> {
    let period = p.period();
    let rhs = |t: f64, u: &[f64; 6]| {
        let s = State::new(u[0], u[1]);
        let ds = rhs_full(p, f, t, s);
        let q = -(p.omega_n * p.omega_n
            + p.epsilon * reduced_angle(p.omega_p, t).cos()
            + 3.0 * p.epsilon * p.alpha * u[0] * u[0]);
        [ds.x, ds.y, u[3], q * u[2], u[5], q * u[4]]
    };
    let u0 = [z0.x, z0.y, 1.0, 0.0, 0.0, 1.0];
    let u = integrate(rhs, u0, 0.0, period, tol)?;
    Ok((
        State::new(u[0], u[1]),
        Mat2::new(u[2], u[4], u[3], u[5]),
    ))
}
