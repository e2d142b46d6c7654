//! Averaged (bifurcation) function of the resonant system and its zeros.
//!
//! For the resonant equation (`omega_n = omega_p = omega`) the first-order
//! averaged function along the unperturbed solution family is, in closed
//! form,
//!
//! ```text
//! f11(x0, y0) = -(pi/w^2) b1 + 3 pi alpha y0 (w^2 x0^2 + y0^2) / (4 w^5)
//! f21(x0, y0) =  (pi/w)   a1 - 3 pi alpha x0 (w^2 x0^2 + y0^2) / (4 w^3)
//! ```
//!
//! where `(a1, b1)` is the fundamental Fourier pair of the forcing. Simple
//! zeros of `(f11, f21)` continue to true T-periodic orbits for small
//! perturbations. This module evaluates the function both in closed form and
//! by quadrature of its defining integral, locates the closed-form zero,
//! and certifies nondegeneracy through the analytic Jacobian determinant
//!
//! ```text
//! det = (27 pi^2 alpha^2 / 16 w^8) (y0^2 + w^2 x0^2)^2 .
//! ```

use std::f64::consts::PI;

use crate::error::Error;
use crate::ode::{unperturbed_flow_closed, ForcingSeries, Mat2, ModelParams, State};

/// Default number of quadrature panels for the period integral.
pub const DEFAULT_QUAD_POINTS: usize = 2048;

/// Default Newton tolerance on the residual norm.
pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;

/// Default Newton iteration cap.
pub const DEFAULT_NEWTON_MAX_ITER: usize = 50;

/// Value of the averaged function at one phase point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationValue {
    pub f11: f64,
    pub f21: f64,
}

impl BifurcationValue {
    pub fn norm(&self) -> f64 {
        self.f11.hypot(self.f21)
    }
}

/// Fundamental matrix of the unperturbed linearization,
/// `[[cos wt, sin wt / w], [-w sin wt, cos wt]]`.
pub fn fundamental_matrix(omega: f64, t: f64) -> Mat2 {
    let (s, c) = (omega * t).sin_cos();
    Mat2::new(c, s / omega, -omega * s, c)
}

/// Inverse of the fundamental matrix,
/// `[[cos wt, -sin wt / w], [w sin wt, cos wt]]`.
pub fn fundamental_matrix_inverse(omega: f64, t: f64) -> Mat2 {
    let (s, c) = (omega * t).sin_cos();
    Mat2::new(c, -s / omega, omega * s, c)
}

/// Closed-form averaged function at `z0 = (x0, y0)`.
pub fn bifurcation_fn_closed(
    omega: f64,
    alpha: f64,
    a1: f64,
    b1: f64,
    z0: State,
) -> BifurcationValue {
    let w = omega;
    let r = w * w * z0.x * z0.x + z0.y * z0.y;
    BifurcationValue {
        f11: -PI * b1 / (w * w) + 3.0 * PI * alpha * z0.y * r / (4.0 * w.powi(5)),
        f21: PI * a1 / w - 3.0 * PI * alpha * z0.x * r / (4.0 * w.powi(3)),
    }
}

/// Quadrature evaluation of the averaged function, split into its three
/// partial integrals: the forcing part `m1`, the cubic part `m2`, and the
/// parametric part `m3` (identically zero in exact arithmetic). The total is
/// `m1 - m2 - m3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureBifurcation {
    pub total: BifurcationValue,
    pub m1: BifurcationValue,
    pub m2: BifurcationValue,
    pub m3: BifurcationValue,
}

/// Evaluate the averaged function by composite trapezoid quadrature of
///
/// ```text
/// f1(z0) = integral over [0, T] of Yinv(t) * (0, f(t) - alpha x^3 - cos(wt) x)
/// ```
///
/// with `x = x(t)` the closed-form unperturbed solution through `z0`.
/// The integrand is a trigonometric polynomial, so the trapezoid rule over
/// the exact period is spectrally accurate.
///
/// Requires resonant parameters and `quad_points >= 64`.
pub fn bifurcation_fn_quadrature(
    p: &ModelParams,
    f: &ForcingSeries,
    z0: State,
    quad_points: usize,
) -> Result<QuadratureBifurcation, Error> {
    if !p.is_resonant() {
        return Err(Error::InvalidParameter(format!(
            "averaging requires resonant parameters, got omega_n = {}, omega_p = {}",
            p.omega_n, p.omega_p
        )));
    }
    if quad_points < 64 {
        return Err(Error::InvalidParameter(format!(
            "quad_points must be at least 64, got {quad_points}"
        )));
    }

    let w = p.omega_n;
    let period = p.period();
    let h = period / quad_points as f64;

    let mut m1 = [0.0f64; 2];
    let mut m2 = [0.0f64; 2];
    let mut m3 = [0.0f64; 2];
    for k in 0..=quad_points {
        let t = k as f64 * h;
        let weight = if k == 0 || k == quad_points { 0.5 } else { 1.0 };
        let (s, c) = (w * t).sin_cos();
        let x = unperturbed_flow_closed(p, z0, t).x;
        // Yinv * (0, g) = (-sin(wt) g / w, cos(wt) g)
        let g1 = f.eval(w, t);
        let g2 = p.alpha * x * x * x;
        let g3 = c * x;
        m1[0] += weight * (-s * g1 / w);
        m1[1] += weight * (c * g1);
        m2[0] += weight * (-s * g2 / w);
        m2[1] += weight * (c * g2);
        m3[0] += weight * (-s * g3 / w);
        m3[1] += weight * (c * g3);
    }
    for acc in [&mut m1, &mut m2, &mut m3] {
        acc[0] *= h;
        acc[1] *= h;
    }

    let m1 = BifurcationValue {
        f11: m1[0],
        f21: m1[1],
    };
    let m2 = BifurcationValue {
        f11: m2[0],
        f21: m2[1],
    };
    let m3 = BifurcationValue {
        f11: m3[0],
        f21: m3[1],
    };
    Ok(QuadratureBifurcation {
        total: BifurcationValue {
            f11: m1.f11 - m2.f11 - m3.f11,
            f21: m1.f21 - m2.f21 - m3.f21,
        },
        m1,
        m2,
        m3,
    })
}

fn require_nondegenerate(alpha: f64, a1: f64, b1: f64) -> Result<(), Error> {
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
    Ok(())
}

/// Closed-form zero of the averaged function:
///
/// ```text
/// x0* = cbrt(4 a1^3       / (3 alpha (a1^2 + b1^2)))
/// y0* = cbrt(4 b1^3 w^3   / (3 alpha (a1^2 + b1^2)))
/// ```
///
/// using the real (odd) cube root throughout.
pub fn predicted_zero(omega: f64, alpha: f64, a1: f64, b1: f64) -> Result<(f64, f64), Error> {
    require_nondegenerate(alpha, a1, b1)?;
    let denom = 3.0 * alpha * (a1 * a1 + b1 * b1);
    let x0 = (4.0 * a1.powi(3) / denom).cbrt();
    let y0 = (4.0 * b1.powi(3) * omega.powi(3) / denom).cbrt();
    Ok((x0, y0))
}

/// One sign candidate for the predicted zero, with its residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCandidate {
    pub x0: f64,
    pub y0: f64,
    pub residual: f64,
}

/// Verified prediction of a periodic-solution initial condition.
///
/// Both sign conventions of the closed-form zero are scored by the residual
/// norm of the averaged function; the candidate with the smaller residual is
/// reported and the other kept for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingPrediction {
    pub x0_star: f64,
    pub y0_star: f64,
    /// Analytic Jacobian determinant at the reported zero.
    pub det_jacobian: f64,
    /// Residual norm of the averaged function at the reported zero.
    pub residual_norm: f64,
    /// Candidates in evaluation order: [as solved, negated].
    pub candidates: [SignCandidate; 2],
    /// True when the negated candidate won the residual score.
    pub sign_flipped: bool,
}

/// Evaluate both sign conventions of the predicted zero and report the
/// residual-verified one together with its nondegeneracy certificate.
pub fn predict(omega: f64, alpha: f64, a1: f64, b1: f64) -> Result<AveragingPrediction, Error> {
    let (x0, y0) = predicted_zero(omega, alpha, a1, b1)?;
    let mut candidates = [(x0, y0), (-x0, -y0)].map(|(x, y)| {
        let r = bifurcation_fn_closed(omega, alpha, a1, b1, State::new(x, y)).norm();
        SignCandidate {
            x0: x,
            y0: y,
            residual: r,
        }
    });
    let sign_flipped = candidates[1].residual < candidates[0].residual;
    if sign_flipped {
        candidates.swap(0, 1);
    }
    let chosen = candidates[0];
    Ok(AveragingPrediction {
        x0_star: chosen.x0,
        y0_star: chosen.y0,
        det_jacobian: jacobian_det_closed(omega, alpha, State::new(chosen.x0, chosen.y0)),
        residual_norm: chosen.residual,
        candidates: if sign_flipped {
            [candidates[1], candidates[0]]
        } else {
            candidates
        },
        sign_flipped,
    })
}

/// Analytic Jacobian of the averaged function with respect to `(x0, y0)`:
///
/// ```text
/// [  3 pi a x y / (2 w^3)              3 pi a (w^2 x^2 + 3 y^2) / (4 w^5) ]
/// [ -3 pi a (y^2 + 3 w^2 x^2)/(4 w^3) -3 pi a x y / (2 w^3)               ]
/// ```
pub fn averaging_jacobian(omega: f64, alpha: f64, z0: State) -> Mat2 {
    let w = omega;
    let (x, y) = (z0.x, z0.y);
    let diag = 3.0 * PI * alpha * x * y / (2.0 * w.powi(3));
    Mat2::new(
        diag,
        3.0 * PI * alpha * (w * w * x * x + 3.0 * y * y) / (4.0 * w.powi(5)),
        -3.0 * PI * alpha * (y * y + 3.0 * w * w * x * x) / (4.0 * w.powi(3)),
        -diag,
    )
}

/// Closed-form Jacobian determinant
/// `(27 pi^2 alpha^2 / 16 w^8) (y0^2 + w^2 x0^2)^2`; strictly positive
/// whenever `alpha != 0` and `z0 != (0, 0)`.
pub fn jacobian_det_closed(omega: f64, alpha: f64, z0: State) -> f64 {
    let w = omega;
    let r = z0.y * z0.y + w * w * z0.x * z0.x;
    27.0 * PI * PI * alpha * alpha * r * r / (16.0 * w.powi(8))
}

/// Damped Newton iteration on a planar objective with analytic Jacobian.
///
/// Steps are halved (up to 30 times) until the residual norm decreases; a
/// near-singular Jacobian falls back to a Tikhonov-regularized pseudo-solve.
/// On failure the best iterate is carried in the error.
pub fn newton_root<F, J>(
    objective: F,
    jacobian: J,
    guess: State,
    tol: f64,
    max_iter: usize,
) -> Result<State, Error>
where
    F: Fn(State) -> BifurcationValue,
    J: Fn(State) -> Mat2,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Newton tolerance must be positive, got {tol}"
        )));
    }
    let mut z = guess;
    let mut fz = objective(z);
    let mut res = fz.norm();
    let mut best = (z, res);

    for iter in 0..max_iter {
        if res <= tol {
            return Ok(z);
        }
        let j = jacobian(z);
        let rhs = State::new(-fz.f11, -fz.f21);
        let step = match j.solve(rhs) {
            Some(s) => s,
            None => j.solve_regularized(rhs, 1e-14),
        };
        if !step.is_finite() {
            return Err(Error::SingularSystem);
        }

        // Step halving until the residual norm decreases.
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let z_new = z + step * damping;
            let f_new = objective(z_new);
            let r_new = f_new.norm();
            if r_new < res {
                z = z_new;
                fz = f_new;
                res = r_new;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if res < best.1 {
            best = (z, res);
        }
        if !accepted {
            return Err(Error::NoConvergence {
                x: best.0.x,
                y: best.0.y,
                residual: best.1,
                iterations: iter + 1,
            });
        }
    }
    if res <= tol {
        Ok(z)
    } else {
        Err(Error::NoConvergence {
            x: best.0.x,
            y: best.0.y,
            residual: best.1,
            iterations: max_iter,
        })
    }
}

/// Newton iteration with a central finite-difference Jacobian of spacing `h`.
pub fn newton_root_fd<F>(
    objective: F,
    guess: State,
    tol: f64,
    max_iter: usize,
    h: f64,
) -> Result<State, Error>
where
    F: Fn(State) -> BifurcationValue,
{
    let jac = |z: State| finite_difference_jacobian(&objective, z, h);
    newton_root(&objective, jac, guess, tol, max_iter)
}

/// Central finite differences of a planar objective.
pub fn finite_difference_jacobian<F>(objective: &F, z: State, h: f64) -> Mat2
where
    F: Fn(State) -> BifurcationValue,
{
    let fx_p = objective(State::new(z.x + h, z.y));
    let fx_m = objective(State::new(z.x - h, z.y));
    let fy_p = objective(State::new(z.x, z.y + h));
    let fy_m = objective(State::new(z.x, z.y - h));
    Mat2::new(
        (fx_p.f11 - fx_m.f11) / (2.0 * h),
        (fy_p.f11 - fy_m.f11) / (2.0 * h),
        (fx_p.f21 - fx_m.f21) / (2.0 * h),
        (fy_p.f21 - fy_m.f21) / (2.0 * h),
    )
}
