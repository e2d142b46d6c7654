//! Refinement of the averaging prediction into a true T-periodic orbit of
//! the full system by shooting on the period map, plus convergence
//! measurements as the perturbation vanishes.
//!
//! The displacement map `D(z) = phi_T(z) - z` vanishes exactly at initial
//! conditions of T-periodic orbits. Newton's method on `D` uses the
//! Jacobian `M(z) - I`, where `M` is the monodromy of the variational
//! equations about the trajectory through `z`. Near the unperturbed limit
//! both `D` and `M - I` are O(eps), so the relative conditioning stays
//! workable, but a naive solve can overshoot; steps are damped and the
//! linear solve falls back to a Tikhonov floor when the system degenerates.

use num_complex::Complex64;

use crate::error::Error;
use crate::ode::{
    flow_samples, period_map_with_monodromy, rhs_full, ForcingSeries, Mat2, ModelParams, State,
};
use crate::two_timing::{zeroth_order_solution, ResonantEquilibrium};

/// Default shooting tolerance on the displacement norm.
pub const DEFAULT_SHOOT_TOL: f64 = 1e-10;

/// Default shooting iteration cap.
pub const DEFAULT_SHOOT_MAX_ITER: usize = 25;

/// Tikhonov floor for the near-singular `M - I` solve.
const SOLVE_FLOOR: f64 = 1e-14;

/// A numerically verified T-periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicOrbit {
    /// Refined initial condition.
    pub z_star: State,
    /// Orbit period `T = 2*pi/omega_p`.
    pub period: f64,
    /// Final displacement norm `|phi_T(z*) - z*|`.
    pub residual: f64,
    /// Monodromy of the variational equations about the orbit.
    pub monodromy: Mat2,
    /// Floquet multipliers (eigenvalues of the monodromy matrix).
    pub multipliers: (Complex64, Complex64),
    /// Newton iterations spent.
    pub iterations: usize,
}

/// Displacement of the period map, `phi_T(z0) - z0`, under the full system.
pub fn poincare_displacement(
    p: &ModelParams,
    f: &ForcingSeries,
    z0: State,
    tol: f64,
) -> Result<State, Error> {
    let (z_end, _) = period_map_with_monodromy(p, f, z0, tol)?;
    Ok(z_end - z0)
}

/// Integrator tolerance used underneath a shooting tolerance: the period map
/// must be resolved finer than the displacement it certifies.
fn inner_tol(tol: f64) -> f64 {
    (tol * 1e-2).clamp(1e-14, 1e-10)
}

/// Newton-refine `z_init` into a T-periodic orbit of the full system.
///
/// Rejected at `eps = 0`: there the displacement map vanishes identically
/// (every solution is T-periodic) and refinement is meaningless. On
/// non-convergence the best iterate travels in the error payload.
pub fn shoot_refine(
    p: &ModelParams,
    f: &ForcingSeries,
    z_init: State,
    tol: f64,
    max_iter: usize,
) -> Result<PeriodicOrbit, Error> {
    if p.epsilon == 0.0 {
        return Err(Error::InvalidParameter(
            "shooting requires epsilon != 0; at epsilon = 0 every solution is periodic".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "shooting tolerance must be positive, got {tol}"
        )));
    }
    let itol = inner_tol(tol);
    let period = p.period();

    let mut z = z_init;
    let (z_end, mut m) = period_map_with_monodromy(p, f, z, itol)?;
    let mut disp = z_end - z;
    let mut res = disp.norm();
    let mut best = (z, res, m);

    for iter in 0..max_iter {
        if res <= tol {
            let (l1, l2) = m.eigenvalues();
            return Ok(PeriodicOrbit {
                z_star: z,
                period,
                residual: res,
                monodromy: m,
                multipliers: (l1, l2),
                iterations: iter,
            });
        }
        let jac = m - Mat2::identity();
        let rhs = State::new(-disp.x, -disp.y);
        let step = match jac.solve(rhs) {
            Some(s) => s,
            None => jac.solve_regularized(rhs, SOLVE_FLOOR),
        };
        if !step.is_finite() {
            return Err(Error::SingularSystem);
        }

        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let z_new = z + step * damping;
            let (z_end_new, m_new) = period_map_with_monodromy(p, f, z_new, itol)?;
            let disp_new = z_end_new - z_new;
            let res_new = disp_new.norm();
            if res_new < res {
                z = z_new;
                m = m_new;
                disp = disp_new;
                res = res_new;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if res < best.1 {
            best = (z, res, m);
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
        let (l1, l2) = m.eigenvalues();
        Ok(PeriodicOrbit {
            z_star: z,
            period,
            residual: res,
            monodromy: m,
            multipliers: (l1, l2),
            iterations: max_iter,
        })
    } else {
        Err(Error::NoConvergence {
            x: best.0.x,
            y: best.0.y,
            residual: best.1,
            iterations: max_iter,
        })
    }
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    /// Distance of the refined orbit from the prediction; `None` when
    /// shooting failed for this epsilon.
    pub error: Option<f64>,
    /// Shooting residual of the refined orbit.
    pub residual: Option<f64>,
    pub failure: Option<String>,
}

/// Convergence of the refined orbit toward the prediction as eps -> 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log(error) against log(eps); `None` with
    /// fewer than two successful rows.
    pub slope: Option<f64>,
    /// Prediction the distances are measured from.
    pub z_pred: State,
}

/// Shoot at every epsilon in a strictly decreasing list and measure the
/// distance of the refined initial condition from the prediction `z_pred`.
/// Shooting failures mark their row and the study continues.
pub fn convergence_study(
    template: &ModelParams,
    f: &ForcingSeries,
    z_pred: State,
    eps_list: &[f64],
    tol: f64,
) -> Result<ConvergenceStudy, Error> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter(
            "convergence study needs at least one epsilon".into(),
        ));
    }
    if eps_list.contains(&0.0) {
        return Err(Error::InvalidParameter(
            "convergence study epsilons must be nonzero".into(),
        ));
    }
    if !eps_list.windows(2).all(|w| w[1].abs() < w[0].abs()) {
        return Err(Error::InvalidParameter(
            "convergence study epsilons must be strictly decreasing in magnitude".into(),
        ));
    }

    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let p = ModelParams {
            epsilon: eps,
            ..*template
        };
        match shoot_refine(&p, f, z_pred, tol, DEFAULT_SHOOT_MAX_ITER) {
            Ok(orbit) => rows.push(ConvergenceRow {
                epsilon: eps,
                error: Some((orbit.z_star - z_pred).norm()),
                residual: Some(orbit.residual),
                failure: None,
            }),
            Err(e) => rows.push(ConvergenceRow {
                epsilon: eps,
                error: None,
                residual: None,
                failure: Some(e.to_string()),
            }),
        }
    }

    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.error.map(|e| (r.epsilon.abs().ln(), e.max(1e-300).ln())))
        .collect();
    let slope = if points.len() >= 2 {
        Some(least_squares_slope(&points))
    } else {
        None
    };

    Ok(ConvergenceStudy {
        rows,
        slope,
        z_pred,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    num / den
}

/// Sample the orbit over one period at `samples` equispaced times starting
/// at t = 0.
pub fn sample_orbit(
    p: &ModelParams,
    f: &ForcingSeries,
    orbit: &PeriodicOrbit,
    samples: usize,
    tol: f64,
) -> Result<Vec<(f64, State)>, Error> {
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "orbit sampling needs at least one sample".into(),
        ));
    }
    let times: Vec<f64> = (0..samples)
        .map(|i| orbit.period * i as f64 / samples as f64)
        .collect();
    let states = flow_samples(
        |t, s| rhs_full(p, f, t, s),
        orbit.z_star,
        0.0,
        &times,
        tol,
    )?;
    Ok(times.into_iter().zip(states).collect())
}

/// Maximum deviation over one period between the refined orbit's position
/// and the zeroth-order two-timing solution carried by `eq`.
pub fn compare_two_timing(
    p: &ModelParams,
    f: &ForcingSeries,
    orbit: &PeriodicOrbit,
    eq: &ResonantEquilibrium,
    samples: usize,
    tol: f64,
) -> Result<f64, Error> {
    let path = sample_orbit(p, f, orbit, samples, tol)?;
    let mut max_dev = 0.0f64;
    for (t, z) in path {
        let approx = zeroth_order_solution(eq, p.omega_n, t);
        max_dev = max_dev.max((z.x - approx).abs());
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging;
    use crate::ode::flow;
    use crate::two_timing::resonant_equilibrium;

    fn resonant_case(eps: f64) -> (ModelParams, ForcingSeries) {
        (
            ModelParams::resonant(1.0, eps, 1.0).unwrap(),
            ForcingSeries::cosine(1.0),
        )
    }

    fn prediction() -> State {
        let (x0, y0) = averaging::predicted_zero(1.0, 1.0, 1.0, 0.0).unwrap();
        State::new(x0, y0)
    }

    #[test]
    fn displacement_vanishes_at_zero_eps() {
        let (p, f) = resonant_case(0.0);
        for z0 in [State::new(1.0, 0.0), State::new(-0.3, 0.7)] {
            let d = poincare_displacement(&p, &f, z0, 1e-12).unwrap();
            assert!(d.norm() <= 1e-9, "norm {}", d.norm());
        }
    }

    #[test]
    fn displacement_vanishes_at_unforced_origin() {
        let p = ModelParams::resonant(1.0, 0.05, 1.0).unwrap();
        let f = ForcingSeries::zero();
        let d = poincare_displacement(&p, &f, State::new(0.0, 0.0), 1e-12).unwrap();
        assert!(d.norm() <= 1e-12);
    }

    #[test]
    fn displacement_at_prediction_is_order_eps() {
        // At the predicted zero the leading term of the displacement map
        // cancels, so the O(eps) bound holds with a small constant and each
        // eps halving shrinks the norm at least linearly (measured: roughly
        // quadratically).
        let z_pred = prediction();
        let mut norms = Vec::new();
        for &eps in &[2e-3, 1e-3, 5e-4] {
            let (p, f) = resonant_case(eps);
            let d = poincare_displacement(&p, &f, z_pred, 1e-13).unwrap();
            assert!(d.norm() <= eps, "norm {} at eps {eps}", d.norm());
            norms.push(d.norm());
        }
        assert!(norms[0] / norms[1] > 1.9);
        assert!(norms[1] / norms[2] > 1.9);
    }

    #[test]
    fn shoot_refine_rejects_zero_eps() {
        let (p, f) = resonant_case(0.0);
        assert!(matches!(
            shoot_refine(&p, &f, prediction(), 1e-10, 25),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn shoot_refine_converges_from_prediction() {
        let (p, f) = resonant_case(1e-2);
        let orbit = shoot_refine(&p, &f, prediction(), 1e-10, 25).unwrap();
        assert!(orbit.residual <= 1e-10);
        assert!((orbit.z_star - prediction()).norm() < 0.1);
        // Divergence-free flow: det of the orbit monodromy is 1.
        assert!((orbit.monodromy.det() - 1.0).abs() <= 1e-8);
        // Multiplier product equals the determinant.
        let prod = orbit.multipliers.0 * orbit.multipliers.1;
        assert!((prod.re - orbit.monodromy.det()).abs() <= 1e-6);
        assert!(prod.im.abs() <= 1e-6);
    }

    #[test]
    fn refined_orbit_recloses_over_five_periods() {
        let (p, f) = resonant_case(1e-2);
        let orbit = shoot_refine(&p, &f, prediction(), 1e-10, 25).unwrap();
        let z_end = flow(
            |t, s| rhs_full(&p, &f, t, s),
            orbit.z_star,
            0.0,
            5.0 * orbit.period,
            1e-12,
        )
        .unwrap();
        assert!(
            (z_end - orbit.z_star).norm() <= 1e-7,
            "reclose error {}",
            (z_end - orbit.z_star).norm()
        );
    }

    #[test]
    fn shoot_distance_to_prediction_shrinks_with_eps() {
        let z_pred = prediction();
        let (p1, f) = resonant_case(1e-2);
        let (p2, _) = resonant_case(5e-3);
        let d1 = (shoot_refine(&p1, &f, z_pred, 1e-10, 25).unwrap().z_star - z_pred).norm();
        let d2 = (shoot_refine(&p2, &f, z_pred, 1e-10, 25).unwrap().z_star - z_pred).norm();
        let ratio = d1 / d2;
        assert!(
            ratio > 1.4 && ratio < 2.6,
            "halving eps changed distance by {ratio}"
        );
    }

    #[test]
    fn shoot_far_guess_fails_explicitly() {
        let (p, f) = resonant_case(1e-2);
        let r = shoot_refine(&p, &f, State::new(100.0, 0.0), 1e-10, 25);
        match r {
            Err(Error::NoConvergence { residual, .. }) => assert!(residual.is_finite()),
            Err(Error::BlowUp { .. })
            | Err(Error::StepSizeUnderflow { .. })
            | Err(Error::MaxStepsExceeded { .. }) => {}
            other => panic!("expected an explicit failure, got {other:?}"),
        }
    }

    #[test]
    fn convergence_study_slope_near_one() {
        let (p, f) = resonant_case(1e-2);
        let study =
            convergence_study(&p, &f, prediction(), &[1e-2, 5e-3, 2.5e-3], 1e-10).unwrap();
        assert_eq!(study.rows.len(), 3);
        for r in &study.rows {
            assert!(r.failure.is_none());
            assert!(r.residual.unwrap() <= 1e-10);
        }
        let errors: Vec<f64> = study.rows.iter().map(|r| r.error.unwrap()).collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "not monotone: {errors:?}");
        let slope = study.slope.unwrap();
        assert!(
            (slope - 1.0).abs() <= 0.3,
            "log-log slope {slope} outside 1 +- 0.3"
        );
    }

    #[test]
    fn convergence_study_single_eps_has_no_slope() {
        let (p, f) = resonant_case(1e-2);
        let study = convergence_study(&p, &f, prediction(), &[1e-2], 1e-10).unwrap();
        assert!(study.slope.is_none());
        assert_eq!(study.rows.len(), 1);
    }

    #[test]
    fn convergence_study_validates_eps_list() {
        let (p, f) = resonant_case(1e-2);
        assert!(matches!(
            convergence_study(&p, &f, prediction(), &[1e-3, 1e-2], 1e-10),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            convergence_study(&p, &f, prediction(), &[1e-2, 0.0], 1e-10),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn orbit_tracks_zeroth_order_solution() {
        let eq = resonant_equilibrium(1.0, 1.0, 1.0, 0.0).unwrap();
        let (p, f) = resonant_case(1e-3);
        let orbit = shoot_refine(&p, &f, prediction(), 1e-10, 25).unwrap();
        let dev = compare_two_timing(&p, &f, &orbit, &eq, 128, 1e-12).unwrap();
        assert!(dev <= 10.0 * p.epsilon, "deviation {dev} vs eps {}", p.epsilon);
    }

    #[test]
    fn orbit_deviation_scales_with_eps() {
        let eq = resonant_equilibrium(1.0, 1.0, 1.0, 0.0).unwrap();
        let mut devs = Vec::new();
        for &eps in &[1e-2, 1e-3] {
            let (p, f) = resonant_case(eps);
            let orbit = shoot_refine(&p, &f, prediction(), 1e-10, 25).unwrap();
            devs.push(compare_two_timing(&p, &f, &orbit, &eq, 128, 1e-12).unwrap());
        }
        let ratio = devs[0] / devs[1];
        assert!(
            ratio > 10.0 / 3.0 && ratio < 30.0,
            "decade of eps changed deviation by {ratio}"
        );
    }

    #[test]
    fn orbit_compared_against_itself_is_exact() {
        let (p, f) = resonant_case(1e-2);
        let orbit = shoot_refine(&p, &f, prediction(), 1e-10, 25).unwrap();
        let path = sample_orbit(&p, &f, &orbit, 64, 1e-12).unwrap();
        let max_dev = path
            .iter()
            .map(|(_, z)| (z.x - z.x).abs())
            .fold(0.0f64, f64::max);
        assert_eq!(max_dev, 0.0);
    }
}
