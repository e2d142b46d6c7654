//! Acceptance suite: one test per verification criterion, each printing a
//! single pass/fail line (run with `--nocapture` to see them). Tolerances
//! are pinned in the assertions.

use std::f64::consts::PI;
use std::process::Command;

use mathieu_duffing::averaging::{
    averaging_jacobian, bifurcation_fn_closed, bifurcation_fn_quadrature,
    finite_difference_jacobian, jacobian_det_closed, newton_root_fd, predicted_zero,
};
use mathieu_duffing::floquet::{default_sweep_method, sweep_chart, tongue_boundary_bisect, AxisSpec};
use mathieu_duffing::ode::{flow, rhs_full, ForcingSeries, ModelParams, State};
use mathieu_duffing::orbit::{compare_two_timing, convergence_study, shoot_refine};
use mathieu_duffing::two_timing::{
    bifurcation_scan, resonant_equilibrium, tongue_equilibria, tongue_jacobian,
    tongue_slow_rhs_cartesian, tongue_slow_rhs_polar, transition_curves, CartesianSlowState,
    Classification, PitchforkKind, SlowFlowCensus, SlowState, TongueParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn random_case(rng: &mut ChaCha8Rng, i: usize) -> (f64, f64, f64, f64, State) {
    let omega = if i.is_multiple_of(2) { 1.0 } else { 2.0 };
    let alpha = [1.0, -1.0, 0.5][i % 3];
    let a1 = rng.gen_range(-2.0..2.0);
    let b1 = rng.gen_range(-2.0..2.0);
    let z0 = State::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    (omega, alpha, a1, b1, z0)
}

#[test]
fn criterion_01_averaging_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_total = 0.0f64;
    let mut max_m3 = 0.0f64;
    let mut max_m1 = 0.0f64;
    for i in 0..20 {
        let (omega, alpha, a1, b1, z0) = random_case(&mut rng, i);
        let p = ModelParams::resonant(omega, 1e-3, alpha).unwrap();
        let f = ForcingSeries::new(vec![a1], vec![b1]);
        let closed = bifurcation_fn_closed(omega, alpha, a1, b1, z0);
        let quad = bifurcation_fn_quadrature(&p, &f, z0, 2048).unwrap();
        max_total = max_total
            .max((quad.total.f11 - closed.f11).abs())
            .max((quad.total.f21 - closed.f21).abs());
        max_m3 = max_m3.max(quad.m3.f11.abs()).max(quad.m3.f21.abs());
        // Forcing part projects onto (pi/w^2) (-b1, w a1).
        let m1_exp = (PI / (omega * omega) * -b1, PI / omega * a1);
        max_m1 = max_m1
            .max((quad.m1.f11 - m1_exp.0).abs())
            .max((quad.m1.f21 - m1_exp.1).abs());
    }
    let pass = max_total <= 1e-9 && max_m3 <= 1e-10 && max_m1 <= 1e-10;
    report(
        "01 averaging equivalence",
        pass,
        &format!("20 cases: |closed-quad| {max_total:.2e}, |m3| {max_m3:.2e}, |m1 error| {max_m1:.2e}"),
    );
}

#[test]
fn criterion_02_predicted_zero() {
    let omega = 1.0;
    let alpha = 1.0;
    let (a1, b1) = (1.0, 0.0);
    let (x0, y0) = predicted_zero(omega, alpha, a1, b1).unwrap();
    let residual = bifurcation_fn_closed(omega, alpha, a1, b1, State::new(x0, y0)).norm();

    // Independent route: Newton with finite differences on the quadrature
    // objective, from several perturbed starts.
    let p = ModelParams::resonant(omega, 1e-3, alpha).unwrap();
    let f = ForcingSeries::new(vec![a1], vec![b1]);
    let objective =
        |z: State| bifurcation_fn_quadrature(&p, &f, z, 2048).expect("resonant").total;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut max_root_dist = 0.0f64;
    for _ in 0..5 {
        let guess = State::new(
            x0 + rng.gen_range(-0.3..0.3),
            y0 + rng.gen_range(-0.3..0.3),
        );
        let root = newton_root_fd(objective, guess, 1e-12, 50, 1e-6).expect("Newton converges");
        max_root_dist = max_root_dist.max((root - State::new(x0, y0)).norm());
    }

    // Harmonics above the first do not move the averaged function.
    let mut rich_a = vec![a1];
    let mut rich_b = vec![b1];
    for n in 2..=8 {
        rich_a.push(0.5 + 0.1 * n as f64);
        rich_b.push(-0.3 + 0.2 * n as f64);
    }
    let rich = ForcingSeries::new(rich_a, rich_b);
    let mut max_shift = 0.0f64;
    for z0 in [State::new(x0, y0), State::new(0.3, -0.8), State::new(-1.2, 0.4)] {
        let base = bifurcation_fn_quadrature(&p, &f, z0, 2048).unwrap().total;
        let full = bifurcation_fn_quadrature(&p, &rich, z0, 2048).unwrap().total;
        max_shift = max_shift
            .max((base.f11 - full.f11).abs())
            .max((base.f21 - full.f21).abs());
    }

    let pass = residual <= 1e-10 && max_root_dist <= 1e-10 && max_shift <= 1e-9;
    report(
        "02 predicted zero",
        pass,
        &format!(
            "residual {residual:.2e}, Newton recovery {max_root_dist:.2e}, harmonic shift {max_shift:.2e}"
        ),
    );
}

#[test]
fn criterion_03_nondegeneracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut max_fd_rel = 0.0f64;
    let mut max_det_rel = 0.0f64;
    for i in 0..20 {
        let (omega, alpha, a1, b1, z0) = random_case(&mut rng, i);
        let analytic = averaging_jacobian(omega, alpha, z0);
        let fd = finite_difference_jacobian(
            &|z| bifurcation_fn_closed(omega, alpha, a1, b1, z),
            z0,
            1e-5,
        );
        let scale = analytic.max_abs().max(1.0);
        for (a, b) in [
            (analytic.m11, fd.m11),
            (analytic.m12, fd.m12),
            (analytic.m21, fd.m21),
            (analytic.m22, fd.m22),
        ] {
            max_fd_rel = max_fd_rel.max((a - b).abs() / scale);
        }
        let det = analytic.det();
        let closed = jacobian_det_closed(omega, alpha, z0);
        if closed != 0.0 {
            max_det_rel = max_det_rel.max((det - closed).abs() / closed.abs());
        }
    }
    // Positivity at the root of the canonical case.
    let (x0, y0) = predicted_zero(1.0, 1.0, 1.0, 0.0).unwrap();
    let det_at_root = jacobian_det_closed(1.0, 1.0, State::new(x0, y0));

    let pass = max_fd_rel <= 1e-5 && max_det_rel <= 1e-10 && det_at_root > 0.0;
    report(
        "03 nondegeneracy",
        pass,
        &format!(
            "FD deviation {max_fd_rel:.2e}, det rel error {max_det_rel:.2e}, det at root {det_at_root:.4}"
        ),
    );
}

#[test]
fn criterion_04_shooting_convergence() {
    let template = ModelParams::resonant(1.0, 1e-2, 1.0).unwrap();
    let f = ForcingSeries::cosine(1.0);
    let (x0, y0) = predicted_zero(1.0, 1.0, 1.0, 0.0).unwrap();
    let z_pred = State::new(x0, y0);

    let eps_list = [1e-2, 5e-3, 2.5e-3];
    let study = convergence_study(&template, &f, z_pred, &eps_list, 1e-10).unwrap();
    let all_converged = study
        .rows
        .iter()
        .all(|r| r.residual.map(|res| res <= 1e-10).unwrap_or(false));
    let slope = study.slope.unwrap_or(f64::NAN);

    // Re-closure over five periods at the largest epsilon.
    let orbit = shoot_refine(&template, &f, z_pred, 1e-10, 25).unwrap();
    let z5 = flow(
        |t, s| rhs_full(&template, &f, t, s),
        orbit.z_star,
        0.0,
        5.0 * orbit.period,
        1e-12,
    )
    .unwrap();
    let reclose = (z5 - orbit.z_star).norm();

    let pass = all_converged && (slope - 1.0).abs() <= 0.3 && reclose <= 1e-7;
    report(
        "04 shooting convergence",
        pass,
        &format!("residuals <= 1e-10: {all_converged}, slope {slope:.4}, 5T reclose {reclose:.2e}"),
    );
}

#[test]
fn criterion_05_two_timing_approximation() {
    let f = ForcingSeries::cosine(1.0);
    let eq = resonant_equilibrium(1.0, 1.0, 1.0, 0.0).unwrap();
    let (x0, y0) = predicted_zero(1.0, 1.0, 1.0, 0.0).unwrap();
    let z_pred = State::new(x0, y0);

    let mut constants = Vec::new();
    for eps in [1e-2, 1e-3] {
        let p = ModelParams::resonant(1.0, eps, 1.0).unwrap();
        let orbit = shoot_refine(&p, &f, z_pred, 1e-10, 25).unwrap();
        let dev = compare_two_timing(&p, &f, &orbit, &eq, 256, 1e-12).unwrap();
        constants.push(dev / eps);
    }
    let ratio = constants[0] / constants[1];
    let pass = (1.0 / 3.0..=3.0).contains(&ratio);
    report(
        "05 two-timing approximation",
        pass,
        &format!(
            "C(1e-2) = {:.4}, C(1e-3) = {:.4}, ratio {ratio:.3} within factor 3",
            constants[0], constants[1]
        ),
    );
}

#[test]
fn criterion_06_floquet_chart() {
    let omega_p = 2.0;
    let grid = sweep_chart(
        AxisSpec::new(0.0, 2.5, 101).unwrap(),
        AxisSpec::new(0.0, 0.5, 21).unwrap(),
        omega_p,
        1e-9,
        default_sweep_method(),
    )
    .unwrap();
    let mut max_det_dev = 0.0f64;
    for c in &grid.cells {
        max_det_dev = max_det_dev.max((c.det - 1.0).abs());
    }
    let mut max_trace_dev = 0.0f64;
    for c in grid.row(0) {
        let expected = 2.0 * (2.0 * PI * c.delta.sqrt() / omega_p).cos();
        max_trace_dev = max_trace_dev.max((c.trace - expected).abs());
    }
    let pass = max_det_dev <= 1e-9 && max_trace_dev <= 1e-9;
    report(
        "06 floquet chart",
        pass,
        &format!(
            "101x21 cells: |det-1| {max_det_dev:.2e}, eps=0 trace deviation {max_trace_dev:.2e}"
        ),
    );
}

#[test]
fn criterion_07_transition_curves() {
    let omega_p = 2.0;
    let method = default_sweep_method();
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for eps in [0.05, 0.1, 0.2] {
        let (curve_lo, curve_hi) = transition_curves(omega_p, eps);
        let lo = tongue_boundary_bisect(eps, omega_p, (1.0 - eps, 1.0), 1e-10, method).unwrap();
        let hi = tongue_boundary_bisect(eps, omega_p, (1.0, 1.0 + eps), 1e-10, method).unwrap();
        let dev = (lo - curve_lo).abs().max((hi - curve_hi).abs());
        worst = worst.max(dev / (eps * eps));
        detail.push_str(&format!("eps {eps}: dev/eps^2 = {:.3}; ", dev / (eps * eps)));
    }
    let pass = worst <= 1.0;
    report("07 transition curves", pass, detail.trim_end_matches("; "));
}

#[test]
fn criterion_08_slow_flow_census() {
    let expected: [(f64, usize, Vec<Classification>); 3] = [
        (-1.0, 1, vec![Classification::Center]),
        (
            0.0,
            3,
            vec![
                Classification::Saddle,
                Classification::Center,
                Classification::Center,
            ],
        ),
        (
            1.0,
            5,
            vec![
                Classification::Center,
                Classification::Center,
                Classification::Center,
                Classification::Saddle,
                Classification::Saddle,
            ],
        ),
    ];
    let mut max_trace = 0.0f64;
    let mut max_rhs = 0.0f64;
    let mut structure_ok = true;
    for (omega_1, count, labels) in &expected {
        let tp = TongueParams::new(2.0, *omega_1, -1.0, 0.1).unwrap();
        match tongue_equilibria(&tp) {
            SlowFlowCensus::Census(report) => {
                structure_ok &= report.entries.len() == *count;
                let found: Vec<Classification> =
                    report.entries.iter().map(|e| e.classification).collect();
                structure_ok &= &found == labels;
                for e in &report.entries {
                    max_trace = max_trace.max(tongue_jacobian(&tp, &e.point).trace().abs());
                    let (dm, dn) = tongue_slow_rhs_cartesian(&tp, &e.point);
                    max_rhs = max_rhs.max(dm.hypot(dn));
                }
            }
            SlowFlowCensus::DegenerateBoundary { .. } => structure_ok = false,
        }
    }

    let grid: Vec<f64> = (0..=40).map(|i| -1.0 + 0.05 * i as f64).collect();
    let events = bifurcation_scan(-1.0, 2.0, &grid).unwrap();
    let events_ok = events.len() == 2
        && events[0].omega_1 == -0.5
        && events[0].kind == PitchforkKind::Supercritical
        && events[1].omega_1 == 0.5
        && events[1].kind == PitchforkKind::Subcritical;

    let pass = structure_ok && events_ok && max_trace <= 1e-12 && max_rhs <= 1e-12;
    report(
        "08 slow-flow census",
        pass,
        &format!(
            "counts/labels ok: {structure_ok}, events ok: {events_ok}, |trace| {max_trace:.2e}, |rhs| {max_rhs:.2e}"
        ),
    );
}

#[test]
fn criterion_09_cross_module_consistency() {
    // Two-timing equilibrium against the averaging prediction.
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut max_pred_dev = 0.0f64;
    for _ in 0..20 {
        let omega = rng.gen_range(0.5..2.5);
        let alpha = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let a1: f64 = rng.gen_range(-2.0..2.0);
        let b1: f64 = rng.gen_range(-2.0..2.0);
        if a1.abs() < 1e-3 && b1.abs() < 1e-3 {
            continue;
        }
        let eq = resonant_equilibrium(omega, alpha, a1, b1).unwrap();
        let (x0, y0) = predicted_zero(omega, alpha, a1, b1).unwrap();
        max_pred_dev = max_pred_dev
            .max((eq.x0_star - x0).abs() / (1.0 + x0.abs()))
            .max((eq.y0_star - y0).abs() / (1.0 + y0.abs()));
    }

    // Polar/Cartesian conjugacy over slow time 10.
    let mut max_conj_dev = 0.0f64;
    for _ in 0..5 {
        let tp = TongueParams::new(2.0, rng.gen_range(-1.0..1.0), -1.0, 0.1).unwrap();
        let s0 = SlowState::new(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let c0 = s0.to_cartesian();
        let polar_end = flow(
            |_, s: State| {
                let (da, dpsi) = tongue_slow_rhs_polar(
                    &tp,
                    &SlowState {
                        amplitude: s.x,
                        phase: s.y,
                    },
                );
                State::new(da, dpsi)
            },
            State::new(s0.amplitude, s0.phase),
            0.0,
            10.0,
            1e-12,
        )
        .unwrap();
        let cart_end = flow(
            |_, s: State| {
                let (dm, dn) =
                    tongue_slow_rhs_cartesian(&tp, &CartesianSlowState::new(s.x, s.y));
                State::new(dm, dn)
            },
            State::new(c0.m, c0.n),
            0.0,
            10.0,
            1e-12,
        )
        .unwrap();
        let pushed = SlowState::new(polar_end.x, polar_end.y).to_cartesian();
        max_conj_dev = max_conj_dev
            .max((cart_end.x - pushed.m).abs())
            .max((cart_end.y - pushed.n).abs());
    }

    let pass = max_pred_dev <= 1e-12 && max_conj_dev <= 1e-8;
    report(
        "09 cross-module consistency",
        pass,
        &format!("prediction deviation {max_pred_dev:.2e}, conjugacy deviation {max_conj_dev:.2e}"),
    );
}

#[test]
fn criterion_10_deterministic_outputs() {
    let bin = env!("CARGO_BIN_EXE_mathieu-duffing");
    let work = tempfile::tempdir().unwrap();
    let config_path = work.path().join("config.json");
    std::fs::write(
        &config_path,
        r#"{
            "model": {"omega_p": 2.0},
            "chart": {"delta": {"min": 0.5, "max": 1.5, "count": 41},
                      "epsilon": {"min": 0.0, "max": 0.3, "count": 7}},
            "transition": {"eps_values": [0.0, 0.05, 0.1, 0.2]}
        }"#,
    )
    .unwrap();

    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for run in 0..2 {
        let out_dir = work.path().join(format!("run{run}"));
        for sub in ["chart", "transition"] {
            let status = Command::new(bin)
                .args([
                    sub,
                    "--fixed-step",
                    "--quiet",
                    "--config",
                    config_path.to_str().unwrap(),
                    "--out",
                    out_dir.to_str().unwrap(),
                ])
                .status()
                .expect("binary runs");
            assert!(status.success(), "{sub} run {run} failed");
        }
        let mut files = Vec::new();
        for name in ["chart.csv", "transition_curves.csv", "transition_bisected.csv"] {
            files.push((name.to_string(), std::fs::read(out_dir.join(name)).unwrap()));
        }
        outputs.push(files);
    }
    let identical = outputs[0] == outputs[1];
    let total: usize = outputs[0].iter().map(|(_, b)| b.len()).sum();
    report(
        "10 deterministic outputs",
        identical,
        &format!("chart + curve CSVs byte-identical across reruns ({total} bytes compared)"),
    );
}
