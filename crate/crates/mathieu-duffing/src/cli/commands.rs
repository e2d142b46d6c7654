//! Subcommand implementations: thin adapters from the run configuration to
//! the library modules, serializing results as JSON records and CSV grids.
//! Every numerical value comes straight from a module call with the
//! configured parameters.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::output::{cell, cell_opt, write_json, Csv};
use crate::averaging::{self, DEFAULT_NEWTON_MAX_ITER, DEFAULT_NEWTON_TOL};
use crate::error::Error;
use crate::floquet::{sweep_chart, tongue_boundary_bisect};
use crate::ode::State;
use crate::orbit::{compare_two_timing, convergence_study, shoot_refine};
use crate::two_timing::{
    bifurcation_scan, resonant_equilibrium, tongue_equilibria, transition_curves, SlowFlowCensus,
    TongueParams,
};

/// Runtime options shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub fixed_step: bool,
    pub quiet: bool,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn info(&self, msg: &str) {
        if !self.quiet {
            println!("{msg}");
        }
    }
}

fn write_csv_with_meta(
    ctx: &Context,
    name: &str,
    csv: Csv,
    meta: &impl Serialize,
) -> Result<PathBuf, Error> {
    let path = ctx.path(name);
    super::output::write_text(&path, &csv.into_string())?;
    let meta_path = meta_path_for(&path);
    write_json(&meta_path, meta)?;
    Ok(path)
}

fn meta_path_for(csv_path: &Path) -> PathBuf {
    let mut name = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".meta.json");
    csv_path.with_file_name(name)
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CandidateRecord {
    x0: f64,
    y0: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SignConventionRecord {
    /// "as-solved" when the positive root system wins the residual score.
    chosen: &'static str,
    candidates: [CandidateRecord; 2],
}

#[derive(Serialize)]
struct PredictRecord<'a> {
    x0_star: f64,
    y0_star: f64,
    det_jacobian: f64,
    residual_norm: f64,
    sign_convention: SignConventionRecord,
    config: &'a RunConfig,
}

pub fn cmd_predict(ctx: &Context, seed_check: bool) -> Result<(), Error> {
    let cfg = &ctx.config;
    let p = cfg.model.require_resonant()?;
    let f = cfg.forcing.build();
    let (a1, b1) = f.first_harmonic();
    let pred = averaging::predict(p.omega_n, p.alpha, a1, b1)?;

    // Independent certification: Newton on the closed-form objective from
    // the reported candidate must stay put.
    averaging::newton_root(
        |z| averaging::bifurcation_fn_closed(p.omega_n, p.alpha, a1, b1, z),
        |z| averaging::averaging_jacobian(p.omega_n, p.alpha, z),
        State::new(pred.x0_star, pred.y0_star),
        DEFAULT_NEWTON_TOL.max(pred.residual_norm),
        DEFAULT_NEWTON_MAX_ITER,
    )?;

    let record = PredictRecord {
        x0_star: pred.x0_star,
        y0_star: pred.y0_star,
        det_jacobian: pred.det_jacobian,
        residual_norm: pred.residual_norm,
        sign_convention: SignConventionRecord {
            chosen: if pred.sign_flipped { "negated" } else { "as-solved" },
            candidates: [
                CandidateRecord {
                    x0: pred.candidates[0].x0,
                    y0: pred.candidates[0].y0,
                    residual: pred.candidates[0].residual,
                },
                CandidateRecord {
                    x0: pred.candidates[1].x0,
                    y0: pred.candidates[1].y0,
                    residual: pred.candidates[1].residual,
                },
            ],
        },
        config: cfg,
    };
    let path = ctx.path("predict.json");
    write_json(&path, &record)?;

    if seed_check {
        println!(
            "sign check: as-solved ({:.6}, {:.6}) residual {:e}; negated ({:.6}, {:.6}) residual {:e}; chosen: {}",
            pred.candidates[0].x0,
            pred.candidates[0].y0,
            pred.candidates[0].residual,
            pred.candidates[1].x0,
            pred.candidates[1].y0,
            pred.candidates[1].residual,
            record.sign_convention.chosen,
        );
    }
    ctx.info(&format!(
        "predict: (x0*, y0*) = ({:.6}, {:.6}), det J = {:.6}, residual {:e} -> {}",
        pred.x0_star,
        pred.y0_star,
        pred.det_jacobian,
        pred.residual_norm,
        path.display()
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// bifurcation
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct BifurcationMeta<'a> {
    columns: &'static str,
    max_abs_diff: f64,
    config: &'a RunConfig,
}

/// State-grid axis; unlike chart axes a single point (count 1, min == max)
/// is allowed.
fn state_axis_values(axis: &super::config::AxisConfig) -> Result<Vec<f64>, Error> {
    if axis.count == 1 {
        if axis.min != axis.max {
            return Err(Error::InvalidParameter(format!(
                "a one-point axis needs min == max, got [{}, {}]",
                axis.min, axis.max
            )));
        }
        return Ok(vec![axis.min]);
    }
    Ok(axis.build()?.values())
}

pub fn cmd_bifurcation(ctx: &Context) -> Result<(), Error> {
    let cfg = &ctx.config;
    let p = cfg.model.require_resonant()?;
    let f = cfg.forcing.build();
    let (a1, b1) = f.first_harmonic();
    let x_values = state_axis_values(&cfg.bifurcation.x0)?;
    let y_values = state_axis_values(&cfg.bifurcation.y0)?;

    let mut csv = Csv::new(&["x0", "y0", "f11", "f21", "f11_quad", "f21_quad", "abs_diff"]);
    let mut max_diff = 0.0f64;
    for &x0 in &x_values {
        for &y0 in &y_values {
            let z0 = State::new(x0, y0);
            let closed = averaging::bifurcation_fn_closed(p.omega_n, p.alpha, a1, b1, z0);
            let quad =
                averaging::bifurcation_fn_quadrature(&p, &f, z0, cfg.quad_points.0)?.total;
            let diff = (closed.f11 - quad.f11)
                .abs()
                .max((closed.f21 - quad.f21).abs());
            max_diff = max_diff.max(diff);
            csv.row(&[
                cell(x0),
                cell(y0),
                cell(closed.f11),
                cell(closed.f21),
                cell(quad.f11),
                cell(quad.f21),
                cell(diff),
            ]);
        }
    }

    let path = write_csv_with_meta(
        ctx,
        "bifurcation.csv",
        csv,
        &BifurcationMeta {
            columns: "x0,y0,f11,f21,f11_quad,f21_quad,abs_diff",
            max_abs_diff: max_diff,
            config: cfg,
        },
    )?;
    ctx.info(&format!(
        "bifurcation: {} x {} grid, max |closed - quadrature| = {max_diff:e} -> {}",
        x_values.len(),
        y_values.len(),
        path.display()
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// shoot
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OrbitRecord<'a> {
    z_star: XY,
    period: f64,
    residual: f64,
    iterations: usize,
    monodromy: [[f64; 2]; 2],
    multipliers: [ReIm; 2],
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct XY {
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct ReIm {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ShootFailureRecord<'a> {
    error: String,
    best_iterate: Option<XY>,
    residual: Option<f64>,
    config: &'a RunConfig,
}

pub fn cmd_shoot(ctx: &Context) -> Result<(), Error> {
    let cfg = &ctx.config;
    let p = cfg.model.require_resonant()?;
    if p.epsilon == 0.0 {
        return Err(Error::InvalidParameter(
            "shoot requires model.epsilon != 0".into(),
        ));
    }
    let f = cfg.forcing.build();
    let z_init = match cfg.shoot.z_init {
        Some([x, y]) => State::new(x, y),
        None => {
            let (a1, b1) = f.first_harmonic();
            let (x0, y0) = averaging::predicted_zero(p.omega_n, p.alpha, a1, b1)?;
            State::new(x0, y0)
        }
    };

    match shoot_refine(&p, &f, z_init, cfg.shoot.tol, cfg.shoot.max_iter) {
        Ok(orbit) => {
            let m = orbit.monodromy;
            let record = OrbitRecord {
                z_star: XY {
                    x: orbit.z_star.x,
                    y: orbit.z_star.y,
                },
                period: orbit.period,
                residual: orbit.residual,
                iterations: orbit.iterations,
                monodromy: [[m.m11, m.m12], [m.m21, m.m22]],
                multipliers: [
                    ReIm {
                        re: orbit.multipliers.0.re,
                        im: orbit.multipliers.0.im,
                    },
                    ReIm {
                        re: orbit.multipliers.1.re,
                        im: orbit.multipliers.1.im,
                    },
                ],
                config: cfg,
            };
            let path = ctx.path("orbit.json");
            write_json(&path, &record)?;
            ctx.info(&format!(
                "shoot: z* = ({:.8}, {:.8}), residual {:e} after {} iterations -> {}",
                orbit.z_star.x,
                orbit.z_star.y,
                orbit.residual,
                orbit.iterations,
                path.display()
            ));
            Ok(())
        }
        Err(e) => {
            // Retain the failure payload before surfacing the error.
            let record = ShootFailureRecord {
                error: e.to_string(),
                best_iterate: e.best_iterate().map(|(x, y, _)| XY { x, y }),
                residual: e.best_iterate().map(|(_, _, r)| r),
                config: cfg,
            };
            write_json(&ctx.path("orbit_failure.json"), &record)?;
            Err(e)
        }
    }
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ConvergeMeta<'a> {
    columns: &'static str,
    slope: Option<f64>,
    z_pred: XY,
    max_two_timing_deviation: Option<f64>,
    config: &'a RunConfig,
}

pub fn cmd_converge(ctx: &Context) -> Result<(), Error> {
    let cfg = &ctx.config;
    let p = cfg.model.require_resonant()?;
    let f = cfg.forcing.build();
    let (a1, b1) = f.first_harmonic();
    let (x0, y0) = averaging::predicted_zero(p.omega_n, p.alpha, a1, b1)?;
    let z_pred = State::new(x0, y0);

    let study = convergence_study(&p, &f, z_pred, &cfg.converge.eps_list, cfg.converge.tol)?;
    if study.slope.is_none() {
        eprintln!("warning: fewer than two successful rows; slope column left empty");
    }

    // Deviation from the zeroth-order solution at the smallest epsilon that
    // produced an orbit.
    let eq = resonant_equilibrium(p.omega_n, p.alpha, a1, b1)?;
    let mut two_timing_dev = None;
    for row in study.rows.iter().rev() {
        if row.error.is_some() {
            let p_row = crate::ode::ModelParams {
                epsilon: row.epsilon,
                ..p
            };
            if let Ok(orbit) =
                shoot_refine(&p_row, &f, z_pred, cfg.converge.tol, cfg.shoot.max_iter)
            {
                two_timing_dev =
                    Some(compare_two_timing(&p_row, &f, &orbit, &eq, 128, 1e-12)?);
            }
            break;
        }
    }

    let mut csv = Csv::new(&["epsilon", "error", "slope"]);
    for row in &study.rows {
        csv.row(&[cell(row.epsilon), cell_opt(row.error), cell_opt(study.slope)]);
        if let Some(failure) = &row.failure {
            eprintln!("warning: eps {}: {}", row.epsilon, failure);
        }
    }
    let path = write_csv_with_meta(
        ctx,
        "convergence.csv",
        csv,
        &ConvergeMeta {
            columns: "epsilon,error,slope",
            slope: study.slope,
            z_pred: XY {
                x: z_pred.x,
                y: z_pred.y,
            },
            max_two_timing_deviation: two_timing_dev,
            config: cfg,
        },
    )?;
    ctx.info(&format!(
        "converge: {} rows, log-log slope {:?} -> {}",
        study.rows.len(),
        study.slope,
        path.display()
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// chart
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ChartMeta<'a> {
    columns: &'static str,
    axes: ChartAxes,
    omega_p: f64,
    mode: &'static str,
    steps_per_period: usize,
    cells: usize,
    failed_cells: usize,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct ChartAxes {
    x: &'static str,
    y: &'static str,
}

pub fn cmd_chart(ctx: &Context) -> Result<(), Error> {
    let cfg = &ctx.config;
    let delta_axis = cfg.chart.delta.build()?;
    let eps_axis = cfg.chart.epsilon.build()?;
    let omega_p = cfg.model.omega_p;
    let method = cfg.integrator.monodromy_method(ctx.fixed_step);

    let grid = sweep_chart(delta_axis, eps_axis, omega_p, cfg.chart.margin, method)?;

    let mut csv = Csv::new(&["delta", "epsilon", "trace", "verdict"]);
    let mut failed = 0usize;
    for c in &grid.cells {
        if c.error.is_some() {
            failed += 1;
        }
        csv.row(&[
            cell(c.delta),
            cell(c.epsilon),
            cell(c.trace),
            c.verdict.as_str().to_string(),
        ]);
    }
    let path = write_csv_with_meta(
        ctx,
        "chart.csv",
        csv,
        &ChartMeta {
            columns: "delta,epsilon,trace,verdict",
            axes: ChartAxes {
                x: "delta = omega_n^2",
                y: "epsilon",
            },
            omega_p,
            mode: match method {
                crate::ode::IntegrationMethod::FixedStep { .. } => "fixed-step",
                crate::ode::IntegrationMethod::Adaptive { .. } => "adaptive",
            },
            steps_per_period: cfg.integrator.steps_per_period,
            cells: grid.cells.len(),
            failed_cells: failed,
            config: cfg,
        },
    )?;
    ctx.info(&format!(
        "chart: {} cells ({} failed) -> {}",
        grid.cells.len(),
        failed,
        path.display()
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// transition
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct TransitionMeta<'a> {
    columns: &'static str,
    bisected: bool,
    config: &'a RunConfig,
}

pub fn cmd_transition(ctx: &Context) -> Result<(), Error> {
    let cfg = &ctx.config;
    let omega_p = cfg.model.omega_p;
    if !(omega_p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "omega_p must be positive, got {omega_p}"
        )));
    }
    for &eps in &cfg.transition.eps_values {
        if eps < 0.0 || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transition eps values must be finite and >= 0, got {eps}"
            )));
        }
    }

    let mut curves = Csv::new(&["epsilon", "delta_minus", "delta_plus"]);
    for &eps in &cfg.transition.eps_values {
        let (lo, hi) = transition_curves(omega_p, eps);
        curves.row(&[cell(eps), cell(lo), cell(hi)]);
    }
    let path = write_csv_with_meta(
        ctx,
        "transition_curves.csv",
        curves,
        &TransitionMeta {
            columns: "epsilon,delta_minus,delta_plus",
            bisected: cfg.transition.bisect,
            config: cfg,
        },
    )?;
    ctx.info(&format!("transition: analytic curves -> {}", path.display()));

    if cfg.transition.bisect {
        let method = cfg.integrator.monodromy_method(ctx.fixed_step);
        let tip = omega_p * omega_p / 4.0;
        let mut bisected = Csv::new(&["epsilon", "delta_minus", "delta_plus"]);
        for &eps in &cfg.transition.eps_values {
            let pad = eps.max(0.01 * tip.max(1.0));
            let lo = tongue_boundary_bisect(
                eps,
                omega_p,
                (tip - pad, tip),
                cfg.transition.bisect_tol,
                method,
            )?;
            let hi = tongue_boundary_bisect(
                eps,
                omega_p,
                (tip, tip + pad),
                cfg.transition.bisect_tol,
                method,
            )?;
            bisected.row(&[cell(eps), cell(lo), cell(hi)]);
        }
        let path = ctx.path("transition_bisected.csv");
        super::output::write_text(&path, &bisected.into_string())?;
        ctx.info(&format!("transition: bisected boundaries -> {}", path.display()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// slowflow
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EquilibriumRecord {
    m: f64,
    n: f64,
    amplitude: f64,
    phase: f64,
    det_j: f64,
    classification: &'static str,
}

#[derive(Serialize)]
struct EventRecord {
    omega_1: f64,
    kind: &'static str,
    count_before: usize,
    count_after: usize,
}

#[derive(Serialize)]
struct SlowflowRecord<'a> {
    omega_1: f64,
    census: &'static str,
    degenerate_boundary: Option<f64>,
    regime: Option<&'static str>,
    mirrored_convention: Option<bool>,
    equilibria: Vec<EquilibriumRecord>,
    events: Vec<EventRecord>,
    config: &'a RunConfig,
}

pub fn cmd_slowflow(ctx: &Context) -> Result<(), Error> {
    let cfg = &ctx.config;
    let tp = TongueParams::new(
        cfg.model.omega_p,
        cfg.slowflow.omega_1,
        cfg.model.alpha,
        cfg.model.epsilon,
    )?;

    let (census, degenerate_boundary, regime, mirrored, equilibria) =
        match tongue_equilibria(&tp) {
            SlowFlowCensus::Census(report) => {
                let entries = report
                    .entries
                    .iter()
                    .map(|e| {
                        let polar = e.point.to_polar();
                        EquilibriumRecord {
                            m: e.point.m,
                            n: e.point.n,
                            amplitude: polar.amplitude,
                            phase: polar.phase,
                            det_j: e.det_j,
                            classification: e.classification.as_str(),
                        }
                    })
                    .collect();
                (
                    "ok",
                    None,
                    Some(report.regime.as_str()),
                    Some(report.mirrored_convention),
                    entries,
                )
            }
            SlowFlowCensus::DegenerateBoundary { boundary, .. } => {
                ("degenerate-boundary", Some(boundary), None, None, vec![])
            }
        };

    let events = match &cfg.slowflow.sweep {
        Some(axis) => {
            let grid = axis.build()?.values();
            bifurcation_scan(tp.alpha, tp.omega_p, &grid)?
                .into_iter()
                .map(|e| EventRecord {
                    omega_1: e.omega_1,
                    kind: e.kind.as_str(),
                    count_before: e.count_before,
                    count_after: e.count_after,
                })
                .collect()
        }
        None => vec![],
    };

    let record = SlowflowRecord {
        omega_1: tp.omega_1,
        census,
        degenerate_boundary,
        regime,
        mirrored_convention: mirrored,
        equilibria,
        events,
        config: cfg,
    };
    let path = ctx.path("slowflow.json");
    write_json(&path, &record)?;
    ctx.info(&format!(
        "slowflow: census {} with {} equilibria, {} events -> {}",
        record.census,
        record.equilibria.len(),
        record.events.len(),
        path.display()
    ));

    if let Some(tr) = &cfg.slowflow.trajectory {
        if tr.samples == 0 || !(tr.t1_max > 0.0) {
            return Err(Error::InvalidParameter(
                "trajectory needs samples > 0 and t1_max > 0".into(),
            ));
        }
        let times: Vec<f64> = (1..=tr.samples)
            .map(|i| tr.t1_max * i as f64 / tr.samples as f64)
            .collect();
        let rhs = |_: f64, s: State| {
            let (dm, dn) = crate::two_timing::tongue_slow_rhs_cartesian(
                &tp,
                &crate::two_timing::CartesianSlowState::new(s.x, s.y),
            );
            State::new(dm, dn)
        };
        let states = crate::ode::flow_samples(
            rhs,
            State::new(tr.m0, tr.n0),
            0.0,
            &times,
            cfg.integrator.tol,
        )?;
        let mut csv = Csv::new(&["t1", "m", "n"]);
        csv.row(&[cell(0.0), cell(tr.m0), cell(tr.n0)]);
        for (t, s) in times.iter().zip(&states) {
            csv.row(&[cell(*t), cell(s.x), cell(s.y)]);
        }
        let path = ctx.path("slowflow_trajectory.csv");
        super::output::write_text(&path, &csv.into_string())?;
        ctx.info(&format!("slowflow: trajectory -> {}", path.display()));
    }
    Ok(())
}
