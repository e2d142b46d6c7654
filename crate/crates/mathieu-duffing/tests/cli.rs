//! End-to-end tests of the command-line binary: exit codes, config
//! round-trips, and agreement of CLI output with direct library calls.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mathieu_duffing::averaging;
use mathieu_duffing::ode::State;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mathieu-duffing")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn run_with_config(sub: &str, dir: &Path, config: &str) -> Output {
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    run(&[
        sub,
        "--quiet",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn predict_defaults_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["predict", "--quiet", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("predict.json")).unwrap())
            .unwrap();
    let (x0, y0) = averaging::predicted_zero(1.0, 1.0, 1.0, 0.0).unwrap();
    assert_eq!(record["x0_star"].as_f64().unwrap(), x0);
    assert_eq!(record["y0_star"].as_f64().unwrap(), y0);
    assert_eq!(
        record["det_jacobian"].as_f64().unwrap(),
        averaging::jacobian_det_closed(1.0, 1.0, State::new(x0, y0))
    );
    assert_eq!(record["sign_convention"]["chosen"], "as-solved");
}

#[test]
fn predict_rejects_degenerate_hypotheses_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config("predict", dir.path(), r#"{"model": {"alpha": 0.0}}"#);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("alpha"), "message should name the hypothesis: {msg}");

    let out = run_with_config(
        "predict",
        dir.path(),
        r#"{"forcing": {"a": [0.0], "b": [0.0]}}"#,
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown key.
    let out = run_with_config("predict", dir.path(), r#"{"stray": 1}"#);
    assert_eq!(out.status.code(), Some(2));
    // Non-resonant parameters for a resonant command.
    let out = run_with_config("predict", dir.path(), r#"{"model": {"omega_p": 2.0}}"#);
    assert_eq!(out.status.code(), Some(2));
    // Shooting at epsilon = 0.
    let out = run_with_config("shoot", dir.path(), r#"{"model": {"epsilon": 0.0}}"#);
    assert_eq!(out.status.code(), Some(2));
    // Invalid chart grid.
    let out = run_with_config(
        "chart",
        dir.path(),
        r#"{"chart": {"delta": {"min": 1.0, "max": 0.0, "count": 5}}}"#,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shoot_non_convergence_exits_4_and_keeps_payload() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "shoot",
        dir.path(),
        r#"{"shoot": {"z_init": [100.0, 0.0]}}"#,
    );
    assert_eq!(out.status.code(), Some(4));
    let payload: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("orbit_failure.json")).unwrap())
            .unwrap();
    assert!(payload["error"].as_str().unwrap().contains("convergence"));
    assert!(payload["best_iterate"]["x"].as_f64().is_some());
}

#[test]
fn converge_single_eps_leaves_slope_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config("converge", dir.path(), r#"{"converge": {"eps_list": [0.01]}}"#);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "epsilon,error,slope");
    let row = lines.next().unwrap();
    assert!(row.ends_with(','), "slope cell should be empty: {row}");
}

#[test]
fn converge_rejects_zero_eps_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "converge",
        dir.path(),
        r#"{"converge": {"eps_list": [0.01, 0.0]}}"#,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bifurcation_single_point_grid_matches_direct_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "bifurcation",
        dir.path(),
        r#"{"bifurcation": {
            "x0": {"min": 0.7, "max": 0.7, "count": 1},
            "y0": {"min": -0.4, "max": -0.4, "count": 1}
        }}"#,
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("bifurcation.csv")).unwrap();
    let mut lines = csv.lines();
    lines.next();
    let cells: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    let direct = averaging::bifurcation_fn_closed(1.0, 1.0, 1.0, 0.0, State::new(0.7, -0.4));
    assert_eq!(cells[0], 0.7);
    assert_eq!(cells[1], -0.4);
    assert_eq!(cells[2], direct.f11);
    assert_eq!(cells[3], direct.f21);
    assert!(cells[6] <= 1e-9, "closed vs quadrature diff {}", cells[6]);
    assert!(lines.next().is_none(), "exactly one data row expected");
}

#[test]
fn emitted_config_echo_reproduces_outputs() {
    let dir1 = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "predict",
        dir1.path(),
        r#"{"model": {"epsilon": 0.02, "alpha": -1.0}, "forcing": {"a": [0.5], "b": [0.25]}}"#,
    );
    assert!(out.status.success());
    let first = fs::read_to_string(dir1.path().join("predict.json")).unwrap();
    let record: serde_json::Value = serde_json::from_str(&first).unwrap();

    // Replay the fully-resolved config echoed in the record.
    let dir2 = tempfile::tempdir().unwrap();
    let echo = serde_json::to_string(&record["config"]).unwrap();
    let out = run_with_config("predict", dir2.path(), &echo);
    assert!(out.status.success());
    let second = fs::read_to_string(dir2.path().join("predict.json")).unwrap();
    assert_eq!(first, second, "replay of the config echo must reproduce the record");
}

#[test]
fn transition_curves_at_zero_eps_collapse_to_tip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "transition",
        dir.path(),
        r#"{"model": {"omega_p": 2.0}, "transition": {"eps_values": [0.0], "bisect": false}}"#,
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("transition_curves.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cells[1], 1.0);
    assert_eq!(cells[2], 1.0);
    assert!(!dir.path().join("transition_bisected.csv").exists());
}

#[test]
fn slowflow_reports_census_and_degenerate_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "slowflow",
        dir.path(),
        r#"{"model": {"omega_p": 2.0, "alpha": -1.0}, "slowflow": {"omega_1": 1.0}}"#,
    );
    assert!(out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("slowflow.json")).unwrap())
            .unwrap();
    assert_eq!(record["census"], "ok");
    assert_eq!(record["regime"], "above-tongue");
    let labels: Vec<&str> = record["equilibria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["classification"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["center", "center", "center", "saddle", "saddle"]);
    let events = record["events"].as_array().unwrap();
    assert_eq!(events.len(), 2);
    assert_eq!(events[0]["kind"], "supercritical");
    assert_eq!(events[1]["kind"], "subcritical");

    // Exactly on a boundary: degenerate marker, still exit 0.
    let out = run_with_config(
        "slowflow",
        dir.path(),
        r#"{"model": {"omega_p": 2.0, "alpha": -1.0},
            "slowflow": {"omega_1": 0.5, "sweep": null}}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("slowflow.json")).unwrap())
            .unwrap();
    assert_eq!(record["census"], "degenerate-boundary");
    assert_eq!(record["degenerate_boundary"].as_f64(), Some(0.5));
    assert!(record["equilibria"].as_array().unwrap().is_empty());
}

#[test]
fn slowflow_trajectory_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "slowflow",
        dir.path(),
        r#"{"model": {"omega_p": 2.0, "alpha": -1.0},
            "slowflow": {"omega_1": 0.0, "sweep": null,
                         "trajectory": {"m0": 0.9, "n0": 0.0, "t1_max": 10.0, "samples": 40}}}"#,
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("slowflow_trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t1,m,n");
    assert_eq!(csv.lines().count(), 42); // header + initial point + 40 samples
}

#[test]
fn chart_verdict_flips_across_first_tongue() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_with_config(
        "chart",
        dir.path(),
        r#"{"model": {"omega_p": 2.0},
            "chart": {"delta": {"min": 0.9, "max": 1.1, "count": 3},
                      "epsilon": {"min": 0.1, "max": 0.2, "count": 2}}}"#,
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("chart.csv")).unwrap();
    let verdicts: Vec<&str> = csv
        .lines()
        .skip(1)
        .take(3)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(verdicts, ["stable", "unstable", "stable"]);
}
