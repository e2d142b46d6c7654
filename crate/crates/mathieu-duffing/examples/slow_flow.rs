//! Walk the first-tongue slow flow through its three detuning regimes:
//! equilibrium census with center/saddle classification, pitchfork events
//! along a detuning sweep, and one trajectory circling a center.
//!
//! ```bash
//! cargo run --example slow_flow
//! ```

use mathieu_duffing::ode::{flow_samples, State};
use mathieu_duffing::two_timing::{
    bifurcation_scan, tongue_equilibria, tongue_slow_rhs_cartesian, CartesianSlowState,
    SlowFlowCensus, TongueParams,
};

fn main() {
    let omega_p = 2.0;
    let alpha = -1.0;

    for omega_1 in [-1.0, 0.0, 1.0] {
        let tp = TongueParams::new(omega_p, omega_1, alpha, 0.1).unwrap();
        println!("omega_1 = {omega_1} (omega_n^2 = {}):", tp.natural_frequency_squared());
        match tongue_equilibria(&tp) {
            SlowFlowCensus::Census(report) => {
                println!("  regime {}, {} equilibria", report.regime.as_str(), report.entries.len());
                for e in &report.entries {
                    println!(
                        "    (M, N) = ({:+.6}, {:+.6})  det J = {:+.4}  {}",
                        e.point.m,
                        e.point.n,
                        e.det_j,
                        e.classification.as_str()
                    );
                }
            }
            SlowFlowCensus::DegenerateBoundary { boundary, .. } => {
                println!("  degenerate boundary at omega_1 = {boundary}");
            }
        }
        println!();
    }

    let grid: Vec<f64> = (0..=80).map(|i| -1.0 + 2.0 * i as f64 / 80.0).collect();
    println!("sweep omega_1 in [-1, 1]:");
    for e in bifurcation_scan(alpha, omega_p, &grid).unwrap() {
        println!(
            "  {} pitchfork at omega_1 = {}: {} -> {} equilibria",
            e.kind.as_str(),
            e.omega_1,
            e.count_before,
            e.count_after
        );
    }

    // A small loop around the center born above the lower boundary.
    let tp = TongueParams::new(omega_p, 0.0, alpha, 0.1).unwrap();
    let center = (2.0f64 / 3.0).sqrt();
    let start = CartesianSlowState::new(center + 0.05, 0.0);
    let times: Vec<f64> = (1..=8).map(|i| 5.0 * i as f64).collect();
    let path = flow_samples(
        |_, s| {
            let (dm, dn) = tongue_slow_rhs_cartesian(&tp, &CartesianSlowState::new(s.x, s.y));
            State::new(dm, dn)
        },
        State::new(start.m, start.n),
        0.0,
        &times,
        1e-10,
    )
    .unwrap();
    println!("\ntrajectory near the center at (M, N) = ({center:.4}, 0):");
    for (t, z) in times.iter().zip(&path) {
        println!("  T1 = {t:>5.1}: ({:+.6}, {:+.6})", z.x, z.y);
    }
}
