//! Sweep an Ince-Strutt stability chart for the linear Mathieu equation and
//! overlay the analytic first-tongue transition curves.
//!
//! ```bash
//! cargo run --example stability_chart
//! ```

use std::fs;

use mathieu_duffing::floquet::{default_sweep_method, sweep_chart, AxisSpec, Verdict};
use mathieu_duffing::two_timing::transition_curves;

fn main() {
    let omega_p = 2.0;
    let delta_axis = AxisSpec::new(0.0, 2.5, 126).unwrap();
    let eps_axis = AxisSpec::new(0.0, 0.5, 26).unwrap();
    let grid = sweep_chart(
        delta_axis,
        eps_axis,
        omega_p,
        1e-9,
        default_sweep_method(),
    )
    .unwrap();

    fs::create_dir_all("out").unwrap();
    let mut csv = String::from("delta,epsilon,trace,verdict\n");
    for c in &grid.cells {
        csv.push_str(&format!("{},{},{},{}\n", c.delta, c.epsilon, c.trace, c.verdict.as_str()));
    }
    fs::write("out/ince_strutt.csv", csv).unwrap();
    println!(
        "chart: {} x {} cells (omega_p = {omega_p}) -> out/ince_strutt.csv\n",
        delta_axis.count, eps_axis.count
    );

    // Unstable span per epsilon row against the analytic curves.
    println!(
        "{:>8}  {:>22}  {:>22}",
        "epsilon", "unstable delta span", "analytic curves"
    );
    for (i, eps) in eps_axis.values().iter().enumerate() {
        let row = grid.row(i);
        let unstable: Vec<f64> = row
            .iter()
            .filter(|c| c.verdict == Verdict::Unstable)
            .map(|c| c.delta)
            .collect();
        let (lo, hi) = transition_curves(omega_p, *eps);
        match (unstable.first(), unstable.last()) {
            (Some(first), Some(last)) => println!(
                "{eps:>8.3}  [{first:>9.4}, {last:>9.4}]  [{lo:>9.4}, {hi:>9.4}]"
            ),
            _ => println!("{eps:>8.3}  {:>22}  [{lo:>9.4}, {hi:>9.4}]", "none resolved"),
        }
    }
}
