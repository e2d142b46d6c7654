//! Measure how fast the refined periodic orbit approaches the averaging
//! prediction as the perturbation vanishes, and how closely it tracks the
//! zeroth-order two-timing solution.
//!
//! ```bash
//! cargo run --example convergence
//! ```

use mathieu_duffing::averaging::predicted_zero;
use mathieu_duffing::orbit::{compare_two_timing, convergence_study, shoot_refine};
use mathieu_duffing::two_timing::resonant_equilibrium;
use mathieu_duffing::{ForcingSeries, ModelParams, State};

fn main() {
    let forcing = ForcingSeries::cosine(1.0);
    let template = ModelParams::resonant(1.0, 1e-2, 1.0).unwrap();
    let (x0, y0) = predicted_zero(1.0, 1.0, 1.0, 0.0).unwrap();
    let z_pred = State::new(x0, y0);

    let eps_list = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let study = convergence_study(&template, &forcing, z_pred, &eps_list, 1e-10).unwrap();

    println!("{:>10}  {:>14}  {:>14}", "epsilon", "|z*-pred|", "residual");
    for row in &study.rows {
        println!(
            "{:>10.2e}  {:>14.6e}  {:>14.2e}",
            row.epsilon,
            row.error.unwrap_or(f64::NAN),
            row.residual.unwrap_or(f64::NAN),
        );
    }
    println!(
        "\nlog-log slope of error vs epsilon: {:.4} (first-order convergence)",
        study.slope.unwrap()
    );

    // Deviation from the zeroth-order solution shrinks linearly too.
    let eq = resonant_equilibrium(1.0, 1.0, 1.0, 0.0).unwrap();
    println!("\n{:>10}  {:>16}  {:>12}", "epsilon", "max |x - x0(t)|", "ratio / eps");
    for eps in [1e-2, 1e-3] {
        let p = ModelParams {
            epsilon: eps,
            ..template
        };
        let orbit = shoot_refine(&p, &forcing, z_pred, 1e-10, 25).unwrap();
        let dev = compare_two_timing(&p, &forcing, &orbit, &eq, 256, 1e-12).unwrap();
        println!("{:>10.2e}  {:>16.6e}  {:>12.4}", eps, dev, dev / eps);
    }
}
