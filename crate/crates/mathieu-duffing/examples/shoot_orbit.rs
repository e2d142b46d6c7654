//! Refine the averaging prediction into a true periodic orbit of the full
//! system by Newton shooting on the period map, and inspect its Floquet
//! multipliers.
//!
//! ```bash
//! cargo run --example shoot_orbit
//! ```

use mathieu_duffing::averaging::predicted_zero;
use mathieu_duffing::ode::{flow, rhs_full};
use mathieu_duffing::orbit::shoot_refine;
use mathieu_duffing::{ForcingSeries, ModelParams, State};

fn main() {
    let forcing = ForcingSeries::cosine(1.0);
    let (x0, y0) = predicted_zero(1.0, 1.0, 1.0, 0.0).unwrap();
    let z_pred = State::new(x0, y0);
    println!("prediction: ({:+.10}, {:+.10})\n", z_pred.x, z_pred.y);

    for eps in [1e-2, 5e-3, 1e-3] {
        let p = ModelParams::resonant(1.0, eps, 1.0).unwrap();
        match shoot_refine(&p, &forcing, z_pred, 1e-10, 25) {
            Ok(orbit) => {
                println!("eps = {eps:.0e}");
                println!(
                    "  z*        = ({:+.10}, {:+.10})",
                    orbit.z_star.x, orbit.z_star.y
                );
                println!("  residual  = {:e} ({} iterations)", orbit.residual, orbit.iterations);
                println!("  |z*-pred| = {:e}", (orbit.z_star - z_pred).norm());
                println!(
                    "  multipliers: {:.8} +- {:.8}i (|mu| = {:.8})",
                    orbit.multipliers.0.re,
                    orbit.multipliers.0.im.abs(),
                    orbit.multipliers.0.norm()
                );
                println!("  det(monodromy) = {:.12}", orbit.monodromy.det());

                // Re-integrate over five periods: a true orbit re-closes.
                let z5 = flow(
                    |t, s| rhs_full(&p, &forcing, t, s),
                    orbit.z_star,
                    0.0,
                    5.0 * orbit.period,
                    1e-12,
                )
                .unwrap();
                println!("  5-period reclose error = {:e}\n", (z5 - orbit.z_star).norm());
            }
            Err(e) => println!("eps = {eps:.0e}: {e}\n"),
        }
    }
}
