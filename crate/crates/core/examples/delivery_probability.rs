//! How the packet count of a description trades against the deadline.
//!
//! For each grid rate this prints the packets per description, the per-route
//! delivery probability and the distribution of the number of descriptions
//! that arrive on two symmetric routes.

use fronthaul_mdc::congestion::{deadline_slots, description_pmf, packets_per_description, route_delivery_probabilities, FronthaulConfig};
use fronthaul_mdc::optimizer::rate_grid;

fn main() -> fronthaul_mdc::error::Result<()> {
    for eps in [0.1, 0.5, 0.9] {
        let cfg = FronthaulConfig::two_path(100e6, eps);
        println!("eps = {eps}, T_F = {} slots", deadline_slots(&cfg));
        println!("  {:>5} {:>4} {:>10} {:>8} {:>8} {:>8}", "R_F", "N_F", "route", "p_M(0)", "p_M(1)", "p_M(2)");
        for r_f in rate_grid(&cfg)?.into_iter().step_by(2) {
            let p = route_delivery_probabilities(r_f, &cfg)?;
            let pmf = description_pmf(r_f, &cfg)?;
            println!(
                "  {r_f:>5.1} {:>4} {:>10.6} {:>8.4} {:>8.4} {:>8.4}",
                packets_per_description(r_f, &cfg)?,
                p[0],
                pmf.p(0),
                pmf.p(1),
                pmf.p(2)
            );
        }
        println!();
    }
    Ok(())
}
