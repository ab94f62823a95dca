//! Checks an optimized design against the slot-level simulator.

use fronthaul_mdc::channel::{sample_channel, ChannelSizes, Geometry};
use fronthaul_mdc::congestion::FronthaulConfig;
use fronthaul_mdc::optimizer::{optimize_pd, search_rf_mdc, SolverConfig};
use fronthaul_mdc::sim::{simulate_delivery, simulate_expected_rate};

const TRIALS: u64 = 100_000;

fn main() -> fronthaul_mdc::error::Result<()> {
    let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 316.2, 8)?;
    let cfg = FronthaulConfig { eps: vec![0.3, 0.6], ..FronthaulConfig::two_path(100e6, 0.0) };
    let solver = SolverConfig::default();

    let mdc = search_rf_mdc(&ch, &cfg, &solver)?;
    let pd = optimize_pd(&ch, &cfg, &solver)?;
    for (name, analytic, sim) in [
        ("mdc", mdc.expected_sum_rate, simulate_expected_rate(&mdc, &cfg, TRIALS, 1)?),
        ("pd", pd.expected_sum_rate, simulate_expected_rate(&pd, &cfg, TRIALS, 1)?),
    ] {
        let z = (sim.empirical_expected_rate - analytic) / sim.std_error_rate.max(f64::MIN_POSITIVE);
        println!(
            "{name:>3}: analytic {analytic:.5}, simulated {:.5} ± {:.5} (z = {z:+.2})",
            sim.empirical_expected_rate, sim.std_error_rate
        );
        println!("     description counts {:?}", sim.empirical_pmf.probs());
    }

    let raw = simulate_delivery(&[0.5, 0.5], 2, 2, TRIALS, 3)?;
    println!("N_F = T_F = 2 at eps 0.5: route frequencies {:?} (exact 0.25)", raw.route_frequencies);
    Ok(())
}
