//! Expected sum-rate over the whole compression-rate grid for both schemes,
//! and the rate each one picks.

use fronthaul_mdc::channel::{sample_channel, ChannelSizes, Geometry};
use fronthaul_mdc::congestion::FronthaulConfig;
use fronthaul_mdc::optimizer::{optimize_pd, pd_rate_grid, rf_grid_mdc, search_rf_mdc, SolverConfig};

fn main() -> fronthaul_mdc::error::Result<()> {
    let solver = SolverConfig::default();
    let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 316.2, 5)?;
    for eps in [0.1, 0.5, 0.9] {
        let cfg = FronthaulConfig::two_path(100e6, eps);
        let mdc = rf_grid_mdc(&ch, &cfg, &solver)?;
        let pd = pd_rate_grid(&ch, &cfg, &solver)?;
        println!("eps = {eps}");
        for (m, p) in mdc.iter().zip(&pd) {
            let bar = "#".repeat((m.expected_sum_rate * 4.0) as usize);
            println!("  R_F {:>5.1}  mdc {:>7.4}  pd {:>7.4}  {bar}", m.r_f, m.expected_sum_rate, p.expected_sum_rate);
        }
        let best_mdc = search_rf_mdc(&ch, &cfg, &solver)?;
        let best_pd = optimize_pd(&ch, &cfg, &solver)?;
        println!(
            "  chosen: mdc R_F = {:.1} ({:.4}), pd R_F = {:.1} ({:.4})\n",
            best_mdc.r_f, best_mdc.expected_sum_rate, best_pd.r_f, best_pd.expected_sum_rate
        );
    }
    Ok(())
}
