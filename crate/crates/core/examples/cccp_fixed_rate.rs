//! One run of the concave-convex procedure at a fixed compression rate.
//!
//! cargo run --release --example cccp_fixed_rate -- [R_F] [eps]

use fronthaul_mdc::channel::{sample_channel, ChannelSizes, Geometry};
use fronthaul_mdc::congestion::FronthaulConfig;
use fronthaul_mdc::optimizer::{cccp_fixed_rf, cccp_fixed_rf_pd, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let r_f: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(6.0);
    let eps: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.3);

    let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 316.2, 2)?;
    let cfg = FronthaulConfig::two_path(100e6, eps);

    for (name, solver) in [
        ("plain", SolverConfig { boundary_candidates: false, extrapolate: false, ..SolverConfig::default() }),
        ("default", SolverConfig::default()),
    ] {
        let sol = cccp_fixed_rf(r_f, &ch, &cfg, None, &solver)?;
        println!("[{name}] R_F = {r_f}, eps = {eps}");
        println!("  expected sum-rate {:.6} after {} iterations (converged: {})", sol.expected_sum_rate, sol.iterations, sol.converged);
        println!("  layer rates {:.4} + {:.4}, layer-1 power {:?}", sol.rate_layer1, sol.rate_layer2, sol.split.layer1());
        let h = &sol.objective_history;
        let shown: Vec<String> = h.iter().take(8).map(|v| format!("{v:.4}")).collect();
        println!("  objective history ({} values): {} ...", h.len(), shown.join(" "));
        for d in &sol.diagnostics {
            println!("  note: {d}");
        }
    }

    let pd = cccp_fixed_rf_pd(r_f, &ch, &cfg, None, &SolverConfig::default())?;
    println!("[path diversity] expected sum-rate {:.6} (sum-rate {:.4} x success {:.4})", pd.expected_sum_rate, pd.sum_rate, pd.success_prob);
    Ok(())
}
