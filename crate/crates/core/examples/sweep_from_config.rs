//! Runs a sweep file through the library and prints the per-point summary.
//!
//! cargo run --release --example sweep_from_config -- configs/smoke.toml [out.csv]

use fronthaul_mdc::experiment::{emit_csv, run_sweep, summarize, SweepOptions, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/smoke.toml").into());
    let spec = SweepSpec::load(&config)?;
    println!("{config}: {} rows", spec.row_count()?);

    let rows = run_sweep(&spec, &SweepOptions::default())?;
    if let Some(out) = args.next() {
        emit_csv(&rows, &out)?;
        println!("raw rows written to {out}");
    }
    println!("{:>6} {:>6} {:>7} {:>10} {:>8} {:>10} {:>10}", "scheme", "eps", "snr", "C_F", "R_F", "E[rate]", "mc");
    for s in summarize(&rows) {
        println!(
            "{:>6} {:>6} {:>7} {:>10.3e} {:>8.2} {:>10.4} {:>10}",
            s.scheme.as_str(),
            s.eps_f,
            s.snr_db,
            s.c_f_bps,
            s.r_f,
            s.mean_expected_sum_rate,
            s.mean_mc_rate.map(|m| format!("{m:.4}")).unwrap_or("-".into())
        );
    }
    Ok(())
}
