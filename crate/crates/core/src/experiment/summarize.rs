//! Per-point averages over channel draws.

use std::io::Write;
use std::path::Path;

use super::spec::Scheme;
use super::sweep::SweepRecord;
use crate::error::{Error, Result};

pub const SUMMARY_HEADER: [&str; 13] = [
    "scheme",
    "eps_F",
    "snr_db",
    "C_F_bps",
    "R_F",
    "n_channels",
    "mean_expected_sum_rate",
    "stderr_expected_sum_rate",
    "mean_rate_layer1",
    "mean_rate_layer2",
    "mean_mc_rate",
    "converged_fraction",
    "min_R_F",
];

/// Statistics of one axis point (and, for fixed-rate sweeps, one rate).
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub scheme: Scheme,
    pub eps_f: f64,
    pub snr_db: f64,
    pub c_f_bps: f64,
    /// The fixed rate, or the mean chosen rate of an optimized sweep.
    pub r_f: f64,
    pub n_channels: usize,
    pub mean_expected_sum_rate: f64,
    /// Standard error of the mean over channel draws (zero for a single draw).
    pub stderr_expected_sum_rate: f64,
    pub mean_rate_layer1: f64,
    pub mean_rate_layer2: f64,
    /// Mean over rows that carry a Monte Carlo estimate.
    pub mean_mc_rate: Option<f64>,
    pub converged_fraction: f64,
    /// Smallest chosen rate; equals `r_f` for fixed-rate sweeps.
    pub min_r_f: f64,
}

/// Whether the rows come from a fixed-rate sweep: some channel draw of some
/// point has more than one row.
pub fn is_fixed_rate(records: &[SweepRecord]) -> bool {
    let mut keys: Vec<_> = records
        .iter()
        .map(|r| (r.scheme, r.eps_f.to_bits(), r.snr_db.to_bits(), r.c_f_bps.to_bits(), r.channel_seed))
        .collect();
    let n = keys.len();
    keys.sort_unstable();
    keys.dedup();
    keys.len() < n
}

/// Groups rows by scheme and axis point (plus `R_F` for fixed-rate sweeps), in
/// order of first appearance.
pub fn summarize(records: &[SweepRecord]) -> Vec<SummaryRow> {
    let fixed = is_fixed_rate(records);
    let key = |r: &SweepRecord| {
        (
            r.scheme,
            r.eps_f.to_bits(),
            r.snr_db.to_bits(),
            r.c_f_bps.to_bits(),
            if fixed { r.r_f.to_bits() } else { 0 },
        )
    };
    let mut order = Vec::new();
    let mut groups: std::collections::HashMap<_, Vec<&SweepRecord>> = std::collections::HashMap::new();
    for r in records {
        let k = key(r);
        groups.entry(k).or_insert_with(|| {
            order.push(k);
            Vec::new()
        });
        groups.get_mut(&k).expect("just inserted").push(r);
    }
    order
        .into_iter()
        .map(|k| {
            let rows = &groups[&k];
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&SweepRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            let m = mean(&|r| r.expected_sum_rate);
            let stderr = if rows.len() > 1 {
                let var = rows.iter().map(|r| (r.expected_sum_rate - m).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            let mc: Vec<f64> = rows.iter().filter_map(|r| r.mc_rate).collect();
            let first = rows[0];
            SummaryRow {
                scheme: first.scheme,
                eps_f: first.eps_f,
                snr_db: first.snr_db,
                c_f_bps: first.c_f_bps,
                r_f: mean(&|r| r.r_f),
                n_channels: rows.len(),
                mean_expected_sum_rate: m,
                stderr_expected_sum_rate: stderr,
                mean_rate_layer1: mean(&|r| r.rate_layer1),
                mean_rate_layer2: mean(&|r| r.rate_layer2),
                mean_mc_rate: (!mc.is_empty()).then(|| mc.iter().sum::<f64>() / mc.len() as f64),
                converged_fraction: rows.iter().filter(|r| r.converged).count() as f64 / n,
                min_r_f: rows.iter().map(|r| r.r_f).fold(f64::INFINITY, f64::min),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    let f = |x: f64| format!("{x:.16e}");
    for r in rows {
        w.write_record([
            r.scheme.as_str().to_string(),
            f(r.eps_f),
            f(r.snr_db),
            f(r.c_f_bps),
            f(r.r_f),
            r.n_channels.to_string(),
            f(r.mean_expected_sum_rate),
            f(r.stderr_expected_sum_rate),
            f(r.mean_rate_layer1),
            f(r.mean_rate_layer2),
            r.mean_mc_rate.map(f).unwrap_or_default(),
            f(r.converged_fraction),
            f(r.min_r_f),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_summary(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_summary(rows, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, r_f: f64, rate: f64) -> SweepRecord {
        SweepRecord {
            scheme: Scheme::Mdc,
            eps_f: 0.1,
            snr_db: 25.0,
            c_f_bps: 1e8,
            channel_seed: seed,
            r_f,
            expected_sum_rate: rate,
            rate_layer1: rate,
            rate_layer2: 0.0,
            p_m: [0.0, 0.0, 1.0],
            iterations: 1,
            converged: seed != 2,
            mc_rate: None,
            mc_stderr: None,
            diagnostics: String::new(),
        }
    }

    #[test]
    fn optimized_rows_average_the_chosen_rate() {
        let rows = [row(0, 1.2, 1.0), row(1, 2.4, 2.0), row(2, 3.6, 3.0)];
        assert!(!is_fixed_rate(&rows));
        let s = summarize(&rows);
        assert_eq!(s.len(), 1);
        assert!((s[0].r_f - 2.4).abs() < 1e-12);
        assert!((s[0].mean_expected_sum_rate - 2.0).abs() < 1e-12);
        assert!((s[0].stderr_expected_sum_rate - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((s[0].converged_fraction - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s[0].min_r_f, 1.2);
        assert_eq!(s[0].mean_mc_rate, None);
    }

    #[test]
    fn fixed_rows_group_by_rate() {
        let rows = [row(0, 1.2, 1.0), row(0, 2.4, 2.0), row(1, 1.2, 3.0), row(1, 2.4, 4.0)];
        assert!(is_fixed_rate(&rows));
        let s = summarize(&rows);
        assert_eq!(s.iter().map(|r| r.r_f).collect::<Vec<_>>(), vec![1.2, 2.4]);
        assert_eq!(s[0].mean_expected_sum_rate, 2.0);
        assert_eq!(s[1].n_channels, 2);
    }
}
