//! Sweep execution and the per-row CSV format.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use super::spec::{Scheme, SweepSpec};
use crate::channel::sample_channel;
use crate::congestion::FronthaulConfig;
use crate::error::{Error, Result};
use crate::optimizer::{cccp_fixed_rf, cccp_fixed_rf_pd, optimize_pd, search_rf_mdc, MdcSolution, PdSolution, SolverConfig};
use crate::sim::simulate_expected_rate;

/// Column order of sweep CSV files.
pub const CSV_HEADER: [&str; 17] = [
    "scheme",
    "eps_F",
    "snr_db",
    "C_F_bps",
    "channel_seed",
    "R_F",
    "expected_sum_rate",
    "rate_layer1",
    "rate_layer2",
    "p_M0",
    "p_M1",
    "p_M2",
    "iterations",
    "converged",
    "mc_rate",
    "mc_stderr",
    "diagnostics",
];

/// One solved design. Path-diversity rows put the sum-rate in `rate_layer1`
/// and zero in `rate_layer2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub scheme: Scheme,
    pub eps_f: f64,
    pub snr_db: f64,
    pub c_f_bps: f64,
    pub channel_seed: u64,
    pub r_f: f64,
    pub expected_sum_rate: f64,
    pub rate_layer1: f64,
    pub rate_layer2: f64,
    pub p_m: [f64; 3],
    pub iterations: usize,
    pub converged: bool,
    pub mc_rate: Option<f64>,
    pub mc_stderr: Option<f64>,
    /// Solver warnings joined by `"; "`.
    pub diagnostics: String,
}

/// Run-time knobs that are not part of the configuration file.
#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
    /// Overrides `trials_mc` of the spec.
    pub mc_trials: Option<u64>,
    pub solver: SolverConfig,
}

/// Position of a row in the canonical output order.
type RowKey = (usize, usize, usize, usize, usize, u64);

struct Job {
    eps: (usize, f64),
    snr: (usize, f64),
    c_f: (usize, f64),
    k: u64,
    seed: u64,
    rates: Vec<Option<f64>>,
}

fn pmf3(p: &[f64]) -> [f64; 3] {
    [0, 1, 2].map(|m| p.get(m).copied().unwrap_or(0.0))
}

fn join(d: &[String]) -> String {
    d.join("; ")
}

fn blank(scheme: Scheme, r_f: f64) -> SweepRecord {
    SweepRecord {
        scheme,
        eps_f: 0.0,
        snr_db: 0.0,
        c_f_bps: 0.0,
        channel_seed: 0,
        r_f,
        expected_sum_rate: 0.0,
        rate_layer1: 0.0,
        rate_layer2: 0.0,
        p_m: [0.0; 3],
        iterations: 0,
        converged: false,
        mc_rate: None,
        mc_stderr: None,
        diagnostics: String::new(),
    }
}

fn mdc_record(s: &MdcSolution) -> SweepRecord {
    SweepRecord {
        expected_sum_rate: s.expected_sum_rate,
        rate_layer1: s.rate_layer1,
        rate_layer2: s.rate_layer2,
        p_m: pmf3(s.pmf.probs()),
        iterations: s.iterations,
        converged: s.converged,
        diagnostics: join(&s.diagnostics),
        ..blank(Scheme::Mdc, s.r_f)
    }
}

fn pd_record(s: &PdSolution) -> SweepRecord {
    SweepRecord {
        expected_sum_rate: s.expected_sum_rate,
        rate_layer1: s.sum_rate,
        p_m: pmf3(s.pmf.probs()),
        iterations: s.iterations,
        converged: s.converged,
        diagnostics: join(&s.diagnostics),
        ..blank(Scheme::Pd, s.r_f)
    }
}

/// Solves one scheme at one rate (or over the grid) and optionally checks it by simulation.
fn solve_row(
    scheme: Scheme,
    rate: Option<f64>,
    ch: &crate::channel::UplinkChannel,
    cfg: &FronthaulConfig,
    solver: &SolverConfig,
    mc: (u64, u64),
) -> Result<SweepRecord> {
    let (trials, seed) = mc;
    let mut rec;
    let sim = match scheme {
        Scheme::Mdc => {
            let s = match rate {
                Some(r) => cccp_fixed_rf(r, ch, cfg, None, solver)?,
                None => search_rf_mdc(ch, cfg, solver)?,
            };
            rec = mdc_record(&s);
            if trials > 0 { Some(simulate_expected_rate(&s, cfg, trials, seed)?) } else { None }
        }
        Scheme::Pd => {
            let s = match rate {
                Some(r) => cccp_fixed_rf_pd(r, ch, cfg, None, solver)?,
                None => optimize_pd(ch, cfg, solver)?,
            };
            rec = pd_record(&s);
            if trials > 0 { Some(simulate_expected_rate(&s, cfg, trials, seed)?) } else { None }
        }
    };
    if let Some(o) = sim {
        rec.mc_rate = Some(o.empirical_expected_rate);
        rec.mc_stderr = Some(o.std_error_rate);
    }
    Ok(rec)
}

fn run_job(spec: &SweepSpec, job: &Job, opts: &SweepOptions) -> Vec<(RowKey, SweepRecord)> {
    let cfg = spec.fronthaul(job.eps.1, job.c_f.1);
    let trials = opts.mc_trials.unwrap_or(spec.trials_mc);
    let ch = sample_channel(&spec.geometry(), &spec.sizes(), spec.channel.noise_power, spec.power(job.snr.1), job.seed);
    let mut out = Vec::new();
    for (si, &scheme) in spec.schemes.iter().enumerate() {
        for (ri, &rate) in job.rates.iter().enumerate() {
            let solved = ch.as_ref().map_err(Clone::clone).and_then(|ch| {
                solve_row(scheme, rate, ch, &cfg, &opts.solver, (trials, job.seed))
            });
            let mut rec = solved.unwrap_or_else(|e| SweepRecord {
                diagnostics: format!("error: {e}"),
                ..blank(scheme, rate.unwrap_or(0.0))
            });
            rec.eps_f = job.eps.1;
            rec.snr_db = job.snr.1;
            rec.c_f_bps = job.c_f.1;
            rec.channel_seed = job.seed;
            out.push(((si, job.eps.0, job.snr.0, job.c_f.0, ri, job.k), rec));
        }
    }
    out
}

/// Runs every (scheme, axis point, channel draw) of `spec`.
///
/// Channel draw `k` uses seed `base_seed + k`, which also seeds its Monte Carlo
/// check. Solver errors are recorded in the row's diagnostics with zero rates.
/// Rows come back sorted by scheme, axis indices and channel seed whatever the
/// number of workers.
pub fn run_sweep(spec: &SweepSpec, opts: &SweepOptions) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (ci, &c_f) in spec.axes.c_f_bps.iter().enumerate() {
        let rates = spec.rates_for(c_f)?;
        for (ei, &eps) in spec.axes.eps_f.iter().enumerate() {
            for (ni, &snr) in spec.axes.snr_db.iter().enumerate() {
                for k in 0..spec.n_channels {
                    jobs.push(Job {
                        eps: (ei, eps),
                        snr: (ni, snr),
                        c_f: (ci, c_f),
                        k,
                        seed: spec.base_seed.wrapping_add(k),
                        rates: rates.clone(),
                    });
                }
            }
        }
    }
    let run = || -> Vec<(RowKey, SweepRecord)> {
        jobs.par_iter().flat_map_iter(|job| run_job(spec, job, opts)).collect()
    };
    let mut rows = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(run),
        None => run(),
    };
    rows.sort_by_key(|(key, _)| *key);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// 17 significant digits, enough to reproduce every `f64` exactly.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl SweepRecord {
    fn to_row(&self) -> [String; 17] {
        [
            self.scheme.as_str().to_string(),
            fmt_f64(self.eps_f),
            fmt_f64(self.snr_db),
            fmt_f64(self.c_f_bps),
            self.channel_seed.to_string(),
            fmt_f64(self.r_f),
            fmt_f64(self.expected_sum_rate),
            fmt_f64(self.rate_layer1),
            fmt_f64(self.rate_layer2),
            fmt_f64(self.p_m[0]),
            fmt_f64(self.p_m[1]),
            fmt_f64(self.p_m[2]),
            self.iterations.to_string(),
            self.converged.to_string(),
            fmt_opt(self.mc_rate),
            fmt_opt(self.mc_stderr),
            self.diagnostics.clone(),
        ]
    }

    fn from_row(row: &csv::StringRecord, line: u64) -> Result<Self> {
        if row.len() != CSV_HEADER.len() {
            return Err(Error::Config(format!("line {line}: expected 17 fields, found {}", row.len())));
        }
        let field = |i: usize| &row[i];
        let err = |i: usize, e: &dyn std::fmt::Display| {
            Error::Config(format!("line {line}, column {}: {e}", CSV_HEADER[i]))
        };
        let f = |i: usize| field(i).parse::<f64>().map_err(|e| err(i, &e));
        let opt = |i: usize| if field(i).is_empty() { Ok(None) } else { f(i).map(Some) };
        Ok(Self {
            scheme: field(0).parse()?,
            eps_f: f(1)?,
            snr_db: f(2)?,
            c_f_bps: f(3)?,
            channel_seed: field(4).parse().map_err(|e| err(4, &e))?,
            r_f: f(5)?,
            expected_sum_rate: f(6)?,
            rate_layer1: f(7)?,
            rate_layer2: f(8)?,
            p_m: [f(9)?, f(10)?, f(11)?],
            iterations: field(12).parse().map_err(|e| err(12, &e))?,
            converged: field(13).parse().map_err(|e| err(13, &e))?,
            mc_rate: opt(14)?,
            mc_stderr: opt(15)?,
            diagnostics: field(16).to_string(),
        })
    }
}

/// Writes the header and one line per record, LF-terminated.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.to_row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(records, std::io::BufWriter::new(file))
}

/// Parses a sweep CSV; the header must match [`CSV_HEADER`].
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    r.records()
        .enumerate()
        .map(|(i, row)| SweepRecord::from_row(&row?, i as u64 + 2))
        .collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv(std::io::BufReader::new(file))
}
