//! Slot-level Monte Carlo model of the multi-route fronthaul.
//!
//! Every packet on route `l` waits a geometric number of slots with success
//! probability `1 − ε_l`; a description arrives when its `N_F` packets finish
//! within `T_F` slots. Draws for trial `i` come from a ChaCha8 stream selected
//! by `i`, so any sharding of the trials reproduces the serial result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::congestion::{deadline_slots, packets_per_description, DescriptionPmf, FronthaulConfig};
use crate::error::{Error, Result};
use crate::optimizer::{MdcSolution, PdSolution};

/// Empirical statistics of a batch of trials.
#[derive(Clone, Debug, PartialEq)]
pub struct SimOutcome {
    pub trials: u64,
    /// Per-route fraction of trials in which the description arrived.
    pub route_frequencies: Vec<f64>,
    /// Fraction of trials in which `m` descriptions arrived, `m = 0..=N_P`.
    pub empirical_pmf: DescriptionPmf,
    pub empirical_expected_rate: f64,
    /// Standard error of the mean credited rate (zero when no rates are credited).
    pub std_error_rate: f64,
}

/// A solution whose credited rate depends only on the number of arriving descriptions.
#[derive(Clone, Copy, Debug)]
pub enum Design<'a> {
    Mdc(&'a MdcSolution),
    Pd(&'a PdSolution),
}

impl<'a> From<&'a MdcSolution> for Design<'a> {
    fn from(s: &'a MdcSolution) -> Self {
        Design::Mdc(s)
    }
}

impl<'a> From<&'a PdSolution> for Design<'a> {
    fn from(s: &'a PdSolution) -> Self {
        Design::Pd(s)
    }
}

impl Design<'_> {
    fn r_f(&self) -> f64 {
        match self {
            Design::Mdc(s) => s.r_f,
            Design::Pd(s) => s.r_f,
        }
    }

    /// Rate credited when `m` descriptions arrive.
    pub fn credited_rate(&self, m: usize) -> f64 {
        match self {
            Design::Mdc(s) => match m {
                0 => 0.0,
                1 => s.rate_layer1,
                _ => s.rate_layer1 + s.rate_layer2,
            },
            Design::Pd(s) => {
                if m >= 1 {
                    s.sum_rate
                } else {
                    0.0
                }
            }
        }
    }
}

/// Slots until one packet gets through, `⌈ln U / ln ε⌉`, with `ε = 0` taking one slot.
fn geometric_slots(rng: &mut ChaCha8Rng, inv_ln_eps: Option<f64>) -> u64 {
    match inv_ln_eps {
        None => 1,
        Some(inv) => {
            // U in (0, 1]; U = 1 gives zero, which rounds up to one slot.
            let u: f64 = 1.0 - rng.random::<f64>();
            ((u.ln() * inv).ceil() as u64).max(1)
        }
    }
}

fn check_eps(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Parameter("at least one route is required".into()));
    }
    if let Some(e) = eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::Parameter(format!("slot error probability {e} outside [0, 1]")));
    }
    Ok(())
}

/// Per-route delivery counts and description-count histogram over a range of trial indices.
fn delivery_counts(eps: &[f64], n_f: u64, t_f: u64, trials: std::ops::Range<u64>, seed: u64) -> (Vec<u64>, Vec<u64>) {
    let n_p = eps.len();
    let inv: Vec<Option<f64>> = eps
        .iter()
        .map(|&e| if e <= 0.0 { None } else { Some(1.0 / e.ln()) })
        .collect();
    let mut route_hits = vec![0u64; n_p];
    let mut counts = vec![0u64; n_p + 1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in trials {
        rng.set_stream(trial);
        rng.set_word_pos(0);
        let mut m = 0;
        for (l, &e) in eps.iter().enumerate() {
            let delivered = if n_f == 0 {
                true
            } else if n_f > t_f || e >= 1.0 {
                false
            } else {
                let mut total = 0u64;
                let mut ok = true;
                for _ in 0..n_f {
                    total += geometric_slots(&mut rng, inv[l]);
                    if total > t_f {
                        ok = false;
                        break;
                    }
                }
                ok
            };
            if delivered {
                route_hits[l] += 1;
                m += 1;
            }
        }
        counts[m] += 1;
    }
    (route_hits, counts)
}

fn outcome(trials: u64, route_hits: &[u64], counts: &[u64], rate_of: impl Fn(usize) -> f64) -> SimOutcome {
    let n = trials as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let mean: f64 = probs.iter().enumerate().map(|(m, p)| p * rate_of(m)).sum();
    // Sample variance of the per-trial credited rates, grouped by value.
    let ss: f64 = counts
        .iter()
        .enumerate()
        .map(|(m, &c)| c as f64 * (rate_of(m) - mean).powi(2))
        .sum();
    let std_error = if trials > 1 { (ss / (n - 1.0) / n).sqrt() } else { 0.0 };
    SimOutcome {
        trials,
        route_frequencies: route_hits.iter().map(|&h| h as f64 / n).collect(),
        empirical_pmf: DescriptionPmf::from_probs(probs),
        empirical_expected_rate: mean,
        std_error_rate: std_error,
    }
}

/// Simulates description delivery only; the rate fields are zero.
pub fn simulate_delivery(eps: &[f64], n_f: u64, t_f: u64, trials: u64, seed: u64) -> Result<SimOutcome> {
    check_eps(eps)?;
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let (hits, counts) = delivery_counts(eps, n_f, t_f, 0..trials, seed);
    Ok(outcome(trials, &hits, &counts, |_| 0.0))
}

/// Simulates the fronthaul for a solved design and credits its layer rates per trial.
///
/// A zero compression rate sends nothing and always credits zero.
pub fn simulate_expected_rate<'a>(
    design: impl Into<Design<'a>>,
    cfg: &FronthaulConfig,
    trials: u64,
    seed: u64,
) -> Result<SimOutcome> {
    let design = design.into();
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let r_f = design.r_f();
    if r_f <= 0.0 {
        let n_p = cfg.eps.len();
        let mut counts = vec![0u64; n_p + 1];
        counts[0] = trials;
        return Ok(outcome(trials, &vec![0; n_p], &counts, |_| 0.0));
    }
    let n_f = packets_per_description(r_f, cfg)?;
    let t_f = deadline_slots(cfg);
    let (hits, counts) = delivery_counts(&cfg.eps, n_f, t_f, 0..trials, seed);
    Ok(outcome(trials, &hits, &counts, |m| design.credited_rate(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_routes_always_deliver() {
        let out = simulate_delivery(&[0.0, 0.0], 3, 4, 1000, 1).unwrap();
        assert_eq!(out.empirical_pmf.probs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn too_many_packets_never_deliver() {
        let out = simulate_delivery(&[0.0], 5, 4, 100, 1).unwrap();
        assert_eq!(out.empirical_pmf.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn seed_determinism() {
        let a = simulate_delivery(&[0.3, 0.7], 2, 6, 5000, 42).unwrap();
        let b = simulate_delivery(&[0.3, 0.7], 2, 6, 5000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trial_streams_are_independent_of_batching() {
        let (h, c) = delivery_counts(&[0.5, 0.2], 2, 3, 0..200, 7);
        let (h1, c1) = delivery_counts(&[0.5, 0.2], 2, 3, 0..120, 7);
        let (h2, c2) = delivery_counts(&[0.5, 0.2], 2, 3, 120..200, 7);
        let add = |a: Vec<u64>, b: Vec<u64>| a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>();
        assert_eq!(h, add(h1, h2));
        assert_eq!(c, add(c1, c2));
    }

    #[test]
    fn rejects_zero_trials() {
        assert!(simulate_delivery(&[0.1], 1, 1, 0, 0).is_err());
    }
}
