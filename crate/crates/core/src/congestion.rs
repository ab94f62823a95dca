//! Slotted packet fronthaul: packet counts, deadlines, per-route delivery
//! probabilities and the distribution of the number of delivered descriptions.
//!
//! Each packet on route `l` needs a geometrically distributed number of slots
//! (per-slot success probability `1 − ε_l`), so a description of `N_F` packets
//! arrives by slot `T_F` with a negative-binomial probability.

use crate::error::{Error, Result};
use crate::rate_region::LayerWeights;

/// Largest number of routes accepted by [`description_pmf_general`].
pub const MAX_ENUMERATED_PATHS: usize = 20;

/// Packet fronthaul parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FronthaulConfig {
    /// Payload bits per fronthaul packet, `B_F`.
    pub packet_bits: u64,
    /// Channel uses per wireless frame, `L_W`.
    pub frame_symbols: u64,
    /// Fronthaul capacity in bit/s, `C_F`.
    pub capacity_bps: f64,
    /// Maximum tolerable fronthaul delay in seconds.
    pub t_max_s: f64,
    /// Per-route per-slot failure probabilities `ε_{F,l}`.
    pub eps: Vec<f64>,
}

impl FronthaulConfig {
    /// Two symmetric routes with the remaining parameters at their defaults
    /// (`B_F = 6000`, `L_W = 5000`, `T_max = 1 ms`).
    pub fn two_path(capacity_bps: f64, eps: f64) -> Self {
        Self {
            packet_bits: 6000,
            frame_symbols: 5000,
            capacity_bps,
            t_max_s: 1e-3,
            eps: vec![eps, eps],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.packet_bits == 0 || self.frame_symbols == 0 {
            return Err(Error::Parameter("B_F and L_W must be positive".into()));
        }
        if !(self.capacity_bps > 0.0) || !(self.t_max_s > 0.0) {
            return Err(Error::Parameter("C_F and T_max must be positive".into()));
        }
        if self.eps.is_empty() {
            return Err(Error::Parameter("at least one route is required".into()));
        }
        if let Some(e) = self.eps.iter().find(|e| !(0.0..1.0).contains(*e)) {
            return Err(Error::Parameter(format!("route failure probability {e} outside [0, 1)")));
        }
        Ok(())
    }

    /// Rate step of the compression-rate grid, `B_F / L_W` bits per symbol.
    pub fn rate_step(&self) -> f64 {
        self.packet_bits as f64 / self.frame_symbols as f64
    }
}

// Products like 5000 * (6000/5000) can land one ulp above an integer.
const ROUNDING_SLACK: f64 = 1e-9;

/// `N_F = ⌈L_W R_F / B_F⌉`.
pub fn packets_per_description(r_f: f64, cfg: &FronthaulConfig) -> Result<u64> {
    if !(r_f > 0.0) || !r_f.is_finite() {
        return Err(Error::Parameter(format!("compression rate must be positive, got {r_f}")));
    }
    let x = cfg.frame_symbols as f64 * r_f / cfg.packet_bits as f64;
    Ok(((x - ROUNDING_SLACK * x.max(1.0)).ceil() as u64).max(1))
}

/// `T_F = ⌊T_max / (B_F / C_F)⌋`.
pub fn deadline_slots(cfg: &FronthaulConfig) -> u64 {
    let x = cfg.t_max_s * cfg.capacity_bps / cfg.packet_bits as f64;
    (x + ROUNDING_SLACK * x.max(1.0)).floor() as u64
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `Σ_{j ∈ range} C(n, j) x^j (1 − x)^{n − j}`, for `0 < x < 1`.
fn binomial_tail(n: u64, x: f64, range: std::ops::RangeInclusive<u64>) -> f64 {
    let (lx, l1x) = (x.ln(), (-x).ln_1p());
    range
        .map(|j| (ln_binomial(n, j) + j as f64 * lx + (n - j) as f64 * l1x).exp())
        .sum()
}

/// Regularized incomplete beta function `I_x(a, b)` for integer `a, b ≥ 1`,
/// evaluated exactly as the binomial tail
/// `Σ_{j=a}^{a+b−1} C(a+b−1, j) x^j (1−x)^{a+b−1−j}`.
pub fn regularized_incomplete_beta(x: f64, a: u64, b: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Parameter(format!("x = {x} outside [0, 1]")));
    }
    if a == 0 || b == 0 {
        return Err(Error::Parameter(format!("beta parameters must be >= 1, got ({a}, {b})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let n = a + b - 1;
    Ok(binomial_tail(n, x, a..=n).clamp(0.0, 1.0))
}

/// Probability that a description of `n_f` packets on a route with per-slot
/// failure probability `eps` is delivered within `t_f` slots,
/// `1 − I_ε(T_F − N_F + 1, N_F)`.
///
/// Returns exactly 0 when `n_f > t_f`. The complement of the beta function is
/// summed directly so that `eps` close to 1 does not cancel catastrophically.
pub fn delivery_probability(eps: f64, n_f: u64, t_f: u64) -> f64 {
    if n_f == 0 {
        return 1.0;
    }
    if n_f > t_f || eps >= 1.0 {
        return 0.0;
    }
    if eps <= 0.0 {
        return 1.0;
    }
    let a = t_f - n_f + 1;
    binomial_tail(t_f, eps, 0..=a - 1).clamp(0.0, 1.0)
}

/// Distribution of the number of descriptions `M` that meet the deadline.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptionPmf {
    probs: Vec<f64>,
}

impl DescriptionPmf {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    /// All mass on `M = 0`, for `n_paths` routes.
    pub fn nothing_delivered(n_paths: usize) -> Self {
        let mut probs = vec![0.0; n_paths + 1];
        probs[0] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn p(&self, m: usize) -> f64 {
        self.probs.get(m).copied().unwrap_or(0.0)
    }

    pub fn n_paths(&self) -> usize {
        self.probs.len() - 1
    }

    /// `Pr[M ≥ 1]`, the path-diversity success probability.
    pub fn at_least_one(&self) -> f64 {
        1.0 - self.p(0)
    }

    /// `(p̄(1), p̄(2)) = (p(1) + p(2), p(2))` for the two-route case.
    pub fn layer_weights(&self) -> LayerWeights {
        LayerWeights { layer1: self.p(1) + self.p(2), layer2: self.p(2) }
    }
}

/// `p_M` for two routes with delivery probabilities `p1` and `p2`.
pub fn description_pmf_2path(p1: f64, p2: f64) -> DescriptionPmf {
    DescriptionPmf {
        probs: vec![(1.0 - p1) * (1.0 - p2), p1 * (1.0 - p2) + p2 * (1.0 - p1), p1 * p2],
    }
}

/// `p_M` for `N_P` independent routes by enumerating all `2^{N_P}` delivery patterns.
pub fn description_pmf_general(route_probs: &[f64]) -> Result<DescriptionPmf> {
    let n = route_probs.len();
    if n == 0 || n > MAX_ENUMERATED_PATHS {
        return Err(Error::Parameter(format!(
            "enumeration supports 1..={MAX_ENUMERATED_PATHS} routes, got {n}"
        )));
    }
    if let Some(p) = route_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Parameter(format!("route probability {p} outside [0, 1]")));
    }
    let mut probs = vec![0.0; n + 1];
    for pattern in 0u32..(1u32 << n) {
        let mut weight = 1.0;
        for (l, &p) in route_probs.iter().enumerate() {
            weight *= if pattern >> l & 1 == 1 { p } else { 1.0 - p };
        }
        probs[pattern.count_ones() as usize] += weight;
    }
    Ok(DescriptionPmf { probs })
}

/// Per-route delivery probabilities of descriptions compressed at `r_f`.
pub fn route_delivery_probabilities(r_f: f64, cfg: &FronthaulConfig) -> Result<Vec<f64>> {
    let n_f = packets_per_description(r_f, cfg)?;
    let t_f = deadline_slots(cfg);
    Ok(cfg.eps.iter().map(|&e| delivery_probability(e, n_f, t_f)).collect())
}

/// Description-count distribution for compression rate `r_f`; `r_f ≤ 0` sends nothing.
pub fn description_pmf(r_f: f64, cfg: &FronthaulConfig) -> Result<DescriptionPmf> {
    if r_f <= 0.0 {
        return Ok(DescriptionPmf::nothing_delivered(cfg.eps.len()));
    }
    let probs = route_delivery_probabilities(r_f, cfg)?;
    if probs.len() == 2 {
        Ok(description_pmf_2path(probs[0], probs[1]))
    } else {
        description_pmf_general(&probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packet_counts() {
        let cfg = FronthaulConfig::two_path(100e6, 0.1);
        assert_eq!(packets_per_description(1.2, &cfg).unwrap(), 1);
        assert_eq!(packets_per_description(1.3, &cfg).unwrap(), 2);
        assert_eq!(packets_per_description(cfg.rate_step(), &cfg).unwrap(), 1);
        for k in 1..=40u64 {
            let r = k as f64 * cfg.rate_step();
            assert_eq!(packets_per_description(r, &cfg).unwrap(), k);
        }
        assert!(packets_per_description(0.0, &cfg).is_err());
        assert!(packets_per_description(-1.0, &cfg).is_err());
    }

    #[test]
    fn deadlines() {
        assert_eq!(deadline_slots(&FronthaulConfig::two_path(100e6, 0.1)), 16);
        assert_eq!(deadline_slots(&FronthaulConfig::two_path(6e6, 0.1)), 1);
        assert_eq!(deadline_slots(&FronthaulConfig::two_path(5e6, 0.1)), 0);
        assert_eq!(deadline_slots(&FronthaulConfig::two_path(25e6, 0.1)), 4);
        assert_eq!(deadline_slots(&FronthaulConfig::two_path(200e6, 0.1)), 33);
    }

    #[test]
    fn beta_endpoints_and_errors() {
        assert_eq!(regularized_incomplete_beta(0.0, 3, 4).unwrap(), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0, 3, 4).unwrap(), 1.0);
        assert!((regularized_incomplete_beta(0.37, 1, 1).unwrap() - 0.37).abs() < 1e-15);
        assert!(regularized_incomplete_beta(1.5, 1, 1).is_err());
        assert!(regularized_incomplete_beta(0.5, 0, 1).is_err());
    }

    #[test]
    fn delivery_examples() {
        assert_eq!(delivery_probability(0.0, 3, 5), 1.0);
        assert!((delivery_probability(0.5, 1, 2) - 0.75).abs() < 1e-15);
        assert!((delivery_probability(0.5, 2, 2) - 0.25).abs() < 1e-15);
        assert_eq!(delivery_probability(0.5, 3, 2), 0.0);
        assert_eq!(delivery_probability(0.0, 3, 2), 0.0);
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(description_pmf_2path(0.0, 0.0).probs(), &[1.0, 0.0, 0.0]);
        assert_eq!(description_pmf_2path(1.0, 1.0).probs(), &[0.0, 0.0, 1.0]);
        let p = description_pmf_2path(0.75, 0.75);
        assert_eq!(p.probs(), &[0.0625, 0.375, 0.5625]);
        let w = p.layer_weights();
        assert_eq!((w.layer1, w.layer2), (0.9375, 0.5625));
        assert!((description_pmf_2path(0.5, 0.5).at_least_one() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn general_pmf_bounds() {
        assert!(description_pmf_general(&[]).is_err());
        assert!(description_pmf_general(&[0.5; 21]).is_err());
        assert!(description_pmf_general(&[1.2]).is_err());
        assert_eq!(description_pmf_general(&[1.0; 4]).unwrap().probs(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn config_validation() {
        assert!(FronthaulConfig::two_path(100e6, 0.3).validate().is_ok());
        assert!(FronthaulConfig::two_path(100e6, 1.0).validate().is_err());
        assert!(FronthaulConfig::two_path(0.0, 0.3).validate().is_err());
    }
}
