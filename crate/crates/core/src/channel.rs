//! Uplink wireless channel: random realizations and the layered achievable rates.
//!
//! All rates are in bits per channel use. With transmit covariance
//! `Σ_x = P·I`, the RRH observes `y = H x + z` with covariance
//! `Σ_y = P·H H^H + Σ_z`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, HermitianMatrix};

/// Disc geometry and path-loss law for random UE/RRH drops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub radius_m: f64,
    pub ref_dist_m: f64,
    pub pathloss_exp: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { radius_m: 100.0, ref_dist_m: 30.0, pathloss_exp: 3.0 }
    }
}

impl Geometry {
    /// `ρ = 1 / (1 + (d/d0)^α)`.
    pub fn pathloss(&self, distance_m: f64) -> f64 {
        1.0 / (1.0 + (distance_m / self.ref_dist_m).powf(self.pathloss_exp))
    }
}

/// Antenna counts of one RRH and its users.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSizes {
    pub n_rrh_antennas: usize,
    pub ue_antennas: Vec<usize>,
}

impl ChannelSizes {
    /// `n_ue` users with `ue_antennas` antennas each.
    pub fn uniform(n_ue: usize, n_rrh_antennas: usize, ue_antennas: usize) -> Self {
        Self { n_rrh_antennas, ue_antennas: vec![ue_antennas; n_ue] }
    }

    pub fn n_ue(&self) -> usize {
        self.ue_antennas.len()
    }

    fn validate(&self) -> Result<()> {
        if self.n_rrh_antennas == 0 || self.ue_antennas.is_empty() || self.ue_antennas.contains(&0) {
            return Err(Error::Parameter(format!("all channel sizes must be >= 1, got {self:?}")));
        }
        Ok(())
    }
}

/// Flat-fading uplink from `N_U` users to one multi-antenna RRH.
#[derive(Clone, Debug, PartialEq)]
pub struct UplinkChannel {
    h: Vec<CMatrix>,
    noise_cov: HermitianMatrix,
    power: f64,
}

impl UplinkChannel {
    pub fn new(h: Vec<CMatrix>, noise_cov: HermitianMatrix, power: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Parameter("channel needs at least one user".into()));
        }
        let n_r = noise_cov.dim();
        if n_r == 0 {
            return Err(Error::Parameter("RRH needs at least one antenna".into()));
        }
        for (k, hk) in h.iter().enumerate() {
            if hk.nrows() != n_r || hk.ncols() == 0 {
                return Err(Error::Dimension(format!(
                    "H_{k} is {}x{}, expected {n_r} rows and >= 1 column",
                    hk.nrows(),
                    hk.ncols()
                )));
            }
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::Parameter(format!("power must be positive, got {power}")));
        }
        if !noise_cov.is_psd() {
            return Err(Error::Parameter("noise covariance must be PSD".into()));
        }
        Ok(Self { h, noise_cov, power })
    }

    pub fn n_rrh_antennas(&self) -> usize {
        self.noise_cov.dim()
    }

    pub fn n_ue(&self) -> usize {
        self.h.len()
    }

    pub fn ue_antennas(&self) -> Vec<usize> {
        self.h.iter().map(|hk| hk.ncols()).collect()
    }

    pub fn h(&self, k: usize) -> &CMatrix {
        &self.h[k]
    }

    pub fn noise_cov(&self) -> &HermitianMatrix {
        &self.noise_cov
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Same channel matrices with a different per-user power budget.
    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(self.h.clone(), self.noise_cov.clone(), power)
    }

    /// `H_k H_k^H` for every user.
    pub fn user_grams(&self) -> Vec<HermitianMatrix> {
        self.h.iter().map(HermitianMatrix::gram).collect()
    }

    /// `Σ_k p_k H_k H_k^H`.
    pub fn weighted_gram(&self, powers: &[f64]) -> HermitianMatrix {
        let n = self.n_rrh_antennas();
        let mut acc = CMatrix::zeros(n, n);
        for (hk, &p) in self.h.iter().zip(powers) {
            acc += hk * hk.adjoint() * c64::new(p, 0.0);
        }
        HermitianMatrix::hermitize(acc).expect("square")
    }
}

/// Per-user power split between the two broadcast-coding layers.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSplit {
    layer1: Vec<f64>,
    layer2: Vec<f64>,
}

impl PowerSplit {
    /// Builds the split from layer-1 powers; layer 2 gets the remainder of `total`.
    pub fn from_layer1(layer1: Vec<f64>, total: f64) -> Result<Self> {
        for &p in &layer1 {
            if !(0.0..=total).contains(&p) {
                return Err(Error::Parameter(format!("layer-1 power {p} outside [0, {total}]")));
            }
        }
        let layer2 = layer1.iter().map(|p| total - p).collect();
        Ok(Self { layer1, layer2 })
    }

    pub fn new(layer1: Vec<f64>, layer2: Vec<f64>, total: f64) -> Result<Self> {
        if layer1.len() != layer2.len() {
            return Err(Error::Dimension("layer power vectors differ in length".into()));
        }
        for (a, b) in layer1.iter().zip(&layer2) {
            if *a < 0.0 || *b < 0.0 || (a + b - total).abs() > 1e-9 * total {
                return Err(Error::Parameter(format!(
                    "powers ({a}, {b}) must be nonnegative and sum to {total}"
                )));
            }
        }
        Ok(Self { layer1, layer2 })
    }

    /// Equal split, `P/2` per layer.
    pub fn even(n_ue: usize, total: f64) -> Self {
        Self { layer1: vec![total / 2.0; n_ue], layer2: vec![total / 2.0; n_ue] }
    }

    pub fn layer1(&self) -> &[f64] {
        &self.layer1
    }

    pub fn layer2(&self) -> &[f64] {
        &self.layer2
    }

    pub fn n_ue(&self) -> usize {
        self.layer1.len()
    }
}

/// Draws UE and RRH positions uniformly in the disc and i.i.d. `CN(0, ρ_k)`
/// channel coefficients; `Σ_z = N0·I`. Pure function of `seed`.
pub fn sample_channel(
    geometry: &Geometry,
    sizes: &ChannelSizes,
    noise_power: f64,
    power: f64,
    seed: u64,
) -> Result<UplinkChannel> {
    sizes.validate()?;
    if !(geometry.radius_m > 0.0) || !(geometry.ref_dist_m > 0.0) {
        return Err(Error::Parameter(format!("invalid geometry {geometry:?}")));
    }
    if !(noise_power > 0.0) || !(power > 0.0) {
        return Err(Error::Parameter(format!(
            "noise power and transmit power must be positive, got N0={noise_power}, P={power}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        let r = geometry.radius_m * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        (r * theta.cos(), r * theta.sin())
    };
    let rrh = point(&mut rng);
    let n_r = sizes.n_rrh_antennas;
    let mut h = Vec::with_capacity(sizes.n_ue());
    for &n_u in &sizes.ue_antennas {
        let ue = point(&mut rng);
        let d = ((ue.0 - rrh.0).powi(2) + (ue.1 - rrh.1).powi(2)).sqrt();
        let std = (geometry.pathloss(d) / 2.0).sqrt();
        let hk = CMatrix::from_fn(n_r, n_u, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c64::new(std * re, std * im)
        });
        h.push(hk);
    }
    UplinkChannel::new(h, HermitianMatrix::scaled_identity(n_r, noise_power), power)
}

/// `Σ_y = P·H H^H + Σ_z`.
pub fn received_covariance(ch: &UplinkChannel) -> HermitianMatrix {
    let full = vec![ch.power(); ch.n_ue()];
    &ch.weighted_gram(&full) + ch.noise_cov()
}

fn check_split(ch: &UplinkChannel, split: &PowerSplit) -> Result<()> {
    if split.n_ue() != ch.n_ue() {
        return Err(Error::Dimension(format!(
            "power split has {} users, channel has {}",
            split.n_ue(),
            ch.n_ue()
        )));
    }
    Ok(())
}

fn check_dim(ch: &UplinkChannel, m: &HermitianMatrix, what: &str) -> Result<()> {
    if m.dim() != ch.n_rrh_antennas() {
        return Err(Error::Dimension(format!(
            "{what} is {0}x{0}, expected {1}x{1}",
            m.dim(),
            ch.n_rrh_antennas()
        )));
    }
    Ok(())
}

/// Sum-rate of the first-layer signals decoded from one description with
/// quantization noise `Ω`, treating layer 2 as noise:
/// `log2det(Σ_y + Ω) − log2det(H P̄₂ H^H + Σ_z + Ω)`.
pub fn layer1_sum_rate(ch: &UplinkChannel, split: &PowerSplit, omega: &HermitianMatrix) -> Result<f64> {
    check_split(ch, split)?;
    check_dim(ch, omega, "Omega")?;
    let noise = ch.noise_cov() + omega;
    let full = &received_covariance(ch) + omega;
    let interf = &ch.weighted_gram(split.layer2()) + &noise;
    Ok((full.log2_det()? - interf.log2_det()?).max(0.0))
}

/// Sum-rate of the second-layer signals after cancelling layer 1, decoded from
/// the central description with noise `Ω₀`:
/// `log2det(H P̄₂ H^H + Σ_z + Ω₀) − log2det(Σ_z + Ω₀)`.
pub fn layer2_sum_rate(ch: &UplinkChannel, split: &PowerSplit, omega0: &HermitianMatrix) -> Result<f64> {
    check_split(ch, split)?;
    check_dim(ch, omega0, "Omega0")?;
    let noise = ch.noise_cov() + omega0;
    let sig = &ch.weighted_gram(split.layer2()) + &noise;
    Ok((sig.log2_det()? - noise.log2_det()?).max(0.0))
}

/// Single-layer full-power joint-decoding sum-rate used by path diversity:
/// `log2det(Σ_y + Ω) − log2det(Σ_z + Ω)`.
pub fn pd_sum_rate(ch: &UplinkChannel, omega: &HermitianMatrix) -> Result<f64> {
    check_dim(ch, omega, "Omega")?;
    let full = &received_covariance(ch) + omega;
    let noise = ch.noise_cov() + omega;
    Ok((full.log2_det()? - noise.log2_det()?).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(h: f64, p: f64, n0: f64) -> UplinkChannel {
        UplinkChannel::new(
            vec![CMatrix::from_element(1, 1, c64::new(h, 0.0))],
            HermitianMatrix::scaled_identity(1, n0),
            p,
        )
        .unwrap()
    }

    #[test]
    fn pathloss_reference_points() {
        let g = Geometry::default();
        assert_eq!(g.pathloss(30.0), 0.5);
        assert_eq!(g.pathloss(0.0), 1.0);
    }

    #[test]
    fn sampling_rejects_bad_parameters() {
        let g = Geometry::default();
        let s = ChannelSizes::uniform(2, 2, 1);
        assert!(sample_channel(&g, &s, 0.0, 1.0, 1).is_err());
        assert!(sample_channel(&g, &s, 1.0, -1.0, 1).is_err());
        assert!(sample_channel(&g, &ChannelSizes::uniform(0, 2, 1), 1.0, 1.0, 1).is_err());
        assert!(sample_channel(&g, &ChannelSizes::uniform(2, 0, 1), 1.0, 1.0, 1).is_err());
        let bad = Geometry { radius_m: 0.0, ..g };
        assert!(sample_channel(&bad, &s, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn scalar_received_covariance() {
        let ch = scalar(1.0, 1.0, 1.0);
        assert!((received_covariance(&ch).get(0, 0).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn layer_rates_scalar_values() {
        let ch = scalar(1.0, 1.0, 1.0);
        let one = HermitianMatrix::identity(1);
        let all_l1 = PowerSplit::from_layer1(vec![1.0], 1.0).unwrap();
        let f1 = layer1_sum_rate(&ch, &all_l1, &one).unwrap();
        assert!((f1 - (1.5f64).log2()).abs() < 1e-12);
        let half = PowerSplit::even(1, 1.0);
        let f1 = layer1_sum_rate(&ch, &half, &HermitianMatrix::zeros(1)).unwrap();
        assert!((f1 - (2.0f64 / 1.5).log2()).abs() < 1e-12);
        let all_l2 = PowerSplit::from_layer1(vec![0.0], 1.0).unwrap();
        assert_eq!(layer1_sum_rate(&ch, &all_l2, &one).unwrap(), 0.0);
        let f2 = layer2_sum_rate(&ch, &all_l2, &one).unwrap();
        assert!((f2 - (1.5f64).log2()).abs() < 1e-12);
        assert_eq!(layer2_sum_rate(&ch, &all_l1, &one).unwrap(), 0.0);
    }

    #[test]
    fn split_validation() {
        assert!(PowerSplit::from_layer1(vec![1.5], 1.0).is_err());
        assert!(PowerSplit::new(vec![0.5], vec![0.6], 1.0).is_err());
        assert!(PowerSplit::new(vec![0.4], vec![0.6], 1.0).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ch = scalar(1.0, 1.0, 1.0);
        let r = pd_sum_rate(&ch, &HermitianMatrix::identity(2));
        assert!(matches!(r, Err(Error::Dimension(_))));
        let r = layer1_sum_rate(&ch, &PowerSplit::even(2, 1.0), &HermitianMatrix::identity(1));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }
}
