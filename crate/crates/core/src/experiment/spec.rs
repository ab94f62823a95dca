//! Sweep configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSizes, Geometry};
use crate::congestion::{deadline_slots, FronthaulConfig};
use crate::error::{Error, Result};

/// Design evaluated in a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Mdc,
    Pd,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Mdc => "mdc",
            Scheme::Pd => "pd",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mdc" => Ok(Scheme::Mdc),
            "pd" => Ok(Scheme::Pd),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Fixed compression rates: an explicit list, or `"grid"` for the packet-aligned
/// grid of each fronthaul capacity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FixedRates {
    Values(Vec<f64>),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FronthaulSection {
    #[serde(default = "default_packet_bits")]
    pub packet_bits: u64,
    #[serde(default = "default_frame_symbols")]
    pub frame_symbols: u64,
    #[serde(default = "default_t_max")]
    pub t_max_s: f64,
}

impl Default for FronthaulSection {
    fn default() -> Self {
        Self { packet_bits: default_packet_bits(), frame_symbols: default_frame_symbols(), t_max_s: default_t_max() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default = "default_two")]
    pub n_ue: usize,
    #[serde(default = "default_two")]
    pub n_rrh_antennas: usize,
    #[serde(default = "default_one")]
    pub ue_antennas: usize,
    /// `N0`; the transmit power of each SNR point is `N0 · 10^(snr_db / 10)`.
    #[serde(default = "default_noise")]
    pub noise_power: f64,
    #[serde(default = "default_radius")]
    pub radius_m: f64,
    #[serde(default = "default_ref_dist")]
    pub ref_dist_m: f64,
    #[serde(default = "default_pathloss_exp")]
    pub pathloss_exp: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            n_ue: 2,
            n_rrh_antennas: 2,
            ue_antennas: 1,
            noise_power: default_noise(),
            radius_m: default_radius(),
            ref_dist_m: default_ref_dist(),
            pathloss_exp: default_pathloss_exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    #[serde(rename = "eps_F")]
    pub eps_f: Vec<f64>,
    pub snr_db: Vec<f64>,
    #[serde(rename = "C_F_bps")]
    pub c_f_bps: Vec<f64>,
    /// Present: fixed-rate mode. Absent: the rate is optimized over the grid.
    #[serde(rename = "R_F_fixed", default, skip_serializing_if = "Option::is_none")]
    pub r_f_fixed: Option<FixedRates>,
}

/// A parameter sweep: every combination of the axes, for every scheme and channel draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_n_channels")]
    pub n_channels: u64,
    #[serde(default)]
    pub base_seed: u64,
    /// Monte Carlo trials per row; 0 disables the check.
    #[serde(default)]
    pub trials_mc: u64,
    #[serde(default)]
    pub fronthaul: FronthaulSection,
    #[serde(default)]
    pub channel: ChannelSection,
    pub axes: Axes,
}

fn default_packet_bits() -> u64 {
    6000
}
fn default_frame_symbols() -> u64 {
    5000
}
fn default_t_max() -> f64 {
    1e-3
}
fn default_one() -> usize {
    1
}
fn default_two() -> usize {
    2
}
fn default_noise() -> f64 {
    1.0
}
fn default_radius() -> f64 {
    100.0
}
fn default_ref_dist() -> f64 {
    30.0
}
fn default_pathloss_exp() -> f64 {
    3.0
}
fn default_n_channels() -> u64 {
    50
}

impl SweepSpec {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("sweep specs always serialize")
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            radius_m: self.channel.radius_m,
            ref_dist_m: self.channel.ref_dist_m,
            pathloss_exp: self.channel.pathloss_exp,
        }
    }

    pub fn sizes(&self) -> ChannelSizes {
        ChannelSizes::uniform(self.channel.n_ue, self.channel.n_rrh_antennas, self.channel.ue_antennas)
    }

    /// Two symmetric routes with failure probability `eps` and capacity `c_f`.
    pub fn fronthaul(&self, eps: f64, c_f: f64) -> FronthaulConfig {
        FronthaulConfig {
            packet_bits: self.fronthaul.packet_bits,
            frame_symbols: self.fronthaul.frame_symbols,
            capacity_bps: c_f,
            t_max_s: self.fronthaul.t_max_s,
            eps: vec![eps, eps],
        }
    }

    pub fn power(&self, snr_db: f64) -> f64 {
        self.channel.noise_power * 10f64.powf(snr_db / 10.0)
    }

    pub fn fixed_mode(&self) -> bool {
        self.axes.r_f_fixed.is_some()
    }

    /// Rates solved at capacity `c_f`: the fixed list, the grid, or one optimized entry (`None`).
    pub fn rates_for(&self, c_f: f64) -> Result<Vec<Option<f64>>> {
        Ok(match &self.axes.r_f_fixed {
            None => vec![None],
            Some(FixedRates::Values(v)) => v.iter().map(|&r| Some(r)).collect(),
            Some(FixedRates::Named(_)) => {
                crate::optimizer::rate_grid(&self.fronthaul(0.0, c_f))?.into_iter().map(Some).collect()
            }
        })
    }

    /// Schema and range checks; no solver runs.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schemes.is_empty() {
            return bad("schemes must list at least one of \"mdc\", \"pd\"".into());
        }
        let mut seen = self.schemes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.schemes.len() {
            return bad("schemes must not repeat".into());
        }
        if self.n_channels == 0 {
            return bad("n_channels must be at least 1".into());
        }
        let axes = &self.axes;
        for (name, v) in [("eps_F", &axes.eps_f), ("snr_db", &axes.snr_db), ("C_F_bps", &axes.c_f_bps)] {
            if v.is_empty() {
                return bad(format!("axis {name} is empty"));
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                return bad(format!("axis {name} has non-finite value {x}"));
            }
        }
        if let Some(e) = axes.eps_f.iter().find(|e| !(0.0..1.0).contains(*e)) {
            return bad(format!("eps_F value {e} outside [0, 1)"));
        }
        if let Some(c) = axes.c_f_bps.iter().find(|c| **c <= 0.0) {
            return bad(format!("C_F_bps value {c} must be positive"));
        }
        match &axes.r_f_fixed {
            Some(FixedRates::Values(v)) => {
                if v.is_empty() {
                    return bad("axis R_F_fixed is empty".into());
                }
                if let Some(r) = v.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
                    return bad(format!("R_F_fixed value {r} must be positive"));
                }
            }
            Some(FixedRates::Named(s)) if s != "grid" => {
                return bad(format!("R_F_fixed must be a list of rates or \"grid\", got {s:?}"));
            }
            _ => {}
        }
        let ch = &self.channel;
        if ch.n_ue == 0 || ch.n_rrh_antennas == 0 || ch.ue_antennas == 0 {
            return bad("channel sizes must be at least 1".into());
        }
        if !(ch.noise_power > 0.0) || !(ch.radius_m > 0.0) || !(ch.ref_dist_m > 0.0) || !ch.pathloss_exp.is_finite() {
            return bad("noise_power, radius_m and ref_dist_m must be positive".into());
        }
        let needs_grid = !matches!(axes.r_f_fixed, Some(FixedRates::Values(_)));
        for &c_f in &axes.c_f_bps {
            let cfg = self.fronthaul(0.0, c_f);
            cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
            if needs_grid && deadline_slots(&cfg) < 1 {
                return bad(format!("C_F_bps = {c_f} leaves no packet slot before the deadline"));
            }
        }
        Ok(())
    }

    /// Rows a run produces.
    pub fn row_count(&self) -> Result<u64> {
        let mut per_channel = 0u64;
        for &c_f in &self.axes.c_f_bps {
            per_channel += self.rates_for(c_f)?.len() as u64;
        }
        Ok(self.schemes.len() as u64
            * self.axes.eps_f.len() as u64
            * self.axes.snr_db.len() as u64
            * per_channel
            * self.n_channels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schemes = ["mdc", "pd"]
[axes]
eps_F = [0.1, 0.5]
snr_db = [25.0]
C_F_bps = [100e6]
"#;

    #[test]
    fn defaults_fill_in() {
        let s = SweepSpec::from_toml_str(MINIMAL).unwrap();
        assert_eq!(s.n_channels, 50);
        assert_eq!(s.fronthaul, FronthaulSection::default());
        assert_eq!(s.channel.n_ue, 2);
        assert!(!s.fixed_mode());
        assert_eq!(s.row_count().unwrap(), 2 * 2 * 50);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut s = SweepSpec::from_toml_str(MINIMAL).unwrap();
        s.axes.r_f_fixed = Some(FixedRates::Values(vec![1.2, 2.4]));
        let back = SweepSpec::from_toml_str(&s.to_toml_string()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn grid_mode_counts_grid_points() {
        let text = MINIMAL.replace("C_F_bps = [100e6]", "C_F_bps = [100e6]\nR_F_fixed = \"grid\"");
        let s = SweepSpec::from_toml_str(&text).unwrap();
        assert_eq!(s.rates_for(100e6).unwrap().len(), 17);
    }

    #[test]
    fn rejects_bad_configs() {
        for (from, to) in [
            ("eps_F = [0.1, 0.5]", "eps_F = []"),
            ("eps_F = [0.1, 0.5]", "eps_F = [1.0]"),
            ("schemes = [\"mdc\", \"pd\"]", "schemes = [\"mdc\", \"mdc\"]"),
            ("schemes = [\"mdc\", \"pd\"]", "schemes = [\"bc\"]"),
            ("C_F_bps = [100e6]", "C_F_bps = [1e6]"),
            ("C_F_bps = [100e6]", "C_F_bps = [100e6]\nR_F_fixed = \"all\""),
            ("[axes]", "n_channels = 0\n[axes]"),
            ("[axes]", "colour = 3\n[axes]"),
        ] {
            let text = MINIMAL.replace(from, to);
            assert!(matches!(SweepSpec::from_toml_str(&text), Err(Error::Config(_))), "{to}");
        }
    }
}
