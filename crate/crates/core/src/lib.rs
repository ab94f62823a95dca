//! Broadcast coding with multiple-description compression for an uplink C-RAN
//! whose fronthaul is a set of congested packet routes.
//!
//! Users split their power between two superposed layers. The radio unit
//! quantizes its received signal into two descriptions and sends one over each
//! route. The cloud decodes the first layer from any single description and
//! both layers when both descriptions arrive before the deadline. The baseline
//! sends the same single description on every route.
//!
//! * [`channel`]: channel draws and the achievable layer rates.
//! * [`rate_region`]: compression rates of the two descriptions and their
//!   convex bounds.
//! * [`congestion`]: packets, deadlines and the distribution of delivered descriptions.
//! * [`optimizer`]: the concave-convex design at a fixed compression rate and
//!   the search over the rate grid, for both schemes.
//! * [`sim`]: slot-level Monte Carlo check of delivery and expected rate.
//! * [`experiment`]: TOML-driven sweeps with CSV output.
//!
//! ```
//! use fronthaul_mdc::channel::{sample_channel, ChannelSizes, Geometry};
//! use fronthaul_mdc::congestion::FronthaulConfig;
//! use fronthaul_mdc::optimizer::{optimize_pd, search_rf_mdc, SolverConfig};
//!
//! let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 316.2, 7)?;
//! let cfg = FronthaulConfig::two_path(100e6, 0.3);
//! let solver = SolverConfig::default();
//! let mdc = search_rf_mdc(&ch, &cfg, &solver)?;
//! let pd = optimize_pd(&ch, &cfg, &solver)?;
//! assert!(mdc.expected_sum_rate >= pd.expected_sum_rate - 1e-6);
//! # Ok::<(), fronthaul_mdc::error::Error>(())
//! ```

// `!(x > 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod congestion;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod optimizer;
pub mod rate_region;
pub mod sim;
