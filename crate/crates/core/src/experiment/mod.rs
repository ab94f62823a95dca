//! Configuration-driven parameter sweeps over fronthaul error probability,
//! SNR, capacity and compression rate, with raw per-channel CSV output and a
//! per-point summary.
//!
//! A sweep file is TOML:
//!
//! ```toml
//! schemes = ["mdc", "pd"]   # any of "mdc", "pd"
//! n_channels = 50           # channel draws per point, seeds base_seed + k
//! base_seed = 0
//! trials_mc = 0             # Monte Carlo trials per row, 0 = off
//!
//! [fronthaul]               # optional, defaults shown
//! packet_bits = 6000
//! frame_symbols = 5000
//! t_max_s = 1e-3
//!
//! [channel]                 # optional, defaults shown
//! n_ue = 2
//! n_rrh_antennas = 2
//! ue_antennas = 1
//! noise_power = 1.0
//! radius_m = 100.0
//! ref_dist_m = 30.0
//! pathloss_exp = 3.0
//!
//! [axes]
//! eps_F = [0.1, 0.3]        # per-slot failure probability of both routes
//! snr_db = [25.0]
//! C_F_bps = [100e6]
//! R_F_fixed = "grid"        # optional: a list of rates, or "grid"
//! ```
//!
//! Without `R_F_fixed` each row holds the best rate of the packet-aligned grid.

mod spec;
mod summarize;
mod sweep;

pub use spec::{Axes, ChannelSection, FixedRates, FronthaulSection, Scheme, SweepSpec};
pub use summarize::{emit_summary, is_fixed_rate, summarize, write_summary, SummaryRow, SUMMARY_HEADER};
pub use sweep::{emit_csv, parse_csv, read_csv, run_sweep, write_csv, SweepOptions, SweepRecord, CSV_HEADER};
