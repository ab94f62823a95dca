//! Joint optimization of broadcast-coding powers, quantization covariances and
//! the compression output rate.
//!
//! For a fixed compression rate the problem is a difference of concave
//! functions; [`cccp_fixed_rf`] runs the concave-convex procedure, solving each
//! convexified subproblem with a log-barrier Newton method. [`search_rf_mdc`]
//! and [`optimize_pd`] wrap it in the 1-D search over the packet-aligned rate grid.

pub(crate) mod barrier;
mod cccp;
mod mdc;
mod pd;
mod search;

pub use mdc::{cccp_fixed_rf, expected_sum_rate_mdc, solve_inner_convex, InnerProblem, InnerSolution};
pub use pd::{cccp_fixed_rf_pd, pd_compression_rate};
pub use search::{optimize_pd, pd_rate_grid, rate_grid, rf_grid_mdc, search_rf_mdc};

use crate::channel::PowerSplit;
use crate::congestion::DescriptionPmf;
use crate::linalg::HermitianMatrix;
use crate::rate_region::MdcQuantizer;

/// Tolerances and iteration limits of the optimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Outer loop stops once the relative objective change drops to this level.
    pub rel_tol: f64,
    pub max_outer: usize,
    /// Allowed violation of the rate constraints, in bits per symbol.
    pub feasibility_tol: f64,
    /// Bound on the stationarity residual of each convex subproblem.
    pub kkt_tol: f64,
    /// Newton-step cap per convex subproblem.
    pub max_newton: usize,
    /// Number of deterministic starts. The first is the better single-description
    /// point (MDC) or the reverse water-filling quantizer (PD); start `j > 0` is
    /// `Ω = Ω₀ = 2^j c I`.
    pub n_starts: usize,
    /// Barrier duality-gap target of each subproblem, in bits per symbol.
    pub barrier_gap: f64,
    /// After each outer iteration, keep doubling the step while the exact
    /// objective increases and the constraints stay strictly satisfied.
    pub extrapolate: bool,
    /// Also evaluate the two single-description boundary points of the MDC design.
    pub boundary_candidates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_outer: 100,
            feasibility_tol: 1e-6,
            kkt_tol: 1e-6,
            max_newton: 500,
            n_starts: 1,
            barrier_gap: 1e-8,
            extrapolate: true,
            boundary_candidates: true,
        }
    }
}

/// Result of the MDC design for one channel and compression rate.
#[derive(Clone, Debug, PartialEq)]
pub struct MdcSolution {
    pub r_f: f64,
    pub split: PowerSplit,
    pub quantizer: MdcQuantizer,
    pub rate_layer1: f64,
    pub rate_layer2: f64,
    pub expected_sum_rate: f64,
    pub pmf: DescriptionPmf,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostics: Vec<String>,
    /// Exact objective after initialization and after every accepted outer iteration.
    pub objective_history: Vec<f64>,
    /// Stationarity residual of the last convex subproblem.
    pub kkt_residual: f64,
}

impl MdcSolution {
    pub fn omega(&self) -> &HermitianMatrix {
        &self.quantizer.omega
    }

    pub fn omega0(&self) -> &HermitianMatrix {
        &self.quantizer.omega0
    }
}

/// Result of the path-diversity baseline for one channel and compression rate.
#[derive(Clone, Debug, PartialEq)]
pub struct PdSolution {
    pub r_f: f64,
    pub omega: HermitianMatrix,
    pub sum_rate: f64,
    /// `Pr[at least one copy arrives]`.
    pub success_prob: f64,
    pub expected_sum_rate: f64,
    pub pmf: DescriptionPmf,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostics: Vec<String>,
    pub objective_history: Vec<f64>,
    pub kkt_residual: f64,
}

/// Smallest quantization-noise level kept during optimization, `1e-8 tr(Σ_y)/n`.
pub fn covariance_floor(sigma_y: &HermitianMatrix) -> f64 {
    1e-8 * sigma_y.trace() / sigma_y.dim() as f64
}
