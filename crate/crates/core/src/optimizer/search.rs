//! One-dimensional search over packet-aligned compression rates.

use super::mdc::cccp_fixed_rf;
use super::pd::cccp_fixed_rf_pd;
use super::{MdcSolution, PdSolution, SolverConfig};
use crate::channel::{PowerSplit, UplinkChannel};
use crate::congestion::{deadline_slots, DescriptionPmf, FronthaulConfig};
use crate::error::{Error, Result};

/// `{Δ, 2Δ, …, (T_F + 1)Δ}` with `Δ = B_F / L_W`.
///
/// Rates between grid points need as many packets as the next grid point and
/// are therefore dominated. The top point uses `T_F + 1` packets and can never
/// be delivered; it is kept so the search sees the full range.
pub fn rate_grid(cfg: &FronthaulConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let t_f = deadline_slots(cfg);
    if t_f < 1 {
        return Err(Error::Parameter(format!(
            "deadline allows {t_f} packets; the rate search needs at least one"
        )));
    }
    let step = cfg.rate_step();
    Ok((1..=t_f + 1).map(|k| k as f64 * step).collect())
}

/// Solves the MDC design at every grid rate, in increasing order of `R_F`.
pub fn rf_grid_mdc(ch: &UplinkChannel, cfg: &FronthaulConfig, solver: &SolverConfig) -> Result<Vec<MdcSolution>> {
    rate_grid(cfg)?.into_iter().map(|r| cccp_fixed_rf(r, ch, cfg, None, solver)).collect()
}

fn mdc_fallback(ch: &UplinkChannel, cfg: &FronthaulConfig, like: &MdcSolution) -> MdcSolution {
    MdcSolution {
        r_f: 0.0,
        split: PowerSplit::even(ch.n_ue(), ch.power()),
        quantizer: like.quantizer.clone(),
        rate_layer1: 0.0,
        rate_layer2: 0.0,
        expected_sum_rate: 0.0,
        pmf: DescriptionPmf::nothing_delivered(cfg.eps.len()),
        iterations: 0,
        converged: true,
        diagnostics: vec!["no grid rate has positive expected sum-rate; nothing is sent".into()],
        objective_history: vec![0.0],
        kkt_residual: 0.0,
    }
}

/// Best MDC design over the rate grid and the zero-rate fallback.
///
/// Ties go to the smaller `R_F`. The fallback keeps the quantizer of the first
/// grid point for shape only; with `R_F = 0` nothing is transmitted.
pub fn search_rf_mdc(ch: &UplinkChannel, cfg: &FronthaulConfig, solver: &SolverConfig) -> Result<MdcSolution> {
    let grid = rf_grid_mdc(ch, cfg, solver)?;
    let mut best = mdc_fallback(ch, cfg, &grid[0]);
    for sol in grid {
        if sol.expected_sum_rate > best.expected_sum_rate {
            best = sol;
        }
    }
    Ok(best)
}

/// Solves the path-diversity design at every grid rate, in increasing order of `R_F`.
pub fn pd_rate_grid(ch: &UplinkChannel, cfg: &FronthaulConfig, solver: &SolverConfig) -> Result<Vec<PdSolution>> {
    rate_grid(cfg)?.into_iter().map(|r| cccp_fixed_rf_pd(r, ch, cfg, None, solver)).collect()
}

/// Best path-diversity design over the rate grid and the zero-rate fallback.
pub fn optimize_pd(ch: &UplinkChannel, cfg: &FronthaulConfig, solver: &SolverConfig) -> Result<PdSolution> {
    let grid = pd_rate_grid(ch, cfg, solver)?;
    let mut best = PdSolution {
        r_f: 0.0,
        omega: grid[0].omega.clone(),
        sum_rate: 0.0,
        success_prob: 0.0,
        expected_sum_rate: 0.0,
        pmf: DescriptionPmf::nothing_delivered(cfg.eps.len()),
        iterations: 0,
        converged: true,
        diagnostics: vec!["no grid rate has positive expected sum-rate; nothing is sent".into()],
        objective_history: vec![0.0],
        kkt_residual: 0.0,
    };
    for sol in grid {
        if sol.expected_sum_rate > best.expected_sum_rate {
            best = sol;
        }
    }
    Ok(best)
}
