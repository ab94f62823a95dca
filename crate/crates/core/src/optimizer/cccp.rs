//! The concave-convex procedure shared by the MDC and path-diversity designs.

use super::barrier::{BarrierSettings, Program};
use super::SolverConfig;
use crate::error::Result;

/// Longest run of step doublings tried after one outer iteration.
const MAX_DOUBLINGS: usize = 30;

/// A difference-of-concave problem over a real coordinate vector.
pub(crate) trait DcProblem {
    /// Exact objective in bits per symbol.
    fn exact_objective(&self, x: &[f64]) -> Result<f64>;

    /// Largest `g_j(x) − bound_j` over the original rate constraints (negative when strictly met).
    fn constraint_slack(&self, x: &[f64]) -> Result<f64>;

    /// Whether `x` lies in the open domain (powers inside the box, covariances above the floor).
    fn in_domain(&self, x: &[f64]) -> bool;

    /// Convexified subproblem around `x_t`; its objective is the surrogate
    /// divided by [`objective_scale`](Self::objective_scale).
    fn surrogate(&self, x_t: &[f64]) -> Program;

    /// Positive factor between the program objective and bits per symbol.
    fn objective_scale(&self) -> f64;

    /// The point `s` steps of `x_new − x_old` beyond `x_new`.
    fn extrapolated(&self, x_old: &[f64], x_new: &[f64], s: f64) -> Vec<f64> {
        x_new.iter().zip(x_old).map(|(a, b)| a + s * (a - b)).collect()
    }

    fn constraint_violation(&self, x: &[f64]) -> Result<f64> {
        Ok(self.constraint_slack(x)?.max(0.0))
    }
}

pub(crate) struct CccpRun {
    pub x: Vec<f64>,
    pub objective: f64,
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
    pub diagnostics: Vec<String>,
}

pub(crate) fn barrier_settings(cfg: &SolverConfig, scale: f64, t_init: f64) -> BarrierSettings {
    BarrierSettings {
        t_init,
        gap_tol: cfg.barrier_gap / scale.max(f64::MIN_POSITIVE),
        max_newton: cfg.max_newton,
        ..BarrierSettings::default()
    }
}

/// Takes 1, 2, 4, … further steps beyond `x_new` while the exact objective
/// keeps increasing and the point stays strictly feasible. Returns the best point.
fn extrapolate<P: DcProblem>(problem: &P, x_old: &[f64], x_new: Vec<f64>, f_new: f64) -> Result<(Vec<f64>, f64)> {
    let mut best = (x_new.clone(), f_new);
    let mut s = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        let y = problem.extrapolated(x_old, &x_new, s);
        if !problem.in_domain(&y) || !(problem.constraint_slack(&y)? < 0.0) {
            break;
        }
        let fy = problem.exact_objective(&y)?;
        if !(fy > best.1) {
            break;
        }
        best = (y, fy);
        s *= 2.0;
    }
    Ok(best)
}

pub(crate) fn run_cccp<P: DcProblem>(problem: &P, x0: Vec<f64>, cfg: &SolverConfig) -> Result<CccpRun> {
    let mut x = x0;
    let mut f = problem.exact_objective(&x)?;
    let scale = problem.objective_scale();
    let mut run = CccpRun {
        x: Vec::new(),
        objective: f,
        history: vec![f],
        iterations: 0,
        converged: false,
        kkt_residual: f64::NAN,
        diagnostics: Vec::new(),
    };
    let min_gap = cfg.barrier_gap / scale.max(f64::MIN_POSITIVE);
    let mut settings = barrier_settings(cfg, scale, 1.0);
    for _ in 0..cfg.max_outer {
        let program = problem.surrogate(&x);
        let Some(at_start) = program.objective.value(&x) else {
            run.diagnostics.push("surrogate undefined at the linearization point".into());
            break;
        };
        run.iterations += 1;
        let Some(inner) = program.solve(&x, &settings) else {
            run.diagnostics.push(format!("outer iteration {}: no strictly feasible start", run.iterations));
            break;
        };
        run.kkt_residual = inner.kkt_residual;
        if !inner.converged {
            run.diagnostics.push(format!(
                "outer iteration {}: convex subproblem stopped after {} Newton steps",
                run.iterations, inner.newton_steps
            ));
        }
        if inner.objective <= at_start {
            // The surrogate cannot be improved: x is a fixed point of the procedure.
            run.converged = true;
            break;
        }
        let violation = problem.constraint_violation(&inner.x)?;
        if violation > cfg.feasibility_tol {
            run.diagnostics.push(format!(
                "outer iteration {}: rejected iterate violating rate constraints by {violation:.3e}",
                run.iterations
            ));
            break;
        }
        let gain = inner.objective - at_start;
        let f_inner = problem.exact_objective(&inner.x)?;
        let (x_new, f_new) = if cfg.extrapolate {
            extrapolate(problem, &x, inner.x, f_inner)?
        } else {
            (inner.x, f_inner)
        };
        x = x_new;
        run.history.push(f_new);
        let done = (f_new - f).abs() <= cfg.rel_tol * f.abs().max(f_new.abs());
        f = f_new;
        if done {
            run.converged = true;
            break;
        }
        // Solve the next subproblem only as accurately as the progress warrants,
        // starting the barrier path near that accuracy.
        settings.gap_tol = (0.01 * gain).max(min_gap);
        settings.t_init = ((2.0 + x.len() as f64) / gain.max(settings.gap_tol)).max(1.0);
    }
    if !run.converged && run.iterations >= cfg.max_outer {
        run.diagnostics.push(format!("outer loop hit max_outer = {}", cfg.max_outer));
    }
    if run.converged && run.kkt_residual > cfg.kkt_tol {
        run.diagnostics.push(format!(
            "final stationarity residual {:.3e} above tolerance {:.1e}",
            run.kkt_residual, cfg.kkt_tol
        ));
    }
    run.objective = f;
    run.x = x;
    Ok(run)
}
