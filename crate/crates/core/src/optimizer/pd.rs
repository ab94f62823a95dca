//! Path-diversity baseline: one description duplicated on every route.

use super::barrier::{hermitian_coords, hermitian_from_coords, AffineHerm, LogDetFn, Program};
use super::cccp::{run_cccp, DcProblem};
use super::mdc::{add_phi, embed};
use super::{covariance_floor, PdSolution, SolverConfig};
use crate::channel::{pd_sum_rate, received_covariance, UplinkChannel};
use crate::congestion::{description_pmf, FronthaulConfig};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, HermitianMatrix};

use std::f64::consts::LN_2;

/// Compression rate of a single description, `log2det(Σ_y + Ω) − log2det(Ω)`.
pub fn pd_compression_rate(sigma_y: &HermitianMatrix, omega: &HermitianMatrix) -> Result<f64> {
    if sigma_y.dim() != omega.dim() {
        return Err(Error::Dimension(format!(
            "Sigma_y is {0}x{0}, Omega is {1}x{1}",
            sigma_y.dim(),
            omega.dim()
        )));
    }
    let den = omega
        .log2_det()
        .map_err(|_| Error::NumericalDomain("singular Omega: compression rate is +inf".into()))?;
    Ok(((sigma_y + omega).log2_det()? - den).max(0.0))
}

/// `exp((1 + s) log B − s log A)`, continuing the path from `A` to `B` in the log domain.
pub(super) fn geodesic(a: &HermitianMatrix, b: &HermitianMatrix, s: f64) -> HermitianMatrix {
    let la = a.map_eigenvalues(|l| l.max(f64::MIN_POSITIVE).ln());
    let lb = b.map_eigenvalues(|l| l.max(f64::MIN_POSITIVE).ln());
    (&lb.scale(1.0 + s) - &la.scale(s)).map_eigenvalues(f64::exp)
}

/// Noise given to an eigenmode the rate budget leaves out, relative to its
/// whitened power. Larger values make the barrier Hessian ill-conditioned.
const DROPPED_MODE_NOISE: f64 = 1e4;

struct PdProblem<'a> {
    ch: &'a UplinkChannel,
    sigma_y: HermitianMatrix,
    r_f: f64,
    n: usize,
    full_omega: AffineHerm,
    noise_omega: AffineHerm,
    omega: AffineHerm,
    domain: AffineHerm,
}

impl<'a> PdProblem<'a> {
    fn new(ch: &'a UplinkChannel, r_f: f64) -> Result<Self> {
        if !(r_f > 0.0) {
            return Err(Error::Parameter(format!("compression rate must be positive, got {r_f}")));
        }
        let n = ch.n_rrh_antennas();
        let sigma_y = received_covariance(ch);
        let floor = covariance_floor(&sigma_y);
        let var = |base: CMatrix| embed(AffineHerm::constant(base), 0, n, &[0]);
        Ok(Self {
            ch,
            r_f,
            n,
            full_omega: var(sigma_y.as_matrix().clone()),
            noise_omega: var(ch.noise_cov().as_matrix().clone()),
            omega: var(CMatrix::zeros(n, n)),
            domain: var(CMatrix::from_diagonal_element(n, n, c64::new(-floor, 0.0))),
            sigma_y,
        })
    }

    /// `Ω = c I` with `c` the smallest power of two above twice the floor meeting the rate strictly.
    fn initial_omega(&self, scale_up: u32) -> Result<HermitianMatrix> {
        let mut k = (2.0 * covariance_floor(&self.sigma_y)).log2().ceil() as i32;
        let mut guard = 0;
        while pd_compression_rate(&self.sigma_y, &HermitianMatrix::scaled_identity(self.n, 2f64.powi(k)))?
            >= self.r_f
        {
            k += 1;
            guard += 1;
            if guard > 2000 {
                return Err(Error::Infeasible("no scaled-identity quantizer meets the rate".into()));
            }
        }
        Ok(HermitianMatrix::scaled_identity(self.n, 2f64.powi(k + scale_up as i32)))
    }

    /// Reverse water-filling over the eigenmodes of the noise-whitened `Σ_y`.
    ///
    /// With white noise the sum-rate and the compression rate separate over
    /// eigenmodes; mode `i` gets noise `μλ_i / (λ_i(1 − μ) − 1)`, or none when the
    /// denominator is not positive, with `μ` set by bisection so the rate is just
    /// below `R_F`. Returns `None` if the result misses the rate or the floor.
    fn water_filling_omega(&self) -> Option<HermitianMatrix> {
        let whiten = self.ch.noise_cov().map_eigenvalues(|l| 1.0 / l.sqrt());
        let colour = self.ch.noise_cov().map_eigenvalues(f64::sqrt);
        let (lambda, u) = self.sigma_y.conjugate_by(whiten.as_matrix()).eigh();
        let noise_at = |mu: f64| -> Vec<f64> {
            lambda
                .iter()
                .map(|&l| {
                    let big = DROPPED_MODE_NOISE * l.max(1.0);
                    let den = l * (1.0 - mu) - 1.0;
                    if den <= 0.0 { big } else { (mu * l / den).min(big) }
                })
                .collect()
        };
        let rate = |w: &[f64]| -> f64 { lambda.iter().zip(w).map(|(l, w)| (1.0 + l.max(0.0) / w).log2()).sum() };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rate(&noise_at(mid)) < self.r_f * (1.0 - 1e-9) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let w = noise_at(hi);
        let white = HermitianMatrix::from_real_diagonal(&w).conjugate_by(&u);
        let omega = white.conjugate_by(colour.as_matrix());
        let floor = 2.0 * covariance_floor(&self.sigma_y);
        let omega = omega.map_eigenvalues(|l| l.max(floor));
        let ok = pd_compression_rate(&self.sigma_y, &omega).is_ok_and(|g| g < self.r_f);
        ok.then_some(omega)
    }

    fn decode(&self, x: &[f64]) -> HermitianMatrix {
        HermitianMatrix::hermitize(hermitian_from_coords(self.n, x)).expect("square")
    }
}

impl DcProblem for PdProblem<'_> {
    fn exact_objective(&self, x: &[f64]) -> Result<f64> {
        pd_sum_rate(self.ch, &self.decode(x))
    }

    fn constraint_slack(&self, x: &[f64]) -> Result<f64> {
        Ok(pd_compression_rate(&self.sigma_y, &self.decode(x))? - self.r_f)
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.domain.is_pd_at(x)
    }

    fn extrapolated(&self, x_old: &[f64], x_new: &[f64], s: f64) -> Vec<f64> {
        hermitian_coords(geodesic(&self.decode(x_old), &self.decode(x_new), s).as_matrix())
    }

    fn surrogate(&self, x_t: &[f64]) -> Program {
        let nv = self.n * self.n;
        let mut obj = LogDetFn::new(nv);
        obj.add_logdet(1.0 / LN_2, self.full_omega.clone());
        add_phi(&mut obj, -1.0, &self.noise_omega, x_t);

        let mut g = LogDetFn::new(nv);
        add_phi(&mut g, 1.0, &self.full_omega, x_t);
        g.add_logdet(-1.0 / LN_2, self.omega.clone());
        g.constant -= self.r_f;

        Program { objective: obj, constraints: vec![g], domain: vec![self.domain.clone()] }
    }

    fn objective_scale(&self) -> f64 {
        1.0
    }
}

/// Concave-convex procedure for the path-diversity quantizer at a fixed compression rate.
///
/// The delivery probability does not depend on `Ω`, so the design maximizes the
/// sum-rate and scales it by `Pr[at least one copy arrives]`.
pub fn cccp_fixed_rf_pd(
    r_f: f64,
    ch: &UplinkChannel,
    cfg: &FronthaulConfig,
    init: Option<&HermitianMatrix>,
    solver: &SolverConfig,
) -> Result<PdSolution> {
    let pmf = description_pmf(r_f, cfg)?;
    let success_prob = pmf.at_least_one();
    let problem = PdProblem::new(ch, r_f)?;
    let starts: Vec<HermitianMatrix> = match init {
        Some(o) => vec![o.clone()],
        None => match problem.water_filling_omega() {
            Some(o) => std::iter::once(Ok(o))
                .chain((1..solver.n_starts.max(1) as u32).map(|j| problem.initial_omega(j)))
                .collect::<Result<_>>()?,
            None => (0..solver.n_starts.max(1) as u32)
                .map(|j| problem.initial_omega(j))
                .collect::<Result<_>>()?,
        },
    };
    let mut best: Option<PdSolution> = None;
    for start in &starts {
        let run = run_cccp(&problem, hermitian_coords(start.as_matrix()), solver)?;
        let omega = problem.decode(&run.x);
        let sum_rate = pd_sum_rate(ch, &omega)?;
        let sol = PdSolution {
            r_f,
            omega,
            sum_rate,
            success_prob,
            expected_sum_rate: success_prob * sum_rate,
            pmf: pmf.clone(),
            iterations: run.iterations,
            converged: run.converged,
            diagnostics: run.diagnostics,
            objective_history: run.history,
            kkt_residual: run.kkt_residual,
        };
        if best.as_ref().is_none_or(|b| sol.sum_rate > b.sum_rate) {
            best = Some(sol);
        }
    }
    Ok(best.expect("at least one start"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, ChannelSizes, Geometry};

    #[test]
    fn compression_rate_scalar() {
        let sy = HermitianMatrix::scaled_identity(1, 3.0);
        let om = HermitianMatrix::scaled_identity(1, 1.0);
        assert!((pd_compression_rate(&sy, &om).unwrap() - 2.0).abs() < 1e-12);
        assert!(pd_compression_rate(&sy, &HermitianMatrix::zeros(1)).is_err());
    }

    #[test]
    fn returned_point_meets_rate() {
        let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 300.0, 9).unwrap();
        let cfg = FronthaulConfig::two_path(100e6, 0.3);
        let sol = cccp_fixed_rf_pd(6.0, &ch, &cfg, None, &SolverConfig::default()).unwrap();
        let g = pd_compression_rate(&received_covariance(&ch), &sol.omega).unwrap();
        assert!(g <= 6.0 + 1e-6, "{g}");
        assert!(sol.converged, "{:?}", sol.diagnostics);
        for w in sol.objective_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-8);
        }
    }
}
