//! Broadcast coding with two-description compression, for a fixed compression rate.

use std::f64::consts::LN_2;

use super::barrier::{hermitian_basis, hermitian_coords, hermitian_from_coords, AffineHerm, Direction, LogDetFn, Program};
use super::pd::geodesic;
use super::cccp::{barrier_settings, run_cccp, CccpRun, DcProblem};
use super::{covariance_floor, MdcSolution, SolverConfig};
use crate::channel::{layer1_sum_rate, layer2_sum_rate, received_covariance, PowerSplit, UplinkChannel};
use crate::congestion::{description_pmf, DescriptionPmf, FronthaulConfig};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, HermitianMatrix};
use crate::rate_region::{g_individual, g_sum, weighted_objective, LayerWeights, LinearizationPoint, MdcQuantizer};

/// Expected sum-rate `p̄(1) f₁ + p̄(2) f₂` of a design at compression rate `r_f`.
pub fn expected_sum_rate_mdc(
    r_f: f64,
    split: &PowerSplit,
    q: &MdcQuantizer,
    ch: &UplinkChannel,
    cfg: &FronthaulConfig,
) -> Result<f64> {
    let weights = description_pmf(r_f, cfg)?.layer_weights();
    weighted_objective(split, q, weights, ch)
}

/// `ln det` helper in bits.
fn add_log2det(f: &mut LogDetFn, weight: f64, a: &AffineHerm) {
    f.add_logdet(weight / LN_2, a.clone());
}

/// Adds `weight · φ(A(x), A(x_t))`, which is affine in `x`.
pub(super) fn add_phi(f: &mut LogDetFn, weight: f64, a: &AffineHerm, x_t: &[f64]) {
    if weight == 0.0 {
        return;
    }
    let b = HermitianMatrix::hermitize(a.at(x_t)).expect("square");
    let b_inv = b.inverse().expect("linearization point lies in the open domain");
    let log2det_b = b.log2_det().expect("positive definite");
    f.constant += weight * (log2det_b - b.dim() as f64 / LN_2);
    f.add_trace(weight / LN_2, b_inv.as_matrix(), a);
}

/// `[var_offset + i] ↦ i-th Hermitian basis matrix`, embedded at `block` (repeated for each block offset).
pub(super) fn embed(a: AffineHerm, var_offset: usize, n: usize, blocks: &[usize]) -> AffineHerm {
    let basis = hermitian_basis(n);
    let mut a = a;
    for (i, d) in basis.iter().enumerate() {
        let mut dir = Direction::default();
        for &off in blocks {
            dir.entries.extend(d.shifted(off).entries);
        }
        a = a.with(var_offset + i, dir);
    }
    a
}

fn shifted_identity(n: usize, c: f64) -> CMatrix {
    CMatrix::from_diagonal_element(n, n, c64::new(c, 0.0))
}

/// Coordinates: `[P_{1,1} .. P_{N_U,1}, coords(Ω), coords(Ω₀)]`.
pub(super) struct MdcLayout {
    pub n_ue: usize,
    pub n: usize,
}

impl MdcLayout {
    fn omega(&self) -> usize {
        self.n_ue
    }
    fn omega0(&self) -> usize {
        self.n_ue + self.n * self.n
    }
    fn len(&self) -> usize {
        self.n_ue + 2 * self.n * self.n
    }

    fn encode(&self, split: &PowerSplit, q: &MdcQuantizer) -> Vec<f64> {
        let mut x = split.layer1().to_vec();
        x.extend(hermitian_coords(q.omega.as_matrix()));
        x.extend(hermitian_coords(q.omega0.as_matrix()));
        x
    }

    fn decode(&self, x: &[f64], power: f64) -> (PowerSplit, MdcQuantizer) {
        let layer1: Vec<f64> = x[..self.n_ue].iter().map(|p| p.clamp(0.0, power)).collect();
        let split = PowerSplit::from_layer1(layer1, power).expect("clamped");
        let herm = |off: usize| {
            HermitianMatrix::hermitize(hermitian_from_coords(self.n, &x[off..off + self.n * self.n]))
                .expect("square")
        };
        (split, MdcQuantizer { omega: herm(self.omega()), omega0: herm(self.omega0()) })
    }
}

/// Affine maps shared by every surrogate of one MDC problem instance.
struct MdcMaps {
    /// `Σ_y + Ω`
    full_omega: AffineHerm,
    /// `H P̄₂ H^H + Σ_z + Ω`, with `P_{k,2} = P − P_{k,1}`
    interf_omega: AffineHerm,
    /// `H P̄₂ H^H + Σ_z + Ω₀`
    interf_omega0: AffineHerm,
    /// `Σ_z + Ω₀`
    noise_omega0: AffineHerm,
    /// `Ω`
    omega: AffineHerm,
    /// `A₃ Σ_y A₃^H + Ω̄`
    joint3: AffineHerm,
    /// `A₄ Σ_y A₄^H + diag(0, Ω̄)`
    joint4: AffineHerm,
    /// `A₂ Σ_y A₂^H + I₂ ⊗ Ω`
    pair: AffineHerm,
    domain: Vec<AffineHerm>,
    log2det_sigma_y: f64,
}

impl MdcMaps {
    fn new(ch: &UplinkChannel, layout: &MdcLayout, floor: f64) -> Result<Self> {
        let n = layout.n;
        let sigma_y = received_covariance(ch);
        let sz = ch.noise_cov().as_matrix().clone();
        let signal = (sigma_y.as_matrix() - &sz).clone();
        let grams = ch.user_grams();
        let (om, om0) = (layout.omega(), layout.omega0());

        let with_powers = |mut a: AffineHerm| {
            for (k, g) in grams.iter().enumerate() {
                a = a.with(k, Direction::from_dense(g.as_matrix(), 0).scaled(-1.0));
            }
            a
        };
        let full_omega = embed(AffineHerm::constant(sigma_y.as_matrix().clone()), om, n, &[0]);
        let interf_omega = embed(with_powers(AffineHerm::constant(&signal + &sz)), om, n, &[0]);
        let interf_omega0 = embed(with_powers(AffineHerm::constant(&signal + &sz)), om0, n, &[0]);
        let noise_omega0 = embed(AffineHerm::constant(sz.clone()), om0, n, &[0]);
        let omega = embed(AffineHerm::constant(CMatrix::zeros(n, n)), om, n, &[0]);
        let joint3 = embed(
            embed(AffineHerm::constant(sigma_y.replicate(3).into_matrix()), om0, n, &[0]),
            om,
            n,
            &[n, 2 * n],
        );
        let joint4 = embed(
            embed(AffineHerm::constant(sigma_y.replicate(4).into_matrix()), om0, n, &[n]),
            om,
            n,
            &[2 * n, 3 * n],
        );
        let pair = embed(AffineHerm::constant(sigma_y.replicate(2).into_matrix()), om, n, &[0, n]);

        let mut domain = vec![
            embed(AffineHerm::constant(shifted_identity(n, -floor)), om, n, &[0]),
            embed(AffineHerm::constant(shifted_identity(n, -floor)), om0, n, &[0]),
        ];
        let one = CMatrix::from_element(1, 1, c64::new(1.0, 0.0));
        for k in 0..layout.n_ue {
            domain.push(AffineHerm::constant(CMatrix::zeros(1, 1)).with(k, Direction::from_dense(&one, 0)));
            domain.push(
                AffineHerm::constant(shifted_identity(1, ch.power()))
                    .with(k, Direction::from_dense(&one, 0).scaled(-1.0)),
            );
        }
        Ok(Self {
            full_omega,
            interf_omega,
            interf_omega0,
            noise_omega0,
            omega,
            joint3,
            joint4,
            pair,
            domain,
            log2det_sigma_y: sigma_y.log2_det()?,
        })
    }
}

/// Inputs of one convexified subproblem.
#[derive(Clone, Debug)]
pub struct InnerProblem<'a> {
    pub r_f: f64,
    pub weights: LayerWeights,
    pub ch: &'a UplinkChannel,
    pub at: &'a LinearizationPoint,
}

/// Solution of one convexified subproblem.
#[derive(Clone, Debug)]
pub struct InnerSolution {
    pub split: PowerSplit,
    pub quantizer: MdcQuantizer,
    /// Surrogate objective at the returned point, bits per symbol.
    pub surrogate_objective: f64,
    /// Newton decrement of the barrier-augmented surrogate at the final barrier weight.
    pub kkt_residual: f64,
    pub newton_steps: usize,
    pub converged: bool,
}

pub(super) struct MdcProblem<'a> {
    ch: &'a UplinkChannel,
    sigma_y: HermitianMatrix,
    r_f: f64,
    weights: LayerWeights,
    layout: MdcLayout,
    maps: MdcMaps,
}

impl<'a> MdcProblem<'a> {
    pub(super) fn new(ch: &'a UplinkChannel, r_f: f64, weights: LayerWeights) -> Result<Self> {
        if !(r_f > 0.0) {
            return Err(Error::Parameter(format!("compression rate must be positive, got {r_f}")));
        }
        let sigma_y = received_covariance(ch);
        let layout = MdcLayout { n_ue: ch.n_ue(), n: ch.n_rrh_antennas() };
        let maps = MdcMaps::new(ch, &layout, covariance_floor(&sigma_y))?;
        Ok(Self { ch, sigma_y, r_f, weights, layout, maps })
    }

    fn floor(&self) -> f64 {
        covariance_floor(&self.sigma_y)
    }

    /// Deterministic start: `P_{k,1} = P/2`, `Ω = Ω₀ = c I` with `c` the smallest power of
    /// two (above twice the floor) strictly satisfying both rate constraints.
    pub(super) fn initial_point(&self, scale_up: u32) -> Result<LinearizationPoint> {
        let n = self.layout.n;
        let floor = self.floor();
        let mut k = (2.0 * floor).log2().ceil() as i32;
        let feasible = |c: f64| -> Result<bool> {
            let q = MdcQuantizer::scaled_identity(n, c);
            Ok(g_individual(&self.sigma_y, &q)? < self.r_f && g_sum(&self.sigma_y, &q)? < 2.0 * self.r_f)
        };
        let mut guard = 0;
        while !feasible(2f64.powi(k))? {
            k += 1;
            guard += 1;
            if guard > 2000 {
                return Err(Error::Infeasible("no scaled-identity quantizer meets the rate".into()));
            }
        }
        let c = 2f64.powi(k + scale_up as i32);
        Ok(LinearizationPoint {
            split: PowerSplit::even(self.layout.n_ue, self.ch.power()),
            quantizer: MdcQuantizer::scaled_identity(n, c),
        })
    }

    fn program_weights(&self) -> (f64, f64) {
        let s = self.objective_scale();
        (self.weights.layer1 / s, self.weights.layer2 / s)
    }

    fn build(&self, x_t: &[f64]) -> Program {
        let m = &self.maps;
        let nv = self.layout.len();
        let (w1, w2) = self.program_weights();

        let mut obj = LogDetFn::new(nv);
        if w1 != 0.0 {
            add_log2det(&mut obj, w1, &m.full_omega);
            add_phi(&mut obj, -w1, &m.interf_omega, x_t);
        }
        if w2 != 0.0 {
            add_log2det(&mut obj, w2, &m.interf_omega0);
            add_phi(&mut obj, -w2, &m.noise_omega0, x_t);
        }

        let mut g1 = LogDetFn::new(nv);
        add_phi(&mut g1, 1.0, &m.full_omega, x_t);
        add_log2det(&mut g1, -1.0, &m.omega);
        g1.constant -= self.r_f;

        let mut gsum = LogDetFn::new(nv);
        gsum.constant += m.log2det_sigma_y - 2.0 * self.r_f;
        add_phi(&mut gsum, 1.0, &m.joint3, x_t);
        add_log2det(&mut gsum, -1.0, &m.joint4);
        add_phi(&mut gsum, 2.0, &m.full_omega, x_t);
        add_log2det(&mut gsum, -1.0, &m.pair);

        Program { objective: obj, constraints: vec![g1, gsum], domain: m.domain.clone() }
    }

    /// Moves a start into the open domain: powers at least a relative margin
    /// inside `(0, P)`, covariances at least twice the floor.
    fn interior(&self, at: &LinearizationPoint) -> Result<LinearizationPoint> {
        let p = self.ch.power();
        let lo = POWER_MARGIN * p;
        let layer1 = at.split.layer1().iter().map(|&x| x.clamp(lo, p - lo)).collect();
        let lift = |m: &HermitianMatrix| {
            let need = 2.0 * self.floor() - m.min_eigenvalue();
            if need > 0.0 {
                m + &HermitianMatrix::scaled_identity(m.dim(), need)
            } else {
                m.clone()
            }
        };
        Ok(LinearizationPoint {
            split: PowerSplit::from_layer1(layer1, p)?,
            quantizer: MdcQuantizer { omega: lift(&at.quantizer.omega), omega0: lift(&at.quantizer.omega0) },
        })
    }

    pub(super) fn encode(&self, at: &LinearizationPoint) -> Vec<f64> {
        self.layout.encode(&at.split, &at.quantizer)
    }

    pub(super) fn decode(&self, x: &[f64]) -> (PowerSplit, MdcQuantizer) {
        self.layout.decode(x, self.ch.power())
    }
}

impl DcProblem for MdcProblem<'_> {
    fn exact_objective(&self, x: &[f64]) -> Result<f64> {
        let (split, q) = self.decode(x);
        weighted_objective(&split, &q, self.weights, self.ch)
    }

    fn constraint_slack(&self, x: &[f64]) -> Result<f64> {
        let (_, q) = self.decode(x);
        let v1 = g_individual(&self.sigma_y, &q)? - self.r_f;
        let v2 = g_sum(&self.sigma_y, &q)? - 2.0 * self.r_f;
        Ok(v1.max(v2))
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.maps.domain.iter().all(|d| d.is_pd_at(x))
    }

    fn extrapolated(&self, x_old: &[f64], x_new: &[f64], s: f64) -> Vec<f64> {
        let (split_a, qa) = self.decode(x_old);
        let (split_b, qb) = self.decode(x_new);
        let mut y: Vec<f64> = split_b.layer1().iter().zip(split_a.layer1()).map(|(b, a)| b + s * (b - a)).collect();
        y.extend(hermitian_coords(geodesic(&qa.omega, &qb.omega, s).as_matrix()));
        y.extend(hermitian_coords(geodesic(&qa.omega0, &qb.omega0, s).as_matrix()));
        y
    }

    fn surrogate(&self, x_t: &[f64]) -> Program {
        self.build(x_t)
    }

    fn objective_scale(&self) -> f64 {
        let s = self.weights.layer1.abs().max(self.weights.layer2.abs());
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

/// Solves the convexified subproblem around `problem.at` with a barrier method.
///
/// The returned point is strictly feasible for the surrogate constraints and
/// hence for the original rate constraints. Hitting the Newton cap yields
/// `converged = false` together with the last iterate.
pub fn solve_inner_convex(problem: &InnerProblem<'_>, solver: &SolverConfig) -> Result<InnerSolution> {
    let p = MdcProblem::new(problem.ch, problem.r_f, problem.weights)?;
    let x_t = p.encode(problem.at);
    let program = p.build(&x_t);
    let settings = barrier_settings(solver, p.objective_scale(), 1.0);
    let out = program.solve(&x_t, &settings).ok_or_else(|| {
        Error::Infeasible("linearization point is not strictly feasible for the convex subproblem".into())
    })?;
    let (split, quantizer) = p.decode(&out.x);
    Ok(InnerSolution {
        split,
        quantizer,
        surrogate_objective: out.objective * p.objective_scale(),
        kkt_residual: out.kkt_residual,
        newton_steps: out.newton_steps,
        converged: out.converged,
    })
}

/// Quantization noise standing in for "description not used", relative to `tr(Σ_y)/n`.
const UNUSED_DESCRIPTION_NOISE: f64 = 1e8;

/// Relative margin keeping a user-supplied start inside the power box.
const POWER_MARGIN: f64 = 1e-9;

fn assemble(
    r_f: f64,
    ch: &UplinkChannel,
    pmf: &DescriptionPmf,
    split: PowerSplit,
    quantizer: MdcQuantizer,
    run: CccpRun,
) -> Result<MdcSolution> {
    let weights = pmf.layer_weights();
    let rate_layer1 = layer1_sum_rate(ch, &split, &quantizer.omega)?;
    let rate_layer2 = layer2_sum_rate(ch, &split, &quantizer.omega0)?;
    let mut diagnostics = run.diagnostics;
    // Layer 1 must also be decodable from the central description alone.
    let from_central = layer1_sum_rate(ch, &split, &quantizer.omega0)?;
    if weights.layer2 > 0.0 && from_central < rate_layer1 - 1e-9 {
        diagnostics.push(format!("layer-1 rate {rate_layer1:.6} exceeds I(x1; y0) = {from_central:.6}"));
    }
    Ok(MdcSolution {
        r_f,
        split,
        quantizer,
        rate_layer1,
        rate_layer2,
        expected_sum_rate: weights.layer1 * rate_layer1 + weights.layer2 * rate_layer2,
        pmf: pmf.clone(),
        iterations: run.iterations,
        converged: run.converged,
        diagnostics,
        objective_history: run.history,
        kkt_residual: run.kkt_residual,
    })
}

/// The two single-description boundary points of the design space.
///
/// With `P_{k,2} = 0` and an unused central description the scheme sends one
/// description per route at `R_F` (path diversity). With `P_{k,1} = 0` and
/// unused side descriptions only the central description matters, compressed
/// at the sum-rate `2R_F`. The procedure reaches either point only in the limit.
fn boundary_candidates(
    problem: &MdcProblem<'_>,
    cfg: &FronthaulConfig,
    solver: &SolverConfig,
) -> Result<Vec<(PowerSplit, MdcQuantizer, CccpRun)>> {
    let ch = problem.ch;
    let n = problem.layout.n;
    let unused = HermitianMatrix::scaled_identity(n, UNUSED_DESCRIPTION_NOISE * problem.sigma_y.trace() / n as f64);
    let power = ch.power();
    let mut out = Vec::new();
    for (layer1, rate) in [(power, problem.r_f), (0.0, 2.0 * problem.r_f)] {
        let pd = super::pd::cccp_fixed_rf_pd(rate, ch, cfg, None, solver)?;
        let split = PowerSplit::from_layer1(vec![layer1; ch.n_ue()], power)?;
        let quantizer = if layer1 > 0.0 {
            MdcQuantizer { omega: pd.omega, omega0: unused.clone() }
        } else {
            MdcQuantizer { omega: unused.clone(), omega0: pd.omega }
        };
        let v1 = g_individual(&problem.sigma_y, &quantizer)? - problem.r_f;
        let v2 = g_sum(&problem.sigma_y, &quantizer)? - 2.0 * problem.r_f;
        if v1.max(v2) > solver.feasibility_tol {
            continue;
        }
        let run = CccpRun {
            x: Vec::new(),
            objective: f64::NAN,
            history: Vec::new(),
            iterations: pd.iterations,
            converged: pd.converged,
            kkt_residual: pd.kkt_residual,
            diagnostics: pd.diagnostics,
        };
        out.push((split, quantizer, run));
    }
    Ok(out)
}

/// Runs the concave-convex procedure for a fixed compression rate.
///
/// Without `init`, starts from [`SolverConfig::n_starts`] deterministic
/// scaled-identity points and keeps the best result. A supplied start is
/// nudged into the open power box and above the covariance floor.
///
/// With [`SolverConfig::boundary_candidates`], the two single-description
/// boundary points are solved first. The better one replaces the first
/// scaled-identity start, and either is returned when strictly better than
/// every procedure run.
pub fn cccp_fixed_rf(
    r_f: f64,
    ch: &UplinkChannel,
    cfg: &FronthaulConfig,
    init: Option<&LinearizationPoint>,
    solver: &SolverConfig,
) -> Result<MdcSolution> {
    let pmf = description_pmf(r_f, cfg)?;
    let problem = MdcProblem::new(ch, r_f, pmf.layer_weights())?;
    let corners = if solver.boundary_candidates {
        boundary_candidates(&problem, cfg, solver)?
            .into_iter()
            .map(|(split, quantizer, run)| {
                let value = weighted_objective(&split, &quantizer, pmf.layer_weights(), ch)?;
                Ok((value, split, quantizer, run))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let best_corner = corners.iter().max_by(|a, b| a.0.total_cmp(&b.0));
    let starts: Vec<LinearizationPoint> = match (init, best_corner) {
        (Some(p), _) => vec![problem.interior(p)?],
        (None, Some((_, split, quantizer, _))) => {
            let corner = LinearizationPoint { split: split.clone(), quantizer: quantizer.clone() };
            std::iter::once(problem.interior(&corner))
                .chain((1..solver.n_starts.max(1) as u32).map(|j| problem.initial_point(j)))
                .collect::<Result<_>>()?
        }
        (None, None) => (0..solver.n_starts.max(1) as u32)
            .map(|j| problem.initial_point(j))
            .collect::<Result<_>>()?,
    };
    let mut best: Option<MdcSolution> = None;
    for start in &starts {
        let run = run_cccp(&problem, problem.encode(start), solver)?;
        let (split, quantizer) = problem.decode(&run.x);
        let sol = assemble(r_f, ch, &pmf, split, quantizer, run)?;
        if best.as_ref().is_none_or(|b| sol.expected_sum_rate > b.expected_sum_rate) {
            best = Some(sol);
        }
    }
    let mut best = best.expect("at least one start");
    for (value, split, quantizer, mut run) in corners {
        if value > best.expected_sum_rate {
            run.history = best.objective_history.clone();
            run.history.push(value);
            run.iterations = best.iterations;
            run.diagnostics.push("returned a single-description boundary point".into());
            best = assemble(r_f, ch, &pmf, split, quantizer, run)?;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, ChannelSizes, Geometry};
    use crate::rate_region::{surrogate_g1, surrogate_gsum, surrogate_objective};

    fn channel(seed: u64) -> UplinkChannel {
        sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 100.0, seed).unwrap()
    }

    #[test]
    fn program_matches_surrogate_functions() {
        let ch = channel(3);
        let weights = LayerWeights { layer1: 0.9, layer2: 0.6 };
        let p = MdcProblem::new(&ch, 4.0, weights).unwrap();
        let at = p.initial_point(0).unwrap();
        let x_t = p.encode(&at);
        let prog = p.build(&x_t);
        // A different feasible-ish point.
        let mut x = x_t.clone();
        x[0] *= 0.3;
        x[2] *= 1.7;
        x[p.layout.omega0()] *= 2.5;
        let (split, q) = p.decode(&x);
        let sigma_y = received_covariance(&ch);
        let s = p.objective_scale();
        let f = prog.objective.value(&x).unwrap() * s;
        let f_ref = surrogate_objective(&split, &q, &at, weights, &ch).unwrap();
        assert!((f - f_ref).abs() < 1e-9 * f_ref.abs().max(1.0), "{f} vs {f_ref}");
        let g1 = prog.constraints[0].value(&x).unwrap() + 4.0;
        assert!((g1 - surrogate_g1(&q, &at, &sigma_y).unwrap()).abs() < 1e-9);
        let gs = prog.constraints[1].value(&x).unwrap() + 8.0;
        assert!((gs - surrogate_gsum(&q, &at, &sigma_y).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn initial_point_is_strictly_feasible() {
        let ch = channel(5);
        for r_f in [0.3, 1.2, 6.0, 20.4] {
            let p = MdcProblem::new(&ch, r_f, LayerWeights::PERFECT).unwrap();
            let at = p.initial_point(0).unwrap();
            let x = p.encode(&at);
            assert!(p.build(&x).strictly_feasible(&x), "r_f = {r_f}");
        }
    }

    #[test]
    fn rejects_nonpositive_rate() {
        let ch = channel(1);
        assert!(MdcProblem::new(&ch, 0.0, LayerWeights::PERFECT).is_err());
    }
}
