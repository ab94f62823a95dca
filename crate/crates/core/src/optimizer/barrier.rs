//! Log-barrier Newton method for small concave programs built from log-dets of
//! affine Hermitian matrix functions.
//!
//! A program maximizes `F(x) = Σ w_i ln det(M_i(x)) + c·x + c₀` (with `w_i ≥ 0`)
//! subject to convex constraints `G_j(x) ≤ 0` of the same form (with `w ≤ 0`)
//! and domain constraints `D_k(x) ≻ 0`. Each `M(x) = M₀ + Σ x_v E_v` where the
//! directions `E_v` are sparse Hermitian matrices. Derivatives are exact:
//! `∂ ln det M / ∂x_v = Re tr(M⁻¹E_v)` and
//! `∂² ln det M / ∂x_u ∂x_v = −Re tr(M⁻¹E_u M⁻¹E_v)`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::linalg::{c64, cholesky_pd, CMatrix};

/// Consecutive roundoff-level Newton steps after which the centering stops.
const STALL_STEPS: usize = 5;

/// Sparse Hermitian direction matrix, stored as `(row, col, value)` triplets.
#[derive(Clone, Debug, Default)]
pub(crate) struct Direction {
    pub entries: Vec<(usize, usize, c64)>,
}

impl Direction {
    pub fn from_dense(m: &CMatrix, offset: usize) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != c64::new(0.0, 0.0) {
                    entries.push((i + offset, j + offset, v));
                }
            }
        }
        Self { entries }
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Self { entries: self.entries.iter().map(|&(i, j, v)| (i + offset, j + offset, v)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect() }
    }

    /// `Re tr(A E)` for Hermitian `A`.
    pub fn trace_with(&self, a: &CMatrix) -> f64 {
        self.entries.iter().map(|&(i, j, v)| (v * a[(j, i)]).re).sum()
    }
}

/// Real-coordinate basis of `n x n` Hermitian matrices: `n` diagonal entries,
/// then a real and an imaginary coordinate per strictly upper entry.
pub(crate) fn hermitian_basis(n: usize) -> Vec<Direction> {
    let one = c64::new(1.0, 0.0);
    let i_unit = c64::new(0.0, 1.0);
    let mut basis: Vec<Direction> = (0..n).map(|a| Direction { entries: vec![(a, a, one)] }).collect();
    for a in 0..n {
        for b in a + 1..n {
            basis.push(Direction { entries: vec![(a, b, one), (b, a, one)] });
            basis.push(Direction { entries: vec![(a, b, i_unit), (b, a, -i_unit)] });
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub(crate) fn hermitian_coords(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut x: Vec<f64> = (0..n).map(|a| m[(a, a)].re).collect();
    for a in 0..n {
        for b in a + 1..n {
            x.push(m[(a, b)].re);
            x.push(m[(a, b)].im);
        }
    }
    x
}

/// Inverse of [`hermitian_coords`].
pub(crate) fn hermitian_from_coords(n: usize, x: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for a in 0..n {
        m[(a, a)] = c64::new(x[a], 0.0);
    }
    let mut k = n;
    for a in 0..n {
        for b in a + 1..n {
            let v = c64::new(x[k], x[k + 1]);
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
            k += 2;
        }
    }
    m
}

/// `M(x) = base + Σ x_v E_v`.
#[derive(Clone, Debug)]
pub(crate) struct AffineHerm {
    pub base: CMatrix,
    pub dirs: Vec<(usize, Direction)>,
}

impl AffineHerm {
    pub fn constant(base: CMatrix) -> Self {
        Self { base, dirs: Vec::new() }
    }

    /// Adds `x_var · dir`; directions of a variable that already appears are merged.
    pub fn with(mut self, var: usize, dir: Direction) -> Self {
        match self.dirs.iter_mut().find(|(v, _)| *v == var) {
            Some((_, d)) => d.entries.extend(dir.entries),
            None => self.dirs.push((var, dir)),
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.base.nrows()
    }

    pub fn at(&self, x: &[f64]) -> CMatrix {
        let mut m = self.base.clone();
        for (v, d) in &self.dirs {
            let xv = x[*v];
            if xv != 0.0 {
                for &(i, j, e) in &d.entries {
                    m[(i, j)] += e * xv;
                }
            }
        }
        m
    }

    pub fn is_pd_at(&self, x: &[f64]) -> bool {
        chol(self.at(x)).is_some()
    }

    /// Linear part of `tr(K M(x))`: returns `(tr(K base), [(var, tr(K E_v))])`.
    pub fn trace_against(&self, k: &CMatrix) -> (f64, Vec<(usize, f64)>) {
        let n = self.dim();
        let mut c0 = 0.0;
        for i in 0..n {
            for j in 0..n {
                c0 += (k[(i, j)] * self.base[(j, i)]).re;
            }
        }
        (c0, self.dirs.iter().map(|(v, d)| (*v, d.trace_with(k))).collect())
    }
}

fn chol(m: CMatrix) -> Option<Cholesky<c64, nalgebra::Dyn>> {
    cholesky_pd(m)
}

fn ln_det_of(c: &Cholesky<c64, nalgebra::Dyn>) -> f64 {
    let l = c.l_dirty();
    2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>()
}

/// `Σ w_i ln det(M_i(x)) + lin·x + constant`.
#[derive(Clone, Debug)]
pub(crate) struct LogDetFn {
    pub terms: Vec<(f64, AffineHerm)>,
    pub linear: Vec<f64>,
    pub constant: f64,
}

pub(crate) struct Derivs {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl LogDetFn {
    pub fn new(n_vars: usize) -> Self {
        Self { terms: Vec::new(), linear: vec![0.0; n_vars], constant: 0.0 }
    }

    pub fn add_logdet(&mut self, weight: f64, m: AffineHerm) {
        if weight != 0.0 {
            self.terms.push((weight, m));
        }
    }

    /// Adds `weight · tr(K M(x))`.
    pub fn add_trace(&mut self, weight: f64, k: &CMatrix, m: &AffineHerm) {
        let (c0, coeffs) = m.trace_against(k);
        self.constant += weight * c0;
        for (v, c) in coeffs {
            self.linear[v] += weight * c;
        }
    }

    fn linear_value(&self, x: &[f64]) -> f64 {
        self.constant + self.linear.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `None` when some log-det argument is not positive definite.
    pub fn value(&self, x: &[f64]) -> Option<f64> {
        let mut v = self.linear_value(x);
        for (w, m) in &self.terms {
            v += w * ln_det_of(&chol(m.at(x))?);
        }
        Some(v)
    }

    pub fn derivs(&self, x: &[f64]) -> Option<Derivs> {
        let n = x.len();
        let mut grad = DVector::from_column_slice(&self.linear);
        let mut hess = DMatrix::zeros(n, n);
        let mut value = self.linear_value(x);
        for (w, m) in &self.terms {
            value += accumulate_logdet(*w, m, x, &mut grad, &mut hess)?;
        }
        Some(Derivs { value, grad, hess })
    }
}

/// Adds `w·∇ ln det M(x)` and `w·∇² ln det M(x)` into `grad`/`hess`; returns `w·ln det M(x)`.
fn accumulate_logdet(
    w: f64,
    m: &AffineHerm,
    x: &[f64],
    grad: &mut DVector<f64>,
    hess: &mut DMatrix<f64>,
) -> Option<f64> {
    let c = chol(m.at(x))?;
    let value = w * ln_det_of(&c);
    let inv = c.inverse();
    for (a, (va, da)) in m.dirs.iter().enumerate() {
        grad[*va] += w * da.trace_with(&inv);
        for (vb, db) in &m.dirs[a..] {
            // Re tr(inv Ea inv Eb) = Re Σ Ea[i,j] inv[j,k] Eb[k,l] inv[l,i]
            let mut acc = 0.0;
            for &(i, j, ea) in &da.entries {
                for &(k, l, eb) in &db.entries {
                    acc += (ea * inv[(j, k)] * eb * inv[(l, i)]).re;
                }
            }
            hess[(*va, *vb)] -= w * acc;
            if va != vb {
                hess[(*vb, *va)] -= w * acc;
            }
        }
    }
    Some(value)
}

/// A concave maximization program in barrier-ready form.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub objective: LogDetFn,
    /// Convex functions required to be `< 0`.
    pub constraints: Vec<LogDetFn>,
    /// Affine matrices required to be positive definite.
    pub domain: Vec<AffineHerm>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct BarrierSettings {
    pub t_init: f64,
    pub t_growth: f64,
    pub gap_tol: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for BarrierSettings {
    fn default() -> Self {
        Self { t_init: 1.0, t_growth: 20.0, gap_tol: 1e-9, newton_tol: 1e-10, max_newton: 500 }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BarrierOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Newton decrement of `F + barrier/t` at the final barrier weight.
    pub kkt_residual: f64,
    pub newton_steps: usize,
    pub converged: bool,
}

impl Program {
    /// Number of barrier terms, i.e. the duality-gap multiplier `m` in `m/t`.
    fn barrier_degree(&self) -> f64 {
        (self.constraints.len() + self.domain.iter().map(|d| d.dim()).sum::<usize>()) as f64
    }

    pub fn strictly_feasible(&self, x: &[f64]) -> bool {
        self.domain.iter().all(|d| d.is_pd_at(x))
            && self.constraints.iter().all(|g| g.value(x).is_some_and(|v| v < 0.0))
    }

    /// `−t F − Σ ln(−G_j) − Σ ln det D_k`, or `None` outside the domain.
    fn phi_value(&self, x: &[f64], t: f64) -> Option<f64> {
        let mut v = -t * self.objective.value(x)?;
        for g in &self.constraints {
            let gv = g.value(x)?;
            if !(gv < 0.0) {
                return None;
            }
            v -= (-gv).ln();
        }
        for d in &self.domain {
            v -= ln_det_of(&chol(d.at(x))?);
        }
        Some(v)
    }

    fn phi_derivs(&self, x: &[f64], t: f64) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let f = self.objective.derivs(x)?;
        let mut value = -t * f.value;
        let mut grad = -f.grad * t;
        let mut hess = -f.hess * t;
        for g in &self.constraints {
            let d = g.derivs(x)?;
            if !(d.value < 0.0) {
                return None;
            }
            let s = -d.value;
            value -= s.ln();
            grad += &d.grad / s;
            hess += &d.hess / s + (&d.grad * d.grad.transpose()) / (s * s);
        }
        for dm in &self.domain {
            value += accumulate_logdet(-1.0, dm, x, &mut grad, &mut hess)?;
        }
        Some((value, grad, hess))
    }

    /// Solves `H Δ = −g` on the Jacobi-scaled system, regularizing if the
    /// Hessian is numerically indefinite.
    fn newton_direction(grad: &DVector<f64>, hess: &DMatrix<f64>) -> Option<DVector<f64>> {
        let n = grad.len();
        let scale: Vec<f64> = (0..n)
            .map(|i| {
                let h = hess[(i, i)];
                if h > 0.0 && h.is_finite() {
                    1.0 / h.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let mut hs = hess.clone();
        for i in 0..n {
            for j in 0..n {
                hs[(i, j)] *= scale[i] * scale[j];
            }
        }
        let gs = DVector::from_fn(n, |i, _| -grad[i] * scale[i]);
        let mut reg = 0.0;
        for _ in 0..12 {
            let mut h = hs.clone();
            for i in 0..n {
                h[(i, i)] += reg;
            }
            if let Some(c) = Cholesky::new(h) {
                let d = c.solve(&gs);
                return Some(DVector::from_fn(n, |i, _| d[i] * scale[i]));
            }
            reg = if reg == 0.0 { 1e-12 } else { reg * 100.0 };
        }
        None
    }

    /// Path-following barrier method from a strictly feasible `x0`.
    pub fn solve(&self, x0: &[f64], settings: &BarrierSettings) -> Option<BarrierOutcome> {
        if !self.strictly_feasible(x0) {
            return None;
        }
        let m = self.barrier_degree().max(1.0);
        let t_final = m / settings.gap_tol;
        let mut t = settings.t_init.max(1e-6).min(t_final);
        let mut x = x0.to_vec();
        let mut steps = 0usize;
        let mut decrement;
        let mut converged = true;
        let mut stalled;
        loop {
            // Newton on −tF + barrier for this t.
            decrement = f64::INFINITY;
            stalled = 0;
            loop {
                if steps >= settings.max_newton {
                    converged = false;
                    break;
                }
                let Some((phi0, grad, hess)) = self.phi_derivs(&x, t) else {
                    converged = false;
                    break;
                };
                let Some(dir) = Self::newton_direction(&grad, &hess) else {
                    converged = false;
                    break;
                };
                let slope = grad.dot(&dir);
                decrement = (-slope).max(0.0).sqrt();
                // Below roughly 1e-13 |phi| the predicted decrease is roundoff.
                if decrement * decrement / 2.0 <= settings.newton_tol.max(1e-13 * phi0.abs()) {
                    break;
                }
                steps += 1;
                let mut s = 1.0;
                let mut accepted = None;
                for _ in 0..60 {
                    let trial: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, d)| a + s * d).collect();
                    if let Some(v) = self.phi_value(&trial, t) {
                        if v <= phi0 + 0.01 * s * slope {
                            x = trial;
                            accepted = Some(v);
                            break;
                        }
                    }
                    s *= 0.5;
                }
                let Some(phi1) = accepted else {
                    // Roundoff floor: no representable decrease left along the Newton direction.
                    break;
                };
                // Steps whose decrease is at roundoff level make no progress.
                if phi0 - phi1 <= 1e-14 * phi0.abs() {
                    stalled += 1;
                    if stalled >= STALL_STEPS {
                        break;
                    }
                } else {
                    stalled = 0;
                }
            }
            if !converged || t >= t_final {
                break;
            }
            t = (t * settings.t_growth).min(t_final);
        }
        let objective = self.objective.value(&x)?;
        Some(BarrierOutcome {
            x,
            objective,
            kkt_residual: decrement / t.sqrt(),
            newton_steps: steps,
            converged,
        })
    }
}
