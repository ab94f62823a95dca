//! Complex Hermitian matrices and the log-det helpers every rate formula is built on.

use std::f64::consts::LN_2;
use std::ops::{Add, Sub};

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub use nalgebra::Complex;

#[allow(non_camel_case_types)]
pub type c64 = Complex<f64>;
pub type CMatrix = DMatrix<c64>;

/// Relative tolerance used by [`HermitianMatrix::is_psd`].
pub const PSD_REL_TOL: f64 = 1e-9;

/// Cholesky factor of a Hermitian positive-definite matrix, or `None`.
///
/// The complex factorization takes square roots of complex pivots and never
/// fails by itself; a pivot with nonpositive real part shows up as a factor
/// diagonal whose imaginary part dominates.
pub(crate) fn cholesky_pd(m: CMatrix) -> Option<Cholesky<c64, nalgebra::Dyn>> {
    let c = Cholesky::new(m)?;
    let l = c.l_dirty();
    let ok = (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re.is_finite() && d.im.is_finite() && d.re > d.im.abs()
    });
    ok.then_some(c)
}

/// A complex Hermitian matrix.
///
/// Every constructor enforces `a[i][j] == conj(a[j][i])` bit-for-bit, so
/// downstream Cholesky factorizations never see a numerically asymmetric input.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    /// Projects a square matrix onto the Hermitian subspace, `(A + A^H) / 2`.
    pub fn hermitize(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                if i == j {
                    out[(i, i)] = c64::new(m[(i, i)].re, 0.0);
                } else {
                    let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                    out[(i, j)] = v;
                    out[(j, i)] = v.conj();
                }
            }
        }
        Ok(Self { inner: out })
    }

    /// Like [`hermitize`](Self::hermitize) but rejects inputs that are not
    /// already Hermitian up to `1e-10` relative to their largest entry.
    pub fn try_new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let asym = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > 1e-10 * scale {
            return Err(Error::Parameter(format!(
                "matrix is not Hermitian (asymmetry {asym:e})"
            )));
        }
        Self::hermitize(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self { inner: CMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self { inner: CMatrix::from_diagonal_element(n, n, c64::new(c, 0.0)) }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = c64::new(v, 0.0);
        }
        Self { inner: m }
    }

    /// `B B^H` for an arbitrary complex matrix `B`.
    pub fn gram(b: &CMatrix) -> Self {
        Self::hermitize(b * b.adjoint()).expect("B B^H is square")
    }

    /// Block-diagonal matrix `diag(blocks...)`.
    pub fn block_diag(blocks: &[&HermitianMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut m = CMatrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            let d = b.dim();
            m.view_mut((off, off), (d, d)).copy_from(&b.inner);
            off += d;
        }
        Self { inner: m }
    }

    /// `A_m X A_m^H` with `A_m = 1_m ⊗ I`: an `m x m` grid of copies of `self`.
    pub fn replicate(&self, m: usize) -> Self {
        let d = self.dim();
        let mut out = CMatrix::zeros(m * d, m * d);
        for bi in 0..m {
            for bj in 0..m {
                out.view_mut((bi * d, bj * d), (d, d)).copy_from(&self.inner);
            }
        }
        Self { inner: out }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.inner[(i, j)]
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { inner: &self.inner * c64::new(c, 0.0) }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let eig = SymmetricEigen::new(self.inner.clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenvalues and the unitary matrix whose columns are the matching eigenvectors.
    pub(crate) fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let eig = SymmetricEigen::new(self.inner.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }

    /// Spectral function `U f(Λ) U^H`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Self {
        if self.dim() == 0 {
            return self.clone();
        }
        let eig = SymmetricEigen::new(self.inner.clone());
        let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c64::new(f(l), 0.0)));
        Self::hermitize(&eig.eigenvectors * d * eig.eigenvectors.adjoint()).expect("square")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Smallest eigenvalue is at least `-1e-9 * spectral norm`.
    pub fn is_psd(&self) -> bool {
        let ev = self.eigenvalues();
        let norm = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        ev.first().is_none_or(|&min| min >= -PSD_REL_TOL * norm)
    }

    /// `self ⪯ other` in the Loewner order, up to the PSD tolerance.
    pub fn loewner_le(&self, other: &Self) -> bool {
        (other - self).is_psd()
    }

    /// `U X U^H`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::hermitize(u * &self.inner * u.adjoint()).expect("square")
    }

    fn cholesky(&self) -> Result<Cholesky<c64, nalgebra::Dyn>> {
        cholesky_pd(self.inner.clone()).ok_or_else(|| {
            Error::NumericalDomain(format!(
                "{}x{} matrix is not positive definite",
                self.dim(),
                self.dim()
            ))
        })
    }

    /// Natural-log determinant of a positive-definite matrix.
    pub fn ln_det(&self) -> Result<f64> {
        if self.dim() == 0 {
            return Ok(0.0);
        }
        let chol = self.cholesky()?;
        let l = chol.l_dirty();
        let mut acc = 0.0;
        for i in 0..self.dim() {
            let d = l[(i, i)].re;
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NumericalDomain("singular Cholesky factor".into()));
            }
            acc += d.ln();
        }
        Ok(2.0 * acc)
    }

    /// Base-2 log determinant, the unit of every rate in this crate.
    pub fn log2_det(&self) -> Result<f64> {
        Ok(self.ln_det()? / LN_2)
    }

    pub fn inverse(&self) -> Result<Self> {
        let chol = self.cholesky()?;
        Self::hermitize(chol.inverse())
    }

    /// `Re tr(self * other)`; exact for Hermitian arguments, whose product has a real trace.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.inner[(i, j)] * other.inner[(j, i)]).re;
            }
        }
        acc
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { inner: &self.inner + &rhs.inner }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { inner: &self.inner - &rhs.inner }
    }
}

/// The replication operator `A_m = 1_m ⊗ I_n` as a plain `(m n) x n` matrix.
pub fn replication_operator(m: usize, n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(m * n, n);
    for b in 0..m {
        for i in 0..n {
            a[(b * n + i, i)] = c64::new(1.0, 0.0);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitize_is_exactly_conjugate_symmetric() {
        let m = CMatrix::from_fn(3, 3, |i, j| c64::new(i as f64 * 0.3 + j as f64, (i * j) as f64 - 0.7));
        let h = HermitianMatrix::hermitize(m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.get(i, j), h.get(j, i).conj());
            }
        }
    }

    #[test]
    fn try_new_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c64::new(1.0, 0.0), c64::new(1.0, 0.0), c64::new(0.0, 0.0), c64::new(1.0, 0.0)]);
        assert!(HermitianMatrix::try_new(m).is_err());
    }

    #[test]
    fn log2_det_of_diagonal() {
        let h = HermitianMatrix::from_real_diagonal(&[2.0, 4.0, 0.5]);
        assert!((h.log2_det().unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log2_det_singular_is_domain_error() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(h.log2_det(), Err(Error::NumericalDomain(_))));
    }

    #[test]
    fn indefinite_matrices_have_no_log_det() {
        for d in [[-3.0, 1.0], [2.0, -1e-12], [-3e207, 5.0]] {
            let h = HermitianMatrix::from_real_diagonal(&d);
            assert!(h.log2_det().is_err(), "{d:?}");
        }
        let h = HermitianMatrix::hermitize(CMatrix::from_fn(2, 2, |i, j| c64::new(if i == j { 1.0 } else { 0.5 }, if i < j { 1.0 } else if i > j { -1.0 } else { 0.0 }))).unwrap();
        assert!(h.log2_det().is_err());
    }

    #[test]
    fn replicate_matches_explicit_operator() {
        let x = HermitianMatrix::hermitize(CMatrix::from_fn(2, 2, |i, j| c64::new(1.0 + i as f64, j as f64))).unwrap();
        let a = replication_operator(3, 2);
        let explicit = HermitianMatrix::hermitize(&a * x.as_matrix() * a.adjoint()).unwrap();
        assert_eq!(explicit, x.replicate(3));
    }

    #[test]
    fn psd_checks() {
        assert!(HermitianMatrix::from_real_diagonal(&[1.0, 0.0]).is_psd());
        assert!(!HermitianMatrix::from_real_diagonal(&[1.0, -1e-3]).is_psd());
        let small = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]);
        let big = HermitianMatrix::from_real_diagonal(&[1.5, 2.0]);
        assert!(small.loewner_le(&big));
        assert!(!big.loewner_le(&small));
    }
}
