//! Compression-rate functions of the two-description Gaussian quantizer and
//! the convex/concave surrogates used by the concave-convex procedure.
//!
//! Side descriptions are `ŷ_l = y + q_l` with `q_l ~ CN(0, Ω)`, `l ∈ {1, 2}`;
//! the central description is `ŷ_0 = y + q_0` with `q_0 ~ CN(0, Ω₀)`. All
//! quantization noises are independent of `y` and of each other.

use std::f64::consts::LN_2;

use crate::channel::{received_covariance, PowerSplit, UplinkChannel};
use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;

/// Quantization-noise covariances of the side (`Ω`) and central (`Ω₀`) descriptions.
#[derive(Clone, Debug, PartialEq)]
pub struct MdcQuantizer {
    pub omega: HermitianMatrix,
    pub omega0: HermitianMatrix,
}

impl MdcQuantizer {
    pub fn new(omega: HermitianMatrix, omega0: HermitianMatrix) -> Result<Self> {
        if omega.dim() != omega0.dim() {
            return Err(Error::Dimension(format!(
                "Omega is {}x{}, Omega0 is {}x{}",
                omega.dim(),
                omega.dim(),
                omega0.dim(),
                omega0.dim()
            )));
        }
        if !omega.is_psd() || !omega0.is_psd() {
            return Err(Error::Parameter("quantization covariances must be PSD".into()));
        }
        Ok(Self { omega, omega0 })
    }

    /// `Ω = Ω₀ = c·I`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let m = HermitianMatrix::scaled_identity(n, c);
        Self { omega: m.clone(), omega0: m }
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// `Ω̄ = diag(Ω₀, Ω, Ω)`.
    pub fn omega_bar(&self) -> HermitianMatrix {
        HermitianMatrix::block_diag(&[&self.omega0, &self.omega, &self.omega])
    }
}

/// The point `(P^(t), Ω^(t), Ω₀^(t))` at which the surrogates are built.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationPoint {
    pub split: PowerSplit,
    pub quantizer: MdcQuantizer,
}

/// Layer weights of the expected sum-rate: `p̄(1) = p_M(1) + p_M(2)`, `p̄(2) = p_M(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerWeights {
    pub layer1: f64,
    pub layer2: f64,
}

impl LayerWeights {
    pub const ZERO: Self = Self { layer1: 0.0, layer2: 0.0 };
    pub const PERFECT: Self = Self { layer1: 1.0, layer2: 1.0 };
}

/// `φ(A, B) = log2det(B) + tr(B⁻¹(A − B)) / ln 2`: the first-order expansion of
/// `log2det` at `B` evaluated at `A`. Upper-bounds `log2det(A)` by concavity.
pub fn phi(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("phi arguments are {} and {}", a.dim(), b.dim())));
    }
    let b_inv = b.inverse()?;
    Ok(b.log2_det()? + b_inv.trace_product(&(a - b)) / LN_2)
}

fn check(sigma_y: &HermitianMatrix, q: &MdcQuantizer) -> Result<()> {
    if sigma_y.dim() != q.dim() {
        return Err(Error::Dimension(format!(
            "Sigma_y is {}x{}, quantizer is {}x{}",
            sigma_y.dim(),
            sigma_y.dim(),
            q.dim(),
            q.dim()
        )));
    }
    Ok(())
}

fn infinite_rate(e: Error) -> Error {
    match e {
        Error::NumericalDomain(m) => {
            Error::NumericalDomain(format!("compression rate is unbounded (+inf): {m}"))
        }
        other => other,
    }
}

/// Rate needed for one side description, `I(y; ŷ_l) = log2det(Σ_y + Ω) − log2det(Ω)`.
///
/// A singular `Ω` makes the rate infinite and is reported as a domain error.
pub fn g_individual(sigma_y: &HermitianMatrix, q: &MdcQuantizer) -> Result<f64> {
    check(sigma_y, q)?;
    let num = (sigma_y + &q.omega).log2_det().map_err(infinite_rate)?;
    let den = q.omega.log2_det().map_err(infinite_rate)?;
    Ok((num - den).max(0.0))
}

/// The three block covariances whose log-dets make up the sum-rate constraint:
/// `(A₃Σ_yA₃^H + Ω̄, A₄Σ_yA₄^H + diag(0, Ω̄), A₂Σ_yA₂^H + I₂⊗Ω)`.
pub(crate) fn gsum_blocks(
    sigma_y: &HermitianMatrix,
    q: &MdcQuantizer,
) -> (HermitianMatrix, HermitianMatrix, HermitianMatrix) {
    let n = q.dim();
    let omega_bar = q.omega_bar();
    let joint3 = &sigma_y.replicate(3) + &omega_bar;
    let padded = HermitianMatrix::block_diag(&[&HermitianMatrix::zeros(n), &omega_bar]);
    let joint4 = &sigma_y.replicate(4) + &padded;
    let pair = &sigma_y.replicate(2) + &HermitianMatrix::block_diag(&[&q.omega, &q.omega]);
    (joint3, joint4, pair)
}

/// Sum-rate needed by the two side descriptions together,
/// `I(y; ŷ₀, ŷ₁, ŷ₂) + I(ŷ₁; ŷ₂)`, evaluated from explicit block covariances.
pub fn g_sum(sigma_y: &HermitianMatrix, q: &MdcQuantizer) -> Result<f64> {
    check(sigma_y, q)?;
    let (joint3, joint4, pair) = gsum_blocks(sigma_y, q);
    let value = sigma_y.log2_det()? + joint3.log2_det()? - joint4.log2_det().map_err(infinite_rate)?
        + 2.0 * (sigma_y + &q.omega).log2_det()?
        - pair.log2_det().map_err(infinite_rate)?;
    Ok(value)
}

/// Convex majorizer of [`g_individual`]: the concave `log2det(Σ_y + Ω)` is
/// replaced by its tangent at `Ω^(t)`.
pub fn surrogate_g1(q: &MdcQuantizer, at: &LinearizationPoint, sigma_y: &HermitianMatrix) -> Result<f64> {
    check(sigma_y, q)?;
    check(sigma_y, &at.quantizer)?;
    let lin = phi(&(sigma_y + &q.omega), &(sigma_y + &at.quantizer.omega))?;
    Ok(lin - q.omega.log2_det().map_err(infinite_rate)?)
}

/// Convex majorizer of [`g_sum`]: both concave log-det terms are linearized at
/// `(Ω^(t), Ω₀^(t))`, the two convex `−log2det` terms are kept exact.
pub fn surrogate_gsum(q: &MdcQuantizer, at: &LinearizationPoint, sigma_y: &HermitianMatrix) -> Result<f64> {
    check(sigma_y, q)?;
    check(sigma_y, &at.quantizer)?;
    let (joint3, joint4, pair) = gsum_blocks(sigma_y, q);
    let (joint3_t, _, _) = gsum_blocks(sigma_y, &at.quantizer);
    Ok(sigma_y.log2_det()? + phi(&joint3, &joint3_t)? - joint4.log2_det().map_err(infinite_rate)?
        + 2.0 * phi(&(sigma_y + &q.omega), &(sigma_y + &at.quantizer.omega))?
        - pair.log2_det().map_err(infinite_rate)?)
}

/// Exact expected sum-rate `p̄(1)·f₁ + p̄(2)·f₂` for a given split and quantizer.
pub fn weighted_objective(
    split: &PowerSplit,
    q: &MdcQuantizer,
    weights: LayerWeights,
    ch: &UplinkChannel,
) -> Result<f64> {
    let f1 = crate::channel::layer1_sum_rate(ch, split, &q.omega)?;
    let f2 = crate::channel::layer2_sum_rate(ch, split, &q.omega0)?;
    Ok(weights.layer1 * f1 + weights.layer2 * f2)
}

/// Concave minorizer of [`weighted_objective`]: the subtracted log-dets of both
/// layer rates are replaced by their tangents at the linearization point.
pub fn surrogate_objective(
    split: &PowerSplit,
    q: &MdcQuantizer,
    at: &LinearizationPoint,
    weights: LayerWeights,
    ch: &UplinkChannel,
) -> Result<f64> {
    let sigma_y = received_covariance(ch);
    check(&sigma_y, q)?;
    check(&sigma_y, &at.quantizer)?;
    let sz = ch.noise_cov();
    let interf = &ch.weighted_gram(split.layer2()) + sz;
    let interf_t = &ch.weighted_gram(at.split.layer2()) + sz;

    let mut total = 0.0;
    if weights.layer1 != 0.0 {
        let f1 = (&sigma_y + &q.omega).log2_det()?
            - phi(&(&interf + &q.omega), &(&interf_t + &at.quantizer.omega))?;
        total += weights.layer1 * f1;
    }
    if weights.layer2 != 0.0 {
        let f2 = (&interf + &q.omega0).log2_det()?
            - phi(&(sz + &q.omega0), &(sz + &at.quantizer.omega0))?;
        total += weights.layer2 * f2;
    }
    Ok(total)
}
