//! Single-mode Gaussian channels acting on first and second moments (ħ = 2, vacuum V = I).

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const VALIDATION_TOL: f64 = 1e-12;

/// `q ↦ M q + d`, `V ↦ M V Mᵀ + N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianChannel {
    pub d: Vector2<f64>,
    pub m: Matrix2<f64>,
    pub n: Matrix2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub q: Vector2<f64>,
    pub v: Matrix2<f64>,
}

impl GaussianMoments {
    /// Coherent state `|α⟩`: mean `(2 Re α, 2 Im α)`, covariance `I`.
    pub fn coherent(alpha: Complex64) -> Self {
        GaussianMoments { q: Vector2::new(2.0 * alpha.re, 2.0 * alpha.im), v: Matrix2::identity() }
    }
}

impl GaussianChannel {
    /// Validates N = Nᵀ, N ⪰ 0 and det N ≥ (det M − 1)².
    pub fn new(d: Vector2<f64>, m: Matrix2<f64>, n: Matrix2<f64>) -> Result<Self> {
        if !d.iter().chain(m.iter()).chain(n.iter()).all(|x| x.is_finite()) {
            return Err(Error::InvalidChannel("non-finite entry".into()));
        }
        let scale = 1.0 + n.abs().max();
        if (n - n.transpose()).abs().max() > VALIDATION_TOL * scale {
            return Err(Error::InvalidChannel("noise matrix N is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(n).eigenvalues;
        if eig.min() < -VALIDATION_TOL * scale {
            return Err(Error::InvalidChannel(format!("noise matrix N is not positive semidefinite (min eigenvalue {:e})", eig.min())));
        }
        let lhs = n.determinant();
        let rhs = (m.determinant() - 1.0).powi(2);
        if lhs < rhs - VALIDATION_TOL * (1.0 + rhs) {
            return Err(Error::InvalidChannel(format!("complete positivity violated: det N = {lhs} < (det M - 1)^2 = {rhs}")));
        }
        Ok(GaussianChannel { d, m, n })
    }

    pub fn identity() -> Self {
        GaussianChannel { d: Vector2::zeros(), m: Matrix2::identity(), n: Matrix2::zeros() }
    }

    pub fn displacement(beta: Complex64) -> Self {
        GaussianChannel { d: Vector2::new(2.0 * beta.re, 2.0 * beta.im), ..Self::identity() }
    }

    pub fn phase_rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        GaussianChannel { m: Matrix2::new(c, -s, s, c), ..Self::identity() }
    }

    /// Single-mode squeezer `diag(e^r, e^{-r})`.
    pub fn squeezing(r: f64) -> Self {
        GaussianChannel { m: Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp()), ..Self::identity() }
    }

    /// Pure-loss channel of transmissivity `eta`.
    pub fn loss(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidChannel(format!("loss transmissivity must lie in [0,1], got {eta}")));
        }
        Ok(GaussianChannel {
            d: Vector2::zeros(),
            m: Matrix2::identity() * eta.sqrt(),
            n: Matrix2::identity() * (1.0 - eta),
        })
    }

    pub fn apply(&self, x: &GaussianMoments) -> GaussianMoments {
        apply_gaussian(self, x)
    }
}

pub fn apply_gaussian(ch: &GaussianChannel, x: &GaussianMoments) -> GaussianMoments {
    GaussianMoments { q: ch.m * x.q + ch.d, v: ch.m * x.v * ch.m.transpose() + ch.n }
}

/// `ln F²` between two Gaussian states, with `F²` the squared Uhlmann fidelity.
pub fn gaussian_ln_fidelity_sq(a: &GaussianMoments, b: &GaussianMoments) -> Result<f64> {
    let sum = a.v + b.v;
    let big_delta = sum.determinant();
    let inv = sum
        .try_inverse()
        .filter(|_| big_delta.abs() > 1e-300)
        .ok_or_else(|| Error::Singular(format!("det(V1 + V2) = {big_delta:e}")))?;
    let mu = b.q - a.q;
    let quad = (mu.transpose() * inv * mu)[(0, 0)];
    // δ ≥ 0 for physical states; clamp rounding below zero.
    let small_delta = ((a.v.determinant() - 1.0) * (b.v.determinant() - 1.0)).max(0.0);
    let root = (big_delta + small_delta).sqrt() + small_delta.sqrt();
    // 2 / (√(Δ+δ) − √δ) = 2 (√(Δ+δ) + √δ) / Δ
    Ok(-0.5 * quad + (2.0 * root / big_delta).ln())
}

/// Squared fidelity of the two channel outputs on the coherent input `|α⟩`.
pub fn output_fidelity_sq(c1: &GaussianChannel, c2: &GaussianChannel, alpha: Complex64) -> Result<f64> {
    Ok(output_ln_fidelity_sq(c1, c2, alpha)?.exp().min(1.0))
}

pub fn output_ln_fidelity_sq(c1: &GaussianChannel, c2: &GaussianChannel, alpha: Complex64) -> Result<f64> {
    let x = GaussianMoments::coherent(alpha);
    gaussian_ln_fidelity_sq(&apply_gaussian(c1, &x), &apply_gaussian(c2, &x))
}

/// Trace distance (range `[0, 2]`) between pure outputs, `2√(1 − F²)`.
pub fn pure_output_distance(c1: &GaussianChannel, c2: &GaussianChannel, alpha: Complex64) -> Result<f64> {
    let ln_f2 = output_ln_fidelity_sq(c1, c2, alpha)?;
    Ok(2.0 * (-ln_f2.min(0.0).exp_m1()).max(0.0).sqrt())
}
