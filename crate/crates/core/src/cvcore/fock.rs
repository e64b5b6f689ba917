//! Truncated Fock-space density matrices and the exact operations the oracles need.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{ln_binomial, log_factorial};

const STATE_TOL: f64 = 1e-9;

/// Hermitian, positive semidefinite, trace ≤ 1 (truncation may lose mass).
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    data: DMatrix<Complex64>,
}

/// `ceil(4(|α|² + 1)) + 10`.
pub fn default_coherent_dim(alpha: Complex64) -> usize {
    (4.0 * (alpha.norm_sqr() + 1.0)).ceil() as usize + 10
}

/// `e^{-|α|²/2} α^m / √m!` for `m < dim`, computed in log magnitude.
pub fn coherent_vector(alpha: Complex64, dim: usize) -> DVector<Complex64> {
    let r2 = alpha.norm_sqr();
    let (r, phi) = alpha.to_polar();
    DVector::from_fn(dim, |m, _| {
        if m == 0 {
            return Complex64::new((-0.5 * r2).exp(), 0.0);
        }
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let ln_mag = -0.5 * r2 + m as f64 * r.ln() - 0.5 * log_factorial(m as u64);
        Complex64::from_polar(ln_mag.exp(), m as f64 * phi)
    })
}

fn hermitian_part(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix (Householder tridiagonalization + implicit QR).
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> DVector<f64> {
    hermitian_part(a).symmetric_eigenvalues()
}

/// Trace norm of a Hermitian operator.
pub fn trace_norm(a: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(a).iter().map(|x| x.abs()).sum()
}

impl FockMatrix {
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if !data.is_square() || data.nrows() == 0 {
            return Err(Error::InvalidState(format!("density matrix must be square and non-empty, got {}x{}", data.nrows(), data.ncols())));
        }
        let herm_err = (&data - data.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm_err:e})")));
        }
        let tr = data.trace();
        if tr.re > 1.0 + STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} exceeds 1")));
        }
        let min_eig = hermitian_eigenvalues(&data).min();
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!("not positive semidefinite (min eigenvalue {min_eig:e})")));
        }
        Ok(FockMatrix { data: hermitian_part(&data) })
    }

    pub(crate) fn from_trusted(data: DMatrix<Complex64>) -> Self {
        FockMatrix { data }
    }

    pub fn from_pure(psi: &DVector<Complex64>) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    pub fn fock(m: usize, dim: usize) -> Result<Self> {
        if m >= dim {
            return Err(Error::DimensionMismatch(format!("Fock index {m} outside dimension {dim}")));
        }
        let mut d = DMatrix::zeros(dim, dim);
        d[(m, m)] = Complex64::new(1.0, 0.0);
        Ok(FockMatrix { data: d })
    }

    pub fn coherent(alpha: Complex64, dim: usize) -> Self {
        let v = coherent_vector(alpha, dim);
        FockMatrix { data: &v * v.adjoint() }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)))))
    }

    pub fn thermal(nbar: f64, dim: usize) -> Result<Self> {
        let ratio = nbar / (1.0 + nbar);
        Self::diagonal(&(0..dim).map(|k| ratio.powi(k as i32) / (1.0 + nbar)).collect::<Vec<_>>())
    }

    /// Photon-added thermal state `a† ρ_th a / (1 + q)`.
    pub fn spat(q: f64, dim: usize) -> Result<Self> {
        let probs: Vec<f64> = (0..dim)
            .map(|k| if k == 0 { 0.0 } else { k as f64 * q.powi(k as i32 - 1) / (1.0 + q).powi(k as i32 + 1) })
            .collect();
        Self::diagonal(&probs)
    }

    /// Squeezed vacuum with `λ = tanh r`, supported on even Fock numbers.
    pub fn squeezed_vacuum(lambda: f64, dim: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::InvalidState(format!("squeezing parameter must lie in [0,1), got {lambda}")));
        }
        let norm = (1.0 - lambda * lambda).sqrt().sqrt();
        let psi = DVector::from_fn(dim, |k, _| {
            if k % 2 == 1 {
                return Complex64::new(0.0, 0.0);
            }
            let p = (k / 2) as u64;
            if lambda == 0.0 {
                return Complex64::new(if p == 0 { norm } else { 0.0 }, 0.0);
            }
            // λ^p √((2p)!) / (2^p p!)
            let ln = p as f64 * lambda.ln() + 0.5 * log_factorial(2 * p) - p as f64 * 2f64.ln() - log_factorial(p);
            Complex64::new(norm * ln.exp(), 0.0)
        });
        Ok(FockMatrix { data: &psi * psi.adjoint() })
    }

    /// Convex combination of states of equal dimension.
    pub fn mixture(parts: &[(f64, FockMatrix)]) -> Result<Self> {
        let dim = parts.first().map(|p| p.1.dim()).ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut acc = DMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch("mixture components differ in dimension".into()));
            }
            acc += &rho.data * Complex64::new(*w, 0.0);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|k| k as f64 * self.data[(k, k)].re).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.data[(i, j)].norm() == 0.0))
    }

    /// Zero-pads (or truncates) to `dim`.
    pub fn resized(&self, dim: usize) -> FockMatrix {
        let mut d = DMatrix::zeros(dim, dim);
        let k = dim.min(self.dim());
        d.view_mut((0, 0), (k, k)).copy_from(&self.data.view((0, 0), (k, k)));
        FockMatrix { data: d }
    }
}

pub fn trace_distance(a: &FockMatrix, b: &FockMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    Ok(trace_norm(&(&a.data - &b.data)))
}

/// Trace distance after zero-padding the smaller matrix.
pub fn trace_distance_padded(a: &FockMatrix, b: &FockMatrix) -> f64 {
    let d = a.dim().max(b.dim());
    trace_norm(&(&a.resized(d).data - &b.resized(d).data))
}

/// Zeroes rows and columns `≥ m`; returns the truncated operator and its trace `η_M`.
pub fn truncate_energy(rho: &FockMatrix, m: usize) -> (FockMatrix, f64) {
    let d = rho.dim();
    let data = DMatrix::from_fn(d, d, |i, j| if i < m && j < m { rho.data[(i, j)] } else { Complex64::new(0.0, 0.0) });
    let eta = data.trace().re;
    (FockMatrix { data }, eta)
}

/// `e^{iθ a†a} ρ e^{-iθ a†a}`.
pub fn apply_phase_rotation(rho: &FockMatrix, theta: f64) -> FockMatrix {
    let d = rho.dim();
    let data = DMatrix::from_fn(d, d, |i, j| rho.data[(i, j)] * Complex64::from_polar(1.0, theta * (i as f64 - j as f64)));
    FockMatrix { data }
}

/// Pure-loss channel of transmissivity `eta`, via its Kraus operators.
pub fn apply_loss(rho: &FockMatrix, eta: f64) -> Result<FockMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidChannel(format!("loss transmissivity must lie in [0,1], got {eta}")));
    }
    let d = rho.dim();
    let mut out = DMatrix::zeros(d, d);
    for k in 0..d {
        // A_k |n⟩ = √C(n,k) η^{(n-k)/2} (1-η)^{k/2} |n-k⟩
        let a = DMatrix::from_fn(d, d, |row, n| {
            if n < k || row != n - k {
                return Complex64::new(0.0, 0.0);
            }
            if eta == 1.0 {
                return Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0);
            }
            let ln_amp = 0.5 * ln_binomial(n as u64, k as u64)
                + if n > k { 0.5 * (n - k) as f64 * eta.ln() } else { 0.0 }
                + 0.5 * k as f64 * (1.0 - eta).ln();
            Complex64::new(ln_amp.exp(), 0.0)
        });
        out += &a * &rho.data * a.adjoint();
    }
    Ok(FockMatrix { data: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_is_normalized_and_has_mean_r2() {
        let a = Complex64::new(1.1, -0.7);
        let rho = FockMatrix::coherent(a, default_coherent_dim(a) + 20);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!((rho.mean_photon_number() - a.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn trace_distance_of_orthogonal_and_identical_states() {
        let a = FockMatrix::fock(0, 4).unwrap();
        let b = FockMatrix::fock(3, 4).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 2.0).abs() < 1e-14);
        assert!(trace_distance(&a, &a).unwrap() < 1e-14);
        assert!(trace_distance(&a, &FockMatrix::fock(0, 5).unwrap()).is_err());
        assert!((trace_distance_padded(&a, &FockMatrix::fock(4, 5).unwrap()) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pure_state_distance_matches_overlap() {
        let (a, b) = (Complex64::new(0.4, 0.2), Complex64::new(-0.1, 0.5));
        let d = 40;
        let ra = FockMatrix::coherent(a, d);
        let rb = FockMatrix::coherent(b, d);
        let want = 2.0 * (1.0 - (-(a - b).norm_sqr()).exp()).sqrt();
        assert!((trace_distance(&ra, &rb).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn squeezed_vacuum_truncation() {
        let lambda: f64 = 0.6;
        let rho = FockMatrix::squeezed_vacuum(lambda, 80).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        assert!((rho.mean_photon_number() - lambda * lambda / (1.0 - lambda * lambda)).abs() < 1e-9);
        let (_, eta) = truncate_energy(&rho, 5);
        let want = (1.0 - lambda * lambda).sqrt() * (1.0 + lambda.powi(2) / 2.0 + lambda.powi(4) * 6.0 / 16.0);
        assert!((eta - want).abs() < 1e-12);
    }

    #[test]
    fn spat_moments() {
        let q = 0.7;
        let rho = FockMatrix::spat(q, 120).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!((rho.mean_photon_number() - (1.0 + 2.0 * q)).abs() < 1e-10);
    }

    #[test]
    fn loss_maps_coherent_to_coherent() {
        let a = Complex64::new(0.8, 0.3);
        let eta: f64 = 0.64;
        let out = apply_loss(&FockMatrix::coherent(a, 40), eta).unwrap();
        let want = FockMatrix::coherent(a * eta.sqrt(), 40);
        assert!(trace_distance(&out, &want).unwrap() < 1e-10);
    }

    #[test]
    fn phase_rotation_of_coherent() {
        let a = Complex64::new(0.8, 0.0);
        let out = apply_phase_rotation(&FockMatrix::coherent(a, 30), 0.4);
        let want = FockMatrix::coherent(a * Complex64::from_polar(1.0, 0.4), 30);
        assert!(trace_distance(&out, &want).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_non_states() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        assert!(FockMatrix::new(m).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(FockMatrix::new(m).is_err());
    }
}
