//! Phase-space representations of Fock-basis elements and the additive Gaussian noise
//! channel `C_s`, which maps a state's P-function to its convolution with a Gaussian of
//! variance `s`.
//!
//! A label `(m, n, θ)` with `m > n` denotes `½(e^{iθ}|m⟩⟨n| + e^{-iθ}|n⟩⟨m|)`; with
//! `m = n` it denotes `|m⟩⟨m|` and `θ` is ignored.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use super::fock::FockMatrix;
use crate::error::{domain, Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{laguerre, ln_binomial, log_factorial};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockLabel {
    pub m: u32,
    pub n: u32,
    pub theta: f64,
}

impl FockLabel {
    /// Normalizes to `m ≥ n`; swapping the indices conjugates the phase.
    pub fn new(m: u32, n: u32, theta: f64) -> Self {
        if m >= n {
            FockLabel { m, n, theta }
        } else {
            FockLabel { m: n, n: m, theta: -theta }
        }
    }

    pub fn diagonal(m: u32) -> Self {
        FockLabel { m, n: m, theta: 0.0 }
    }

    pub fn delta(&self) -> u32 {
        self.m - self.n
    }

    pub fn is_diagonal(&self) -> bool {
        self.m == self.n
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("noise parameter s must lie in (0,1), got {s}")))
    }
}

/// Radial amplitude `A(r)` of the P-function of `C_s(|m⟩⟨n|)`, `m ≥ n`, which equals
/// `A(r) e^{-i(m-n)φ}`.
pub fn p_rep_radial(m: u32, n: u32, s: f64, r: f64) -> f64 {
    debug_assert!(m >= n);
    let delta = m - n;
    let x = r * r / (s * (1.0 - s));
    let lag = laguerre(n, delta as f64, x);
    if lag == 0.0 {
        return 0.0;
    }
    let mut ln = -PI.ln() + 0.5 * (log_factorial(n as u64) - log_factorial(m as u64)) + n as f64 * (1.0 - s).ln()
        - (m as f64 + 1.0) * s.ln()
        - r * r / s;
    if delta > 0 {
        if r == 0.0 {
            return 0.0;
        }
        ln += delta as f64 * r.ln();
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * lag * ln.exp()
}

/// P-function of `C_s` applied to the labelled element, at phase-space point `α`.
pub fn p_rep_fock_element(label: FockLabel, s: f64, alpha: Complex64) -> Result<f64> {
    check_s(s)?;
    let (r, phi) = alpha.to_polar();
    let a = p_rep_radial(label.m, label.n, s, r);
    if label.is_diagonal() {
        Ok(a)
    } else {
        Ok((label.theta - label.delta() as f64 * phi).cos() * a)
    }
}

/// Husimi function `⟨α|X|α⟩ / π` of the labelled element.
pub fn q_rep_fock_element(label: FockLabel, alpha: Complex64) -> f64 {
    let (r, phi) = alpha.to_polar();
    let ln_r = if r > 0.0 { r.ln() } else { f64::NEG_INFINITY };
    let pow = if label.m + label.n == 0 { 0.0 } else { (label.m + label.n) as f64 * ln_r };
    let mag = (-r * r + pow - 0.5 * (log_factorial(label.m as u64) + log_factorial(label.n as u64))).exp() / PI;
    if label.is_diagonal() {
        mag
    } else {
        (label.theta - label.delta() as f64 * phi).cos() * mag
    }
}

/// Closed-form overlap `γ_s = π ∫ P_s[l1] Q[l2] d²α = Tr[l2 · C_s(l1)]`.
pub fn gamma_overlap(l1: FockLabel, l2: FockLabel, s: f64) -> Result<f64> {
    check_s(s)?;
    if l1.delta() != l2.delta() {
        return Ok(0.0);
    }
    // C_s is self-adjoint, so the overlap is symmetric; order so that m1 ≤ m2.
    let (a, b) = if l1.m <= l2.m { (l1, l2) } else { (l2, l1) };
    let delta = a.delta() as u64;
    let (m1, m2) = (a.m as u64, b.m as u64);
    let (n1, n2) = (m1 - delta, m2 - delta);
    let ln_s = s.ln();
    let g: f64 = (0..=n1)
        .map(|k| {
            let ln = ln_binomial(n1, k) + log_factorial(n2) - log_factorial(n2 - k) + log_factorial(delta)
                - log_factorial(delta + k)
                + 2.0 * (n1 - k) as f64 * ln_s;
            ln.exp()
        })
        .sum();
    let ln_common = (m2 - m1) as f64 * ln_s;
    if delta == 0 {
        let ln = ln_common - (m1 + m2 + 1) as f64 * s.ln_1p();
        return Ok(g * ln.exp());
    }
    let ln = ln_common + 0.5 * (ln_binomial(m1, delta) + ln_binomial(m2, delta)) - (m1 + m2 + 1 - delta) as f64 * s.ln_1p();
    Ok(0.5 * (a.theta - b.theta).cos() * g * ln.exp())
}

/// `‖ρ − C_s(ρ)‖₁ ≤ 2√(s(1 + 2n̄))`.
pub fn delta_s_bound(nbar: f64, s: f64) -> f64 {
    2.0 * (s * (1.0 + 2.0 * nbar)).sqrt()
}

/// Absolute tolerance on each output matrix element of [`additive_noise_apply`].
pub const NOISE_ABS_TOL: f64 = 1e-10;

/// `⟨j|C_s(|m⟩⟨n|)|k⟩` for `m ≥ n`, `j − k = m − n`; zero otherwise.
///
/// With `u = r²/s` the angular integral is `2π` and the radial one becomes
/// `(−1)^n (1−s)^n s^{j−m} √(n! j! / (m! k!)) ∫ e^{−u(1+s)} u^j/j! L_n^{m−n}(u/(1−s)) du`.
/// Self-adjointness of `C_s` gives `K(m,n;j,k) = K(j,k;m,n)`, and the P-function is put on
/// the lower-index pair, which keeps the Laguerre cancellation bounded.
pub fn noise_kernel(m: u32, n: u32, j: u32, k: u32, s: f64) -> Result<f64> {
    check_s(s)?;
    if m < n || j < k || m - n != j - k {
        return Ok(0.0);
    }
    let (m, n, j, k) = if m > j { (j, k, m, n) } else { (m, n, j, k) };
    let delta = (m - n) as f64;
    let ln_jf = log_factorial(j as u64);
    let jf = j as f64;
    let g = |u: f64| -> f64 {
        let w = if u == 0.0 {
            if j == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (jf * u.ln() - u * (1.0 + s) - ln_jf).exp()
        };
        if w == 0.0 {
            0.0
        } else {
            w * laguerre(n, delta, u / (1.0 - s))
        }
    };
    let mut hi = jf + 2.0 * n as f64 + 40.0 + 10.0 * (jf + n as f64 + 1.0).sqrt();
    while g(hi).abs() * hi > 1e-18 {
        hi *= 1.25;
    }
    let peak = jf / (1.0 + s);
    let breaks: Vec<f64> = (1..8).map(|i| hi * i as f64 / 8.0).chain(std::iter::once(peak)).collect();
    // Integrate g and |g| together: the latter measures the attainable precision.
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 4000 };
    let res = integrate_with_breaks(|u| Complex64::new(g(u), g(u).abs()), 0.0, hi, &breaks, opts)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let ln_pref = n as f64 * (1.0 - s).ln()
        + (j as f64 - m as f64) * s.ln()
        + 0.5 * (log_factorial(n as u64) + ln_jf - log_factorial(m as u64) - log_factorial(k as u64));
    let pref = ln_pref.exp();
    let err = pref * (res.error + 64.0 * f64::EPSILON * res.value.im);
    if err > NOISE_ABS_TOL {
        return Err(Error::Quadrature { value: pref * res.value.re, error: err, tolerance: NOISE_ABS_TOL });
    }
    Ok(sign * pref * res.value.re)
}

/// Result of [`additive_noise_apply`].
#[derive(Debug, Clone)]
pub struct NoisyState {
    pub state: FockMatrix,
    /// `Tr ρ − Tr C_s(ρ)` restricted to the output dimension.
    pub trace_deficit: f64,
}

/// `C_s(ρ)` truncated to `out_dim`.
pub fn additive_noise_apply(rho: &FockMatrix, s: f64, out_dim: usize) -> Result<NoisyState> {
    let data = additive_noise_apply_matrix(rho.matrix(), s, out_dim)?;
    let out = FockMatrix::from_trusted(data);
    let trace_deficit = rho.trace() - out.trace();
    Ok(NoisyState { state: out, trace_deficit })
}

/// Linear extension of `C_s` to arbitrary operators given in the Fock basis.
pub fn additive_noise_apply_matrix(x: &DMatrix<Complex64>, s: f64, out_dim: usize) -> Result<DMatrix<Complex64>> {
    check_s(s)?;
    let din = x.nrows();
    let mut out = DMatrix::zeros(out_dim, out_dim);
    let mut cache: HashMap<(u32, u32, u32, u32), f64> = HashMap::new();
    for mi in 0..din {
        for ni in 0..din {
            let v = x[(mi, ni)];
            if v.norm() == 0.0 {
                continue;
            }
            let (hi, lo) = (mi.max(ni), mi.min(ni));
            let delta = hi - lo;
            for kk in 0..out_dim.saturating_sub(delta) {
                let jj = kk + delta;
                let key = (hi as u32, lo as u32, jj as u32, kk as u32);
                let kern = match cache.get(&key) {
                    Some(&c) => c,
                    None => {
                        let c = noise_kernel(key.0, key.1, key.2, key.3, s)?;
                        cache.insert(key, c);
                        c
                    }
                };
                // |m⟩⟨n| with m < n maps to the adjoint pattern.
                let (r, c) = if mi >= ni { (jj, kk) } else { (kk, jj) };
                out[(r, c)] += v * kern;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvcore::fock::trace_distance;
    use crate::quad::integrate;

    #[test]
    fn vacuum_becomes_thermal() {
        let s = 0.2;
        let out = additive_noise_apply(&FockMatrix::fock(0, 1).unwrap(), s, 30).unwrap();
        for k in 0..30 {
            let want = s.powi(k as i32) / (1.0 + s).powi(k as i32 + 1);
            assert!((out.state.matrix()[(k, k)].re - want).abs() < 1e-12);
        }
        assert!(out.trace_deficit > 0.0 && out.trace_deficit < 1e-15);
    }

    #[test]
    fn first_moment_is_preserved() {
        // Tr[a C_s(|1⟩⟨0|)] = Σ √(k+1) ⟨k+1|C_s(|1⟩⟨0|)|k⟩ = 1
        let s = 0.1;
        let total: f64 = (0..60).map(|k| ((k + 1) as f64).sqrt() * noise_kernel(1, 0, k + 1, k, s).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kernel_symmetry_and_selection_rule() {
        let s = 0.15;
        let a = noise_kernel(4, 2, 1, 0, s).unwrap();
        let b = noise_kernel(1, 0, 4, 2, s).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert_eq!(noise_kernel(3, 1, 2, 1, s).unwrap(), 0.0);
    }

    #[test]
    fn p_normalizes() {
        // ∫ P_s[|m⟩⟨m|] d²α = 1
        for m in 0..5u32 {
            let s = 0.3;
            let r = integrate(|r: f64| 2.0 * PI * r * p_rep_radial(m, m, s, r), 0.0, 8.0, QuadOptions::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "m={m}: {}", r.value);
        }
    }

    #[test]
    fn p_sign_change() {
        // L₁ vanishes at r² = s(1−s): for s = ½ that is r² = ¼.
        let below = p_rep_fock_element(FockLabel::diagonal(1), 0.5, Complex64::new(0.49, 0.0)).unwrap();
        let above = p_rep_fock_element(FockLabel::diagonal(1), 0.5, Complex64::new(0.51, 0.0)).unwrap();
        assert!(below < 0.0 && above > 0.0);
        assert!(p_rep_fock_element(FockLabel::diagonal(1), 1.2, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn gamma_frozen() {
        let s: f64 = 0.3;
        let g = gamma_overlap(FockLabel::diagonal(0), FockLabel::diagonal(0), s).unwrap();
        assert!((g - 1.0 / (1.0 + s)).abs() < 1e-15);
        assert_eq!(gamma_overlap(FockLabel::new(2, 0, 0.0), FockLabel::new(3, 0, 0.0), s).unwrap(), 0.0);
        let tiny = 1e-9;
        assert!((gamma_overlap(FockLabel::diagonal(3), FockLabel::diagonal(3), tiny).unwrap() - 1.0).abs() < 1e-7);
        assert!((gamma_overlap(FockLabel::new(4, 1, 0.2), FockLabel::new(4, 1, 0.2), tiny).unwrap() - 0.5).abs() < 1e-7);
    }

    #[test]
    fn gamma_matches_noise_channel() {
        let s = 0.1;
        for m in 0..5u32 {
            let via_channel = noise_kernel(m, m, m, m, s).unwrap();
            let closed = gamma_overlap(FockLabel::diagonal(m), FockLabel::diagonal(m), s).unwrap();
            assert!((via_channel - closed).abs() < 1e-9, "m={m}: {via_channel} vs {closed}");
        }
    }

    #[test]
    fn small_noise_is_nearly_identity() {
        let rho = FockMatrix::mixture(&[(0.5, FockMatrix::fock(1, 8).unwrap()), (0.5, FockMatrix::coherent(Complex64::new(0.3, 0.1), 8))])
            .unwrap();
        let out = additive_noise_apply(&rho, 1e-7, 8).unwrap();
        assert!(trace_distance(&rho, &out.state).unwrap() <= 1e-3);
    }

    #[test]
    fn delta_bound_value() {
        assert!((delta_s_bound(1.0, 0.01) - 2.0 * 0.03f64.sqrt()).abs() < 1e-15);
    }
}
