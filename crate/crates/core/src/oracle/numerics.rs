//! Direct quadrature of the phase-space integrals that the closed forms evaluate or bound.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cvcore::{
    additive_noise_apply, delta_s_bound, p_rep_radial, trace_distance_padded, FockLabel, FockMatrix,
};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{laguerre, log_factorial};
use crate::state_bounds::mu_element;

const SCAN_POINTS: usize = 4000;

/// Sign-change roots of `L_n^{(α)}` on `(0, 4n + 2α + 10)`, refined by bisection.
pub fn laguerre_roots(n: u32, alpha: f64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let hi = 4.0 * n as f64 + 2.0 * alpha + 10.0;
    let f = |x: f64| laguerre(n, alpha, x);
    let mut roots = Vec::with_capacity(n as usize);
    let mut x0 = 0.0;
    let mut f0 = f(x0);
    for i in 1..=SCAN_POINTS {
        let x1 = hi * i as f64 / SCAN_POINTS as f64;
        let f1 = f(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if c <= a || c >= b {
                    break;
                }
                let fc = f(c);
                if fa * fc <= 0.0 {
                    b = c;
                } else {
                    a = c;
                    fa = fc;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-300, rel_tol: 1e-11, max_intervals: 20000 }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("s must lie in (0, 1/2), got {s}")))
    }
}

/// Radii at which `A(r)` for `(m, n)` changes sign.
fn sign_change_radii(m: u32, n: u32, s: f64) -> Vec<f64> {
    laguerre_roots(n, (m - n) as f64).into_iter().map(|u| (u * s * (1.0 - s)).sqrt()).collect()
}

/// Absolute P-function mass and second moment of `C_s` applied to the labelled element,
/// by quadrature, next to the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuNuNumeric {
    pub mu_numeric: f64,
    pub nu_numeric: f64,
    pub mu_bound: f64,
    pub nu_bound: f64,
}

pub fn mu_nu_numeric(m: u32, n: u32, s: f64) -> Result<MuNuNumeric> {
    check_s(s)?;
    let (m, n) = if m >= n { (m, n) } else { (n, m) };
    let breaks = sign_change_radii(m, n, s);
    let r_max = (s * (2.0 * (m + n) as f64 + 80.0)).sqrt();
    // ∫|cos(θ − Δφ)| dφ = 4 off the diagonal.
    let angular = if m == n { 2.0 * PI } else { 4.0 };
    let mu = integrate_with_breaks(|r| p_rep_radial(m, n, s, r).abs() * r, 0.0, r_max, &breaks, opts())?.value;
    let nu = integrate_with_breaks(|r| p_rep_radial(m, n, s, r).abs() * r * r * r, 0.0, r_max, &breaks, opts())?.value;
    let mu_bound = mu_element(m, n, s)?;
    let unit = s * (1.0 - s) / (1.0 - 2.0 * s);
    Ok(MuNuNumeric {
        mu_numeric: angular * mu,
        nu_numeric: angular * nu,
        mu_bound,
        nu_bound: mu_bound * unit * (2.0 + (m - n) as f64),
    })
}

fn husimi_radial(l: FockLabel, r: f64) -> f64 {
    let k = (l.m + l.n) as f64;
    let pow = if k == 0.0 { 0.0 } else { k * r.ln() };
    (-r * r + pow - 0.5 * (log_factorial(l.m as u64) + log_factorial(l.n as u64))).exp() / PI
}

/// `π ∫ P_s[l1] Q[l2] d²α` by radial quadrature; the angular integral is done exactly.
pub fn gamma_quadrature(l1: FockLabel, l2: FockLabel, s: f64) -> Result<f64> {
    check_s(s)?;
    if l1.delta() != l2.delta() {
        return Ok(0.0);
    }
    // P of the lower-index element has the fewest sign changes.
    let (a, b) = if l1.m <= l2.m { (l1, l2) } else { (l2, l1) };
    let angular = if a.is_diagonal() { 2.0 * PI } else { PI * (a.theta - b.theta).cos() };
    let total = (a.m + a.n + b.m + b.n) as f64;
    let r_max = (2.0 * (total + 40.0) * s / (1.0 + s)).sqrt() + 2.0;
    let mut breaks = sign_change_radii(a.m, a.n, s);
    breaks.push((0.5 * (b.m + b.n) as f64).sqrt());
    let res = integrate_with_breaks(|r| p_rep_radial(a.m, a.n, s, r) * husimi_radial(b, r) * r, 0.0, r_max, &breaks, opts())?;
    Ok(PI * angular * res.value)
}

/// `‖|m⟩⟨m| − C_s(|m⟩⟨m|)‖₁` computed in a truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSExact {
    pub distance: f64,
    pub bound: f64,
    /// Trace lost above the output dimension; the distance is accurate to about twice this.
    pub trace_deficit: f64,
    pub truncation_warning: bool,
}

pub fn delta_s_exact(m: u32, s: f64, dim: usize) -> Result<DeltaSExact> {
    check_s(s)?;
    if dim <= m as usize {
        return Err(Error::InvalidParams(format!("output dimension {dim} must exceed m = {m}")));
    }
    let rho = FockMatrix::fock(m as usize, m as usize + 1)?;
    let noisy = additive_noise_apply(&rho, s, dim)?;
    let distance = trace_distance_padded(&rho, &noisy.state) + noisy.trace_deficit.max(0.0);
    Ok(DeltaSExact {
        distance,
        bound: delta_s_bound(m as f64, s),
        trace_deficit: noisy.trace_deficit,
        truncation_warning: noisy.trace_deficit > 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvcore::gamma_overlap;

    #[test]
    fn laguerre_roots_known() {
        // L_2(x) = (x² − 4x + 2)/2.
        let r = laguerre_roots(2, 0.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((r[1] - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(laguerre_roots(5, 3.0).len(), 5);
    }

    #[test]
    fn vacuum_mass_is_one() {
        let v = mu_nu_numeric(0, 0, 0.2).unwrap();
        assert!((v.mu_numeric - 1.0).abs() < 1e-10);
        // Smoothed vacuum is Gaussian with variance s: ∫|α|² P = s.
        assert!((v.nu_numeric - 0.2).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_dominate_quadrature() {
        for s in [0.02, 0.1, 0.3, 0.45] {
            for m in 0..=6 {
                for n in 0..=m {
                    let v = mu_nu_numeric(m, n, s).unwrap();
                    assert!(v.mu_numeric <= v.mu_bound * (1.0 + 1e-9), "μ m={m} n={n} s={s}: {v:?}");
                    assert!(v.nu_numeric <= v.nu_bound * (1.0 + 1e-9), "ν m={m} n={n} s={s}: {v:?}");
                }
            }
        }
    }

    #[test]
    fn gamma_matches_closed_form() {
        for s in [0.05, 0.2, 0.4] {
            for (m1, n1, m2, n2) in [(0, 0, 0, 0), (1, 1, 3, 3), (2, 0, 4, 2), (3, 1, 3, 1), (5, 2, 4, 1), (6, 6, 2, 2)] {
                let l1 = FockLabel::new(m1, n1, 0.3);
                let l2 = FockLabel::new(m2, n2, -0.4);
                let q = gamma_quadrature(l1, l2, s).unwrap();
                let c = gamma_overlap(l1, l2, s).unwrap();
                assert!((q - c).abs() <= 1e-6 * c.abs().max(1e-12), "{l1:?} {l2:?} s={s}: {q} vs {c}");
            }
        }
        assert_eq!(gamma_quadrature(FockLabel::new(2, 0, 0.0), FockLabel::new(2, 1, 0.0), 0.1).unwrap(), 0.0);
    }

    #[test]
    fn delta_s_below_bound() {
        for m in 0..=6 {
            for s in [1e-4, 1e-2, 0.1] {
                let d = delta_s_exact(m, s, 64).unwrap();
                assert!(!d.truncation_warning, "{d:?}");
                assert!(d.distance <= d.bound + 1e-9, "m={m} s={s}: {d:?}");
            }
        }
    }
}
