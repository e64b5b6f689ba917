//! Channel-agnostic coherent-state bound.
//!
//! The additive noise channel `C_s` turns each Fock element into a state with a bounded
//! P-function; its in-distribution part is controlled by `ε₀` and the remainder by the
//! Gaussian tail outside `τ`. The per-element bounds `ξ^{(m,n)}` are weighted by the
//! coherent-state amplitudes and the smoothing cost `δ_s` is added.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{InDistributionGuarantee, CEILING};
use crate::optimize::minimize_log_scale;
use crate::specfun::{ln_gamma, ln_gamma_upper, log_factorial, pochhammer_log};

const S_MIN: f64 = 1e-8;
const S_MAX: f64 = 0.499;
const S_GRID: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalEval {
    pub value: f64,
    /// Minimizing noise parameter; `None` when the bound is the ceiling.
    pub s: Option<f64>,
    /// Certified upper bound on the truncated weight, already included in `value`.
    pub tail: f64,
}

fn tail_exponent(g: &InDistributionGuarantee, s: f64) -> f64 {
    g.tau2() * (1.0 - 2.0 * s) / (2.0 * s * (1.0 - s))
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ξ^{(m,m)}`: bound on `‖(Ψ−Φ)[C_s(|m⟩⟨m|)]‖₁`.
pub fn xi_diag(g: &InDistributionGuarantee, m: u32, s: f64) -> f64 {
    let ln_pref = 2f64.ln() + (m as f64 + 1.0) * (1.0 - s).ln() - m as f64 * s.ln() - (1.0 - 2.0 * s).ln();
    let ln_factor = ln_add_exp(g.eps0.ln(), (2.0 - g.eps0).ln() - tail_exponent(g, s));
    (ln_pref + ln_factor).exp().min(CEILING)
}

fn xi_offdiag_ln_gamma_factor(g: &InDistributionGuarantee, delta: u32, s: f64) -> f64 {
    let a = 1.0 + 0.5 * delta as f64;
    let upper = ln_gamma_upper(a, tail_exponent(g, s)).unwrap_or(f64::NEG_INFINITY);
    ln_add_exp(g.eps0.ln() + ln_gamma(a), (2.0 - g.eps0).ln() + upper)
}

fn xi_offdiag_with_factor(m: u32, n: u32, s: f64, ln_factor: f64) -> f64 {
    let d = (m - n) as f64;
    let half_sum = 0.5 * (m + n) as f64;
    let ln_pref = (2.0 + 0.5 * d) * 2f64.ln() + (1.0 + half_sum) * (1.0 - s).ln()
        - PI.ln()
        - half_sum * s.ln()
        - (1.0 + 0.5 * d) * (1.0 - 2.0 * s).ln()
        + pochhammer_log(d + 1.0, n as u64).ln_abs
        - 0.5 * (log_factorial(m as u64) + log_factorial(n as u64));
    (ln_pref + ln_factor).exp().min(CEILING)
}

/// `ξ^{(m,n)}`, `m > n`: bound on `‖(Ψ−Φ)[C_s(½(e^{iθ}|m⟩⟨n| + h.c.))]‖₁`.
pub fn xi_offdiag(g: &InDistributionGuarantee, m: u32, n: u32, s: f64) -> f64 {
    let (m, n) = (m.max(n), m.min(n));
    if m == n {
        return xi_diag(g, m, s);
    }
    xi_offdiag_with_factor(m, n, s, xi_offdiag_ln_gamma_factor(g, m - n, s))
}

fn truncation_order(r: f64) -> u32 {
    40u32.max((4.0 * r * r + 10.0 * r).ceil() as u32)
}

// ln of e^{-r²} r^{m+n} / √(m! n!)
fn ln_weight(r: f64, m: u32, n: u32) -> f64 {
    let p = if m + n == 0 { 0.0 } else { (m + n) as f64 * r.ln() };
    -r * r + p - 0.5 * (log_factorial(m as u64) + log_factorial(n as u64))
}

/// Certified bound on `e^{-r²} Σ_{m+n>K} r^{m+n}/√(m!n!)`, the weight not summed explicitly.
///
/// The summand factorizes as `√p_m √p_n` with `p` the Poisson(r²) weights, so the tail is
/// `Σ_m √p_m S(K−m+1)` with `S` the suffix sums of `√p`. Suffix sums are closed by a
/// geometric series once the ratio `r/√(n+1)` falls below ½.
fn truncated_weight(r: f64, k: u32) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let mut l = k + 1;
    while r / ((l + 1) as f64).sqrt() > 0.5 {
        l += 1;
    }
    let sqrt_p: Vec<f64> =
        (0..=l).map(|m| (0.5 * (-r * r + 2.0 * m as f64 * r.ln() - log_factorial(m as u64))).exp()).collect();
    let ratio = r / ((l + 1) as f64).sqrt();
    // suffix[j] = Σ_{n≥j} √p_n for j ≤ l.
    let mut suffix = vec![0.0; l as usize + 1];
    suffix[l as usize] = sqrt_p[l as usize] / (1.0 - ratio);
    for j in (0..l as usize).rev() {
        suffix[j] = suffix[j + 1] + sqrt_p[j];
    }
    let inner: f64 = (0..=k).map(|m| sqrt_p[m as usize] * suffix[(k - m + 1) as usize]).sum();
    // Rows m > K contribute √p_m times the full sum.
    let outer = suffix[k as usize + 1] * suffix[0];
    (inner + outer) * (1.0 + 1e-12)
}

/// The objective at fixed `s`, before clamping.
pub fn universal_objective(g: &InDistributionGuarantee, r: f64, s: f64) -> (f64, f64) {
    let k = truncation_order(r);
    let ln_factors: Vec<f64> = (0..=k).map(|d| if d == 0 { 0.0 } else { xi_offdiag_ln_gamma_factor(g, d, s) }).collect();
    let mut sum = 0.0;
    for m in 0..=k {
        for n in 0..=m.min(k - m) {
            if m + n > k {
                break;
            }
            let w = if r == 0.0 && m + n > 0 { 0.0 } else { ln_weight(r, m, n).exp() };
            if w == 0.0 {
                continue;
            }
            let (xi, mult) = if m == n {
                (xi_diag(g, m, s), 1.0)
            } else {
                (xi_offdiag_with_factor(m, n, s, ln_factors[(m - n) as usize]), 2.0)
            };
            sum += mult * w * xi;
        }
    }
    // Each omitted element contributes at most the ceiling.
    let tail = truncated_weight(r, k);
    let penalty = 4.0 * (s * (1.0 + 2.0 * r * r)).sqrt();
    (sum + CEILING * tail + penalty, CEILING * tail)
}

/// Minimum over `s ∈ [1e-8, 0.499]` of [`universal_objective`], clamped to 2.
pub fn universal_coherent_bound(g: InDistributionGuarantee, r: f64) -> UniversalEval {
    let r = r.abs();
    if g.eps0 >= CEILING {
        return UniversalEval { value: CEILING, s: None, tail: 0.0 };
    }
    let (s, v) = minimize_log_scale(|s| universal_objective(&g, r, s).0, S_MIN, S_MAX, S_GRID);
    if v >= CEILING {
        return UniversalEval { value: CEILING, s: None, tail: 0.0 };
    }
    UniversalEval { value: v, s: Some(s), tail: universal_objective(&g, r, s).1 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(eps0: f64) -> InDistributionGuarantee {
        InDistributionGuarantee::new(eps0, 1.0).unwrap()
    }

    #[test]
    fn xi_never_exceeds_ceiling() {
        let gg = g(0.1);
        for s in [1e-6, 0.01, 0.2, 0.45] {
            for m in 0..30 {
                assert!(xi_diag(&gg, m, s) <= 2.0);
                for n in 0..m {
                    let x = xi_offdiag(&gg, m, n, s);
                    assert!((0.0..=2.0).contains(&x));
                }
            }
        }
    }

    #[test]
    fn vacuum_bound_is_a_small_multiple_of_eps0() {
        let e = universal_coherent_bound(g(1e-4), 0.0);
        assert!(e.value <= 10.0 * 1e-4, "{e:?}");
        assert!(e.value > 2.0 * 1e-4);
        // Only (0,0) survives: ξ^{(0,0)} + 4√s at the optimum.
        let s = e.s.unwrap();
        assert!((e.value - (xi_diag(&g(1e-4), 0, s) + 4.0 * s.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn truncated_weight_is_an_upper_bound() {
        // Brute-force the weight beyond K with a much larger cutoff.
        let r: f64 = 2.0;
        let k = truncation_order(r);
        let mut outside = 0.0;
        for m in 0..200u32 {
            for n in 0..200u32 {
                if m + n > k {
                    outside += ln_weight(r, m, n).exp();
                }
            }
        }
        let bound = truncated_weight(r, k);
        assert!(bound >= outside - 1e-15, "{bound} {outside}");
        assert!(bound <= 1.01 * outside);
    }

    #[test]
    fn halving_eps0_never_hurts() {
        for r in [0.0, 0.05, 0.2, 0.5] {
            let mut prev = f64::INFINITY;
            let mut e = 1e-2;
            for _ in 0..8 {
                let v = universal_coherent_bound(g(e), r).value;
                assert!(v <= prev + 1e-12, "r={r}, eps0={e}: {v} > {prev}");
                prev = v;
                e *= 0.5;
            }
        }
    }

    #[test]
    fn clamps_at_large_amplitude() {
        let e = universal_coherent_bound(g(0.1), 4.0);
        assert_eq!(e.value, 2.0);
        assert!(e.s.is_none());
    }
}
