//! Fock states and states with a known number-state decomposition.
//!
//! `C_s(|m⟩⟨n|)` has a P-function with `∫|P| ≤ μ_{s,m,n}` and `∫|P||α|² ≤ ν_{s,m,n}`,
//! where `ν/μ = (s(1−s)/(1−2s))(2 + |m−n|)`.

use std::f64::consts::PI;

use super::{classical_bound, cross_block_term, require_concave, weighted, BoundReport, ExtensionParams, M_MAX, S_GRID, S_MAX, S_MIN};
use crate::coherent_bounds::{BoundCurve, CEILING};
use crate::cvcore::FockMatrix;
use crate::error::{Error, Result};
use crate::optimize::minimize_log_scale;
use crate::specfun::{ln_gamma, log_factorial, pochhammer_log};

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("s must lie in (0, 1/2), got {s}")))
    }
}

/// `ln μ_{s,m,n}`, symmetric in `(m, n)`.
fn ln_mu_element(m: u32, n: u32, s: f64) -> f64 {
    let (m, n) = (m.max(n), m.min(n));
    if m == n {
        return 2f64.ln() + (m as f64 + 1.0) * (1.0 - s).ln() - m as f64 * s.ln() - (1.0 - 2.0 * s).ln();
    }
    let d = (m - n) as f64;
    let half_sum = 0.5 * (m + n) as f64;
    (2.0 + 0.5 * d) * 2f64.ln() + (1.0 + half_sum) * (1.0 - s).ln() - PI.ln() - half_sum * s.ln()
        - (1.0 + 0.5 * d) * (1.0 - 2.0 * s).ln()
        + pochhammer_log(d + 1.0, n as u64).ln_abs
        - 0.5 * (log_factorial(m as u64) + log_factorial(n as u64))
        + ln_gamma(1.0 + 0.5 * d)
}

/// `μ_{s,m,n}`. Off the diagonal this bounds the symmetrized element
/// `½(e^{iθ}|m⟩⟨n| + h.c.)`, so `|ρ_mn| μ_{s,m,n}` counted over both orders covers the pair.
pub fn mu_element(m: u32, n: u32, s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(ln_mu_element(m, n, s).exp())
}

fn ratio_unit(s: f64) -> f64 {
    s * (1.0 - s) / (1.0 - 2.0 * s)
}

fn check_block(rho: &FockMatrix, m_cut: usize) -> Result<()> {
    if m_cut == 0 || m_cut > rho.dim() {
        return Err(Error::InvalidParams(format!("truncation M={m_cut} must lie in 1..={}", rho.dim())));
    }
    Ok(())
}

/// `Σ_{m,n<M} |ρ_mn| μ_{s,m,n}`.
pub fn mu_ub_from_fock(rho: &FockMatrix, s: f64, m_cut: usize) -> Result<f64> {
    check_s(s)?;
    check_block(rho, m_cut)?;
    Ok(block_sums(rho, s, m_cut).0)
}

/// `Σ_{m,n<M} |ρ_mn| ν_{s,m,n}`.
pub fn nu_ub_from_fock(rho: &FockMatrix, s: f64, m_cut: usize) -> Result<f64> {
    check_s(s)?;
    check_block(rho, m_cut)?;
    Ok(block_sums(rho, s, m_cut).1)
}

fn block_sums(rho: &FockMatrix, s: f64, m_cut: usize) -> (f64, f64) {
    let a = rho.matrix();
    let unit = ratio_unit(s);
    let (mut mu, mut nu) = (0.0, 0.0);
    for m in 0..m_cut {
        for n in 0..m_cut {
            let c = a[(m, n)].norm();
            if c == 0.0 {
                continue;
            }
            let e = (c.ln() + ln_mu_element(m as u32, n as u32, s)).exp();
            mu += e;
            nu += e * unit * (2.0 + m.abs_diff(n) as f64);
        }
    }
    (mu, nu)
}

fn fock_penalty(nbar: f64, s: f64) -> f64 {
    4.0 * (s * (1.0 + 2.0 * nbar)).sqrt()
}

/// `2(1−s)^{m+1}/(s^m(1−2s)) ε(2s(1−s)/(1−2s)) + 4√(s(1+2m))`, before clamping.
pub fn fock_objective(curve: &BoundCurve, m: u32, s: f64) -> Result<f64> {
    check_s(s)?;
    let cv = curve.eval(2.0 * ratio_unit(s));
    Ok(weighted(ln_mu_element(m, m, s).exp(), cv) + fock_penalty(m as f64, s))
}

/// Minimum of [`fock_objective`] over `s ∈ (0, 0.49]`; the vacuum is classical.
pub fn fock_bound(curve: &BoundCurve, m: u32) -> Result<BoundReport> {
    require_concave(curve)?;
    if m == 0 {
        return classical_bound(curve, 0.0);
    }
    let (s, _) = minimize_log_scale(|s| fock_objective(curve, m, s).unwrap_or(f64::INFINITY), S_MIN, S_MAX, S_GRID);
    let arg = 2.0 * ratio_unit(s);
    let params = ExtensionParams { s: Some(s), ..Default::default() };
    Ok(BoundReport::truncated(
        "fock",
        Some(params),
        1.0,
        ln_mu_element(m, m, s).exp(),
        arg,
        curve.eval(arg),
        fock_penalty(m as f64, s),
        0.0,
    ))
}

/// Pieces of the truncated-and-smoothed bound at fixed `(s, M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct KnownFockTerms {
    pub eta: f64,
    /// For the normalized truncated state.
    pub mu: f64,
    pub argument: f64,
    pub penalty: f64,
    pub cross: f64,
}

fn known_fock_terms(rho: &FockMatrix, s: f64, m_cut: usize) -> KnownFockTerms {
    let a = rho.matrix();
    let eta: f64 = (0..m_cut).map(|i| a[(i, i)].re).sum();
    let (mu, nu) = block_sums(rho, s, m_cut);
    let straddles = (0..m_cut).any(|i| (m_cut..rho.dim()).any(|j| a[(i, j)].norm() > 1e-15));
    KnownFockTerms {
        eta,
        mu: mu / eta,
        argument: nu / mu,
        penalty: fock_penalty(rho.mean_photon_number(), s),
        cross: if straddles { cross_block_term(eta) } else { 0.0 },
    }
}

fn known_fock_value(curve: &BoundCurve, t: &KnownFockTerms) -> f64 {
    if !(t.eta > 0.0) || !t.argument.is_finite() {
        return f64::INFINITY;
    }
    t.eta * (weighted(t.mu, curve.eval(t.argument)) + t.penalty).min(CEILING) + CEILING * (1.0 - t.eta) + t.cross
}

/// `η_M min(μ ε(ν/μ) + 4√(s(1+2n̄)), 2) + 2(1−η_M) + 4√(η_M(1−η_M))` at fixed `(s, M)`.
///
/// `μ, ν` belong to the normalized truncated state; `ν/μ` never exceeds
/// `s(1−s)(M+1)/(1−2s)`. The last term is present only when `ρ` has coherences across the
/// cutoff.
pub fn known_fock_objective(curve: &BoundCurve, rho: &FockMatrix, s: f64, m_cut: usize) -> Result<f64> {
    check_s(s)?;
    check_block(rho, m_cut)?;
    Ok(known_fock_value(curve, &known_fock_terms(rho, s, m_cut)))
}

/// Minimum of [`known_fock_objective`] over `M ≤ min(dim, 60)` and `s`.
pub fn known_fock_bound(curve: &BoundCurve, rho: &FockMatrix) -> Result<BoundReport> {
    require_concave(curve)?;
    if (rho.trace() - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidState(format!("known Fock state must be normalized, trace is {}", rho.trace())));
    }
    let nbar = rho.mean_photon_number();
    if nbar.abs() < 1e-15 {
        return classical_bound(curve, 0.0);
    }
    let top = rho.dim().min(M_MAX as usize);
    let mut best: Option<(f64, usize, f64)> = None;
    for m_cut in 1..=top {
        let (s, v) = minimize_log_scale(|s| known_fock_value(curve, &known_fock_terms(rho, s, m_cut)), S_MIN, S_MAX, S_GRID);
        if best.map_or(true, |b| v < b.0) {
            best = Some((v, m_cut, s));
        }
    }
    let (_, m_cut, s) = best.expect("at least one truncation");
    let t = known_fock_terms(rho, s, m_cut);
    let params = ExtensionParams { s: Some(s), m: Some(m_cut as u32), kappa: None };
    let mut r = BoundReport::truncated("known_fock", Some(params), t.eta, t.mu, t.argument, curve.eval(t.argument), t.penalty, t.cross);
    r.intermediate.insert("argument_cap".into(), ratio_unit(s) * (m_cut as f64 + 1.0));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent_bounds::{phase_rotation_bound, InDistributionGuarantee};
    use crate::cvcore::truncate_energy;
    use num_complex::Complex64;

    fn pr(eps0: f64) -> BoundCurve {
        phase_rotation_bound(InDistributionGuarantee::new(eps0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn mu_element_values() {
        assert!((mu_element(0, 0, 0.2).unwrap() - 2.0 * 0.8 / 0.6).abs() < 1e-14);
        assert!((mu_element(1, 1, 0.1).unwrap() - 20.25).abs() < 1e-12);
        assert!((mu_element(3, 1, 0.1).unwrap() - mu_element(1, 3, 0.1).unwrap()).abs() < 1e-15);
        assert!(mu_element(1, 1, 0.5).is_err());
    }

    #[test]
    fn mu_ub_of_simple_states() {
        let s = 0.1;
        let vac = FockMatrix::fock(0, 5).unwrap();
        assert!((mu_ub_from_fock(&vac, s, 3).unwrap() - 2.0 * 0.9 / 0.8).abs() < 1e-14);
        let diag = FockMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let want: f64 = [0.5, 0.3, 0.2].iter().enumerate().map(|(m, p)| p * mu_element(m as u32, m as u32, s).unwrap()).sum();
        assert!((mu_ub_from_fock(&diag, s, 3).unwrap() - want).abs() < 1e-12);
        // Per-element ratio ν/μ.
        let f = FockMatrix::fock(2, 4).unwrap();
        let ratio = nu_ub_from_fock(&f, s, 4).unwrap() / mu_ub_from_fock(&f, s, 4).unwrap();
        assert!((ratio - 2.0 * s * (1.0 - s) / (1.0 - 2.0 * s)).abs() < 1e-14);
    }

    #[test]
    fn fock_bound_basics() {
        let c = pr(1e-3);
        let r = fock_bound(&c, 2).unwrap();
        assert!((r.recompute() - r.value).abs() < 1e-12);
        let s = r.chosen_params.unwrap().s.unwrap();
        assert!(s > 0.0 && s <= S_MAX);
        assert!((r.value - fock_objective(&c, 2, s).unwrap().min(2.0)).abs() < 1e-12);
        // The optimum beats every grid point it was seeded from.
        for i in 0..S_GRID {
            let t = S_MIN * (S_MAX / S_MIN).powf(i as f64 / (S_GRID - 1) as f64);
            assert!(r.value <= fock_objective(&c, 2, t).unwrap().min(2.0) + 1e-15);
        }
        assert_eq!(fock_bound(&c, 0).unwrap().value, c.eval(0.0));
    }

    #[test]
    fn known_fock_reduces_to_fock() {
        let c = pr(1e-4);
        for m in 1..5u32 {
            let rho = FockMatrix::fock(m as usize, 8).unwrap();
            for s in [0.01, 0.1, 0.3] {
                let a = known_fock_objective(&c, &rho, s, m as usize + 1).unwrap();
                let b = fock_objective(&c, m, s).unwrap().min(2.0);
                assert!((a - b).abs() < 1e-9, "m={m}, s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn eta_matches_truncate_energy() {
        let rho = FockMatrix::coherent(Complex64::new(0.7, 0.2), 30);
        for m_cut in [1, 3, 6] {
            let t = known_fock_terms(&rho, 0.1, m_cut);
            let (_, eta) = truncate_energy(&rho, m_cut);
            assert!((t.eta - eta).abs() < 1e-14);
            assert!(t.argument <= ratio_unit(0.1) * (m_cut as f64 + 1.0) + 1e-14);
            assert!(t.cross > 0.0);
        }
    }

    #[test]
    fn known_fock_coherent_converges() {
        let rho = FockMatrix::coherent(Complex64::new(0.5f64.sqrt(), 0.0), 30);
        let mut prev = f64::INFINITY;
        // The cross-cutoff term makes convergence slow: μ grows like s^{1−M}.
        for k in [2, 4, 8, 16, 32, 64] {
            let r = known_fock_bound(&pr(10f64.powi(-k)), &rho).unwrap();
            assert!((r.recompute() - r.value).abs() < 1e-12);
            assert!(r.value <= prev + 1e-12);
            prev = r.value;
        }
        assert!(prev < 0.05, "{prev}");
    }

    #[test]
    fn argument_pinned_by_s_scaling() {
        // s = c/M keeps s(1−s)(M+1)/(1−2s) near c.
        let c = 0.3;
        let arg = |m: f64| {
            let s = c / m;
            ratio_unit(s) * (m + 1.0)
        };
        assert!((arg(1e6) - c).abs() < 1e-5);
    }
}
