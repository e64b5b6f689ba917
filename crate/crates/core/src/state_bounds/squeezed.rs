//! One-mode squeezed vacuum `√(1−λ²) Σ λ^{p+q} √((2p)!(2q)!)/(2^{p+q}p!q!) |2p⟩⟨2q|`.
//!
//! For `s ≥ λ/(1+λ)` the smoothed state is classical. Below that threshold the state is
//! truncated to `M` photons (odd `M`, so the even-photon sum closes) and the P-function mass
//! is bounded by two geometric series.

use super::{cross_block_term, require_concave, weighted, BoundReport, ExtensionParams, M_MAX, S_GRID, S_MAX, S_MIN};
use crate::coherent_bounds::{BoundCurve, CEILING};
use crate::error::{Error, Result};
use crate::optimize::{minimize_linear, minimize_log_scale};
use crate::specfun::{beta_incomplete, ln_binomial, ln_gamma, log_factorial};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidState(format!("squeezing λ must lie in (0,1), got {lambda}")))
    }
}

fn check_odd(m_cut: u32) -> Result<()> {
    if m_cut % 2 == 1 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("squeezed-vacuum truncation needs odd M, got {m_cut}")))
    }
}

/// `η_M = √(1−λ²) Σ_{2p<M} λ^{2p} C(2p,p)/4^p`.
pub fn squeezed_eta_exact(lambda: f64, m_cut: u32) -> Result<f64> {
    check_lambda(lambda)?;
    let top = m_cut.saturating_sub(1) / 2;
    let ln_l2 = 2.0 * lambda.ln();
    let sum: f64 = (0..=top as u64)
        .map(|p| (p as f64 * ln_l2 + ln_binomial(2 * p, p) - 2.0 * p as f64 * 2f64.ln()).exp())
        .sum();
    Ok(if m_cut == 0 { 0.0 } else { (1.0 - lambda * lambda).sqrt() * sum })
}

/// `1 − B(λ²; (M+1)/2, ½) Γ(M/2+1) / (√π ((M−1)/2)!)`, equal to [`squeezed_eta_exact`] for odd `M`.
pub fn squeezed_eta_closed_form(lambda: f64, m_cut: u32) -> Result<f64> {
    check_lambda(lambda)?;
    check_odd(m_cut)?;
    let b = beta_incomplete(lambda * lambda, 0.5 * (m_cut as f64 + 1.0), 0.5)?;
    let ln_c = ln_gamma(0.5 * m_cut as f64 + 1.0) - 0.5 * std::f64::consts::PI.ln() - log_factorial(((m_cut - 1) / 2) as u64);
    Ok(1.0 - b * ln_c.exp())
}

/// Markov bound `1 − n̄/M` with `n̄ = λ²/(1−λ²)`; a lower bound on `η_M`.
pub fn squeezed_eta_lower_bound(lambda: f64, m_cut: u32) -> f64 {
    1.0 - lambda * lambda / (m_cut as f64 * (1.0 - lambda * lambda))
}

// (y^k − 1)/(y − 1), continuous through y = 1.
fn geometric_quotient(y: f64, k: f64) -> f64 {
    if (y - 1.0).abs() < 1e-12 {
        k
    } else {
        (k * y.ln()).exp_m1() / (y - 1.0)
    }
}

/// Upper bound on `Σ_{m,n<M} |ρ_mn| μ_{s,m,n}` for the squeezed vacuum (unnormalized
/// truncation), odd `M`.
pub fn squeezed_mu_ub(lambda: f64, s: f64, m_cut: u32) -> Result<f64> {
    check_lambda(lambda)?;
    check_odd(m_cut)?;
    if !(s > 0.0 && s < 0.5) {
        return Err(Error::InvalidParams(format!("s must lie in (0, 1/2), got {s}")));
    }
    let x = (1.0 - 2.0 * s) * (1.0 - s) * lambda / s;
    let base = lambda * (1.0 - s) / (s * (1.0 - 2.0 * s));
    let (y1, y2) = (base * (1.0 + x), base * x);
    let k = 0.5 * (m_cut as f64 + 1.0);
    let series = 4.0 * geometric_quotient(y1, k) / (std::f64::consts::PI * (1.0 + x).sqrt()) + geometric_quotient(y2, k);
    Ok(2.0 * (1.0 - s) * (1.0 - lambda * lambda).sqrt() / (1.0 - 2.0 * s) * series)
}

struct Truncated {
    eta: f64,
    mu: f64,
    argument: f64,
    penalty: f64,
    cross: f64,
}

fn truncated_terms(lambda: f64, nbar: f64, s: f64, m_cut: u32) -> Result<Truncated> {
    let eta = squeezed_eta_exact(lambda, m_cut)?;
    Ok(Truncated {
        eta,
        mu: squeezed_mu_ub(lambda, s, m_cut)? / eta,
        argument: s * (1.0 - s) * (m_cut as f64 + 1.0) / (1.0 - 2.0 * s),
        penalty: 4.0 * (s * (1.0 + 2.0 * nbar)).sqrt(),
        cross: cross_block_term(eta),
    })
}

fn truncated_value(curve: &BoundCurve, t: &Truncated) -> f64 {
    t.eta * (weighted(t.mu, curve.eval(t.argument)) + t.penalty).min(CEILING) + CEILING * (1.0 - t.eta) + t.cross
}

/// Better of the classical branch (`s ≥ λ/(1+λ)`) and the truncated branch over odd `M`.
pub fn squeezed_vacuum_bound(curve: &BoundCurve, lambda: f64) -> Result<BoundReport> {
    require_concave(curve)?;
    check_lambda(lambda)?;
    let l2 = lambda * lambda;
    let nbar = l2 / (1.0 - l2);
    let threshold = lambda / (1.0 + lambda);

    let classical = |s: f64| curve.eval(nbar + s) + 4.0 * (s * (1.0 + l2) / (1.0 - l2)).sqrt();
    let (s_c, v_c) = if threshold < S_MAX {
        minimize_linear(classical, threshold, S_MAX, 16)
    } else {
        (threshold, classical(threshold))
    };
    let mut best = BoundReport::truncated(
        "squeezed_classical",
        Some(ExtensionParams { s: Some(s_c), ..Default::default() }),
        1.0,
        1.0,
        nbar + s_c,
        curve.eval(nbar + s_c),
        4.0 * (s_c * (1.0 + l2) / (1.0 - l2)).sqrt(),
        0.0,
    );
    debug_assert!((best.value - v_c.min(CEILING)).abs() < 1e-12);

    let s_top = threshold.min(S_MAX);
    for m_cut in (1..M_MAX).step_by(2) {
        let f = |s: f64| truncated_terms(lambda, nbar, s, m_cut).map(|t| truncated_value(curve, &t)).unwrap_or(f64::INFINITY);
        if s_top <= S_MIN * 10.0 {
            break;
        }
        let (s, v) = minimize_log_scale(f, S_MIN, s_top, S_GRID);
        if v < best.value {
            let t = truncated_terms(lambda, nbar, s, m_cut)?;
            let params = ExtensionParams { s: Some(s), m: Some(m_cut), kappa: None };
            best = BoundReport::truncated("squeezed_truncated", Some(params), t.eta, t.mu, t.argument, curve.eval(t.argument), t.penalty, t.cross);
        }
    }
    best.intermediate.insert("classical_threshold".into(), threshold);
    Ok(best)
}
