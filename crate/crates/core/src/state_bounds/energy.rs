//! States known only through their mean photon number.
//!
//! Truncate to `M` photons (`η_M ≥ 1 − n̄/M`), smooth with `s = 1/(κ(M+3))`, and bound the
//! P-function mass of any normalized `M`-photon state by the largest row sum of `μ_{s,m,n}`,
//! `2(1−s)^M M/(s^{M−1}(1−2s))`, valid while `(1−s)(1−2s)/(s(M−1)) > 1`.

use super::{classical_bound, cross_block_term, require_concave, weighted, BoundReport, ExtensionParams, M_MAX};
use crate::coherent_bounds::{BoundCurve, CEILING};
use crate::error::{Error, Result};
use crate::optimize::minimize_log_scale;

const KAPPA_MAX: f64 = 1e6;
const KAPPA_GRID: usize = 40;

struct Terms {
    eta: f64,
    mu: f64,
    argument: f64,
    penalty: f64,
    cross: f64,
}

fn terms(nbar: f64, m_cut: u32, kappa: f64) -> Option<Terms> {
    let m = m_cut as f64;
    let s = 1.0 / (kappa * (m + 3.0));
    if m_cut > 1 && (1.0 - s) * (1.0 - 2.0 * s) / (s * (m - 1.0)) <= 1.0 {
        return None;
    }
    let eta = 1.0 - nbar / m;
    // Below ½ the truncation cost is no longer monotone in η.
    if eta < 0.5 {
        return None;
    }
    let ln_mu = 2f64.ln() + m * (1.0 - s).ln() + m.ln() - (m - 1.0) * s.ln() - (1.0 - 2.0 * s).ln();
    Some(Terms {
        eta,
        mu: ln_mu.exp(),
        argument: s * (1.0 - s) * (m + 1.0) / (1.0 - 2.0 * s),
        penalty: 4.0 * (s * (1.0 + 2.0 * nbar)).sqrt(),
        cross: cross_block_term(eta),
    })
}

fn value(curve: &BoundCurve, t: &Terms) -> f64 {
    t.eta * (weighted(t.mu, curve.eval(t.argument)) + t.penalty).min(CEILING) + CEILING * (1.0 - t.eta) + t.cross
}

/// The bound at fixed `(M, κ)`, before clamping; `None` where the row-sum bound or the
/// truncation estimate does not apply.
pub fn generic_energy_objective(curve: &BoundCurve, nbar: f64, m_cut: u32, kappa: f64) -> Option<f64> {
    if !(kappa > 1.0) || m_cut == 0 {
        return None;
    }
    terms(nbar, m_cut, kappa).map(|t| value(curve, &t))
}

/// The closed form with `ε(1/κ)` and the simplified penalty, for comparison only.
fn simplified_form(curve: &BoundCurve, nbar: f64, m_cut: u32, kappa: f64) -> f64 {
    let m = m_cut as f64;
    let ln_pref = 2f64.ln() + m * (m + 3.0).ln() + (m - 1.0) * kappa.ln();
    (1.0 - nbar / m) * (weighted(ln_pref.exp(), curve.eval(1.0 / kappa)) + 4.0 * (2.0 * nbar / (kappa * m)).sqrt()) + 2.0 * nbar / m
}

/// Minimum over `M ∈ {⌈n̄⌉+1, …, 60}` and `κ ∈ (1, 10⁶]`; ties keep the smaller `M`, then `κ`.
pub fn generic_energy_bound(curve: &BoundCurve, nbar: f64) -> Result<BoundReport> {
    require_concave(curve)?;
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidState(format!("mean photon number must be non-negative, got {nbar}")));
    }
    if nbar == 0.0 {
        return classical_bound(curve, 0.0);
    }
    let kappa_lo = KAPPA_MAX.powf(1.0 / KAPPA_GRID as f64);
    let first = (nbar.ceil() as u32 + 1).max(1);
    let mut best: Option<(f64, u32, f64)> = None;
    for m_cut in first..=M_MAX {
        let f = |k: f64| generic_energy_objective(curve, nbar, m_cut, k).unwrap_or(f64::INFINITY);
        let (k, v) = minimize_log_scale(f, kappa_lo, KAPPA_MAX, KAPPA_GRID);
        if v.is_finite() && best.map_or(true, |b| v < b.0) {
            best = Some((v, m_cut, k));
        }
    }
    let Some((v, m_cut, kappa)) = best else {
        let mut r = BoundReport::truncated("trivial", None, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        r.intermediate.insert("pre_clamp".into(), CEILING);
        return Ok(r);
    };
    let t = terms(nbar, m_cut, kappa).expect("finite objective implies valid terms");
    let s = 1.0 / (kappa * (m_cut as f64 + 3.0));
    let branch = if v >= CEILING { "trivial" } else { "energy_only" };
    let params = ExtensionParams { s: Some(s), m: Some(m_cut), kappa: Some(kappa) };
    let mut r = BoundReport::truncated(branch, Some(params), t.eta, t.mu, t.argument, curve.eval(t.argument), t.penalty, t.cross);
    r.intermediate.insert("simplified_form".into(), simplified_form(curve, nbar, m_cut, kappa));
    Ok(r)
}
