//! States with finite negativity, and single-photon-added thermal states (SPATs).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{require_concave, BoundReport, ExtensionParams, S_GRID, S_MAX, S_MIN};
use crate::coherent_bounds::{BoundCurve, CEILING};
use crate::error::{Error, Result};
use crate::optimize::minimize_log_scale;

/// P-function split `P = (1+𝒩)P₊ − 𝒩P₋` into normalized positive parts with mean photon
/// numbers `n̄±`. `μ_P = ∫|P|`, `ν_P = ∫|P| |α|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityProfile {
    pub negativity: f64,
    pub nbar_plus: f64,
    pub nbar_minus: f64,
    pub mu_p: f64,
    pub nu_p: f64,
}

impl NegativityProfile {
    pub fn new(negativity: f64, nbar_plus: f64, nbar_minus: f64) -> Result<Self> {
        let finite_nonneg = |x: f64| x >= 0.0 && x.is_finite();
        if !(finite_nonneg(negativity) && finite_nonneg(nbar_plus) && finite_nonneg(nbar_minus)) {
            return Err(Error::InvalidState(format!(
                "negativity profile needs finite non-negative entries, got 𝒩={negativity}, n̄₊={nbar_plus}, n̄₋={nbar_minus}"
            )));
        }
        let p = NegativityProfile {
            negativity,
            nbar_plus,
            nbar_minus,
            mu_p: 1.0 + 2.0 * negativity,
            nu_p: (1.0 + negativity) * nbar_plus + negativity * nbar_minus,
        };
        if p.nbar() < -1e-12 * p.nu_p.max(1.0) {
            return Err(Error::InvalidState(format!("profile has negative mean photon number {}", p.nbar())));
        }
        Ok(p)
    }

    /// `(1+𝒩)n̄₊ − 𝒩n̄₋`.
    pub fn nbar(&self) -> f64 {
        (1.0 + self.negativity) * self.nbar_plus - self.negativity * self.nbar_minus
    }
}

/// `min((1+𝒩)ε(n̄₊) + 𝒩ε(n̄₋), μ ε(ν/μ))`, both clamped.
///
/// The first form is never looser; the second needs only `(μ, ν)`. Their ratio is at most
/// `μ/(1+𝒩)`, which is below `μ/(μ−1)` only when `𝒩 ≤ 1`.
pub fn finite_negativity_bound(curve: &BoundCurve, p: &NegativityProfile) -> Result<BoundReport> {
    require_concave(curve)?;
    let n = p.negativity;
    let (cp, cm) = (curve.eval(p.nbar_plus), curve.eval(p.nbar_minus));
    let pm = ((1.0 + n) * cp + n * cm).min(CEILING);
    let arg = p.nu_p / p.mu_p;
    let mu_nu = BoundReport::truncated("negativity_mu_nu", None, 1.0, p.mu_p, arg, curve.eval(arg), 0.0, 0.0);
    let mut report = if pm <= mu_nu.value {
        let intermediate = BTreeMap::from([
            ("negativity".to_string(), n),
            ("curve_plus".to_string(), cp),
            ("curve_minus".to_string(), cm),
            ("pre_clamp".to_string(), (1.0 + n) * cp + n * cm),
        ]);
        BoundReport { value: pm, branch: "negativity_pm".into(), chosen_params: None, intermediate }
    } else {
        mu_nu.clone()
    };
    report.intermediate.insert("pm_value".into(), pm);
    report.intermediate.insert("mu_nu_value".into(), mu_nu.value);
    Ok(report)
}

/// Profile of `C_s(ρ_SPAT)`, whose P-function is `(1+q)/(π b³)(r² − b(1−s)/(1+q))e^{−r²/b}`
/// with `b = q + s`. Integrating the negative disc gives, with `x = (1−s)/(1+q)`,
/// `𝒩 = (1+q)e^{−x}/b − 1` and `𝒩n̄₋ = (1+q)(x − 2 + (x+2)e^{−x})`; the mean is `1+2q+s`.
pub fn spat_profile(q: f64, s: f64) -> Result<NegativityProfile> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidState(format!("SPAT q must be positive, got {q}")));
    }
    if !(0.0..0.5).contains(&s) {
        return Err(Error::InvalidParams(format!("s must lie in [0, 1/2), got {s}")));
    }
    let b = q + s;
    let x = (1.0 - s) / (1.0 + q);
    let e = (-x).exp();
    // x − 1 + e^{−x} loses digits for small x; expm1 keeps them.
    let negativity = (1.0 + q) * ((-x).exp_m1() + x) / b;
    let neg_moment = (1.0 + q) * (x - 2.0 + (x + 2.0) * e);
    let nbar = 1.0 + 2.0 * q + s;
    let nbar_plus = (nbar + neg_moment) / (1.0 + negativity);
    let nbar_minus = neg_moment / negativity;
    NegativityProfile::new(negativity, nbar_plus, nbar_minus)
}

/// `μ_s ε(ν_s/μ_s) + 4√(s(3+4q))`, before clamping.
pub fn spat_objective(curve: &BoundCurve, q: f64, s: f64) -> Result<f64> {
    let p = spat_profile(q, s)?;
    Ok(p.mu_p * curve.eval(p.nu_p / p.mu_p) + 4.0 * (s * (3.0 + 4.0 * q)).sqrt())
}

/// Minimum of [`spat_objective`] over `s ∈ [0, 0.49]`; `s = 0` is the noiseless form.
pub fn spat_bound(curve: &BoundCurve, q: f64) -> Result<BoundReport> {
    require_concave(curve)?;
    let at_zero = spat_objective(curve, q, 0.0)?;
    let (s_opt, v_opt) = minimize_log_scale(|s| spat_objective(curve, q, s).unwrap_or(f64::INFINITY), S_MIN, S_MAX, S_GRID);
    let s = if v_opt < at_zero { s_opt } else { 0.0 };
    let p = spat_profile(q, s)?;
    let arg = p.nu_p / p.mu_p;
    let params = ExtensionParams { s: Some(s), ..Default::default() };
    let mut r =
        BoundReport::truncated("spat", Some(params), 1.0, p.mu_p, arg, curve.eval(arg), 4.0 * (s * (3.0 + 4.0 * q)).sqrt(), 0.0);
    r.intermediate.insert("noiseless_value".into(), at_zero.min(CEILING));
    r.intermediate.insert("negativity".into(), p.negativity);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent_bounds::{phase_rotation_bound, InDistributionGuarantee};
    use crate::quad::{integrate, QuadOptions};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn pr(eps0: f64) -> BoundCurve {
        phase_rotation_bound(InDistributionGuarantee::new(eps0, 1.0).unwrap()).unwrap()
    }

    // Closed forms as printed for the noiseless case.
    fn spat_mu_printed(q: f64) -> f64 {
        2.0 * (-1.0 / (1.0 + q)).exp() * (1.0 + q) / q - 1.0
    }
    fn spat_ratio_printed(q: f64) -> f64 {
        1.0 + 2.0 * q - 2.0 / (2.0 + 2.0 * q - (1.0 / (1.0 + q)).exp() * q)
    }
    // The noisy ratio with the exponent sign that reduces to the noiseless form at s = 0.
    fn spat_ratio_noisy(q: f64, s: f64) -> f64 {
        1.0 + 2.0 * q + s - 2.0 * (1.0 - s).powi(2) / (2.0 + 2.0 * q - ((1.0 - s) / (1.0 + q)).exp() * (q + s))
    }

    #[test]
    fn profile_invariants() {
        let p = NegativityProfile::new(0.3, 2.0, 0.5).unwrap();
        assert!((p.mu_p - 1.6).abs() < 1e-12);
        assert!((p.nu_p - (1.3 * 2.0 + 0.15)).abs() < 1e-12);
        assert!((p.nbar() - 2.45).abs() < 1e-12);
        assert!(NegativityProfile::new(1.0, 0.1, 5.0).is_err());
        assert!(NegativityProfile::new(-0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn spat_noiseless_matches_printed_forms() {
        let p = spat_profile(1.0, 0.0).unwrap();
        assert!((p.mu_p - 1.426_122_6).abs() < 1e-7);
        for q in [0.1, 0.5, 1.0, 2.0, 7.0] {
            let p = spat_profile(q, 0.0).unwrap();
            assert!((p.mu_p - spat_mu_printed(q)).abs() < 1e-12, "q={q}");
            assert!((p.nu_p / p.mu_p - spat_ratio_printed(q)).abs() < 1e-12, "q={q}");
            assert!((p.nbar() - (1.0 + 2.0 * q)).abs() < 1e-12);
        }
    }

    #[test]
    fn spat_noisy_profile() {
        for q in [0.2, 1.0, 3.0] {
            for s in [1e-3, 0.1, 0.3, 0.49] {
                let p = spat_profile(q, s).unwrap();
                let mu_printed = 2.0 * (-(1.0 - s) / (1.0 + q)).exp() * (1.0 + q) / (q + s) - 1.0;
                assert!((p.mu_p - mu_printed).abs() < 1e-12);
                assert!((p.nu_p / p.mu_p - spat_ratio_noisy(q, s)).abs() < 1e-10, "q={q}, s={s}");
                assert!(p.nu_p / p.mu_p < 1.0 + 2.0 * q + s);
            }
        }
    }

    #[test]
    fn spat_profile_against_quadrature() {
        // Integrate |P| and |P| r² of the smoothed SPAT directly.
        let (q, s): (f64, f64) = (0.7, 0.15);
        let b = q + s;
        let a = b * (1.0 - s) / (1.0 + q);
        let p = |r: f64| (1.0 + q) / (PI * b.powi(3)) * (r * r - a) * (-r * r / b).exp();
        let o = QuadOptions::default();
        let split = [0.0, a.sqrt(), 12.0];
        let mut mu = 0.0;
        let mut nu = 0.0;
        for w in split.windows(2) {
            mu += integrate(|r: f64| 2.0 * PI * r * p(r).abs(), w[0], w[1], o).unwrap().value;
            nu += integrate(|r: f64| 2.0 * PI * r.powi(3) * p(r).abs(), w[0], w[1], o).unwrap().value;
        }
        let prof = spat_profile(q, s).unwrap();
        assert!((prof.mu_p - mu).abs() < 1e-9);
        assert!((prof.nu_p - nu).abs() < 1e-9);
        // The sign change sits at r² = q/(1+q) without noise.
        let a0 = q / (1.0 + q);
        let p0 = |r2: f64| (r2 - a0) * (-r2 / q).exp();
        assert!(p0(0.999 * a0) < 0.0 && p0(1.001 * a0) > 0.0);
    }

    #[test]
    fn spat_bound_improves_on_noiseless_form() {
        let c = pr(0.05);
        let r = spat_bound(&c, 1.0).unwrap();
        assert!(r.value < 2.0);
        assert!(r.value <= r.intermediate["noiseless_value"]);
        assert!((r.recompute() - r.value).abs() < 1e-12);
        // s → 0 continuity of the noisy form, penalty aside.
        let at0 = spat_objective(&c, 1.0, 0.0).unwrap();
        let s: f64 = 1e-8;
        let tiny = spat_objective(&c, 1.0, s).unwrap() - 4.0 * (s * 7.0).sqrt();
        assert!((at0 - tiny).abs() < 1e-6 * at0);
    }

    #[test]
    fn spat_noiseless_equals_negativity_mu_nu_branch() {
        let c = pr(1e-3);
        let p = spat_profile(1.0, 0.0).unwrap();
        let r = finite_negativity_bound(&c, &p).unwrap();
        let s0 = spat_objective(&c, 1.0, 0.0).unwrap();
        assert!((r.intermediate["mu_nu_value"] - s0).abs() < 1e-12);
    }

    #[test]
    fn zero_negativity_is_classical() {
        let c = pr(0.01);
        let p = NegativityProfile::new(0.0, 1.5, 0.0).unwrap();
        let r = finite_negativity_bound(&c, &p).unwrap();
        assert!((r.value - c.eval(1.5)).abs() < 1e-15);
        assert!((r.recompute() - r.value).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn branch_ratio(n in 0.0f64..5.0, a in 0.0f64..10.0, b in 0.0f64..10.0, eps0 in 1e-6f64..0.1) {
            let (np, nm) = if a >= b { (a, b) } else { (b, a) };
            let p = NegativityProfile::new(n, np, nm).unwrap();
            let c = pr(eps0);
            let r = finite_negativity_bound(&c, &p).unwrap();
            prop_assert!((r.recompute() - r.value).abs() < 1e-12);
            let (pm, mn) = (r.intermediate["pm_value"], r.intermediate["mu_nu_value"]);
            prop_assert!(r.value <= pm.min(mn) + 1e-15);
            if pm > 0.0 && pm < 2.0 {
                prop_assert!(mn / pm <= p.mu_p / (1.0 + n) + 1e-9);
                if n <= 1.0 && n > 0.0 {
                    prop_assert!(mn / pm <= p.mu_p / (p.mu_p - 1.0) + 1e-9);
                }
            }
        }
    }
}
