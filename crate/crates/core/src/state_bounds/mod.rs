//! Extending a concave coherent-state curve `ε(n̄)` to arbitrary input states.
//!
//! A state with P-function of total absolute mass `μ` and absolute second moment `ν` obeys
//! `‖(Ψ−Φ)ρ‖ ≤ μ ε(ν/μ)` by Jensen. Infinite negativity is regularized by the additive
//! noise channel `C_s` (cost `2δ_s ≤ 4√(s(1+2n̄))`), unbounded energy by truncation to
//! `M` photons (cost `2(1−η_M)`).

mod energy;
mod fock;
mod negativity;
mod squeezed;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use energy::{generic_energy_bound, generic_energy_objective};
pub use fock::{fock_bound, fock_objective, known_fock_bound, known_fock_objective, mu_element, mu_ub_from_fock, nu_ub_from_fock};
pub use negativity::{finite_negativity_bound, spat_bound, spat_objective, spat_profile, NegativityProfile};
pub use squeezed::{
    squeezed_eta_closed_form, squeezed_eta_exact, squeezed_eta_lower_bound, squeezed_mu_ub, squeezed_vacuum_bound,
};

use crate::coherent_bounds::{BoundCurve, CEILING};
use crate::cvcore::FockMatrix;
use crate::error::{Error, Result};

/// Largest truncation dimension searched.
pub const M_MAX: u32 = 60;
/// Upper end of every `s` search; the noise integrals diverge at `½`.
pub const S_MAX: f64 = 0.49;
pub(crate) const S_MIN: f64 = 1e-12;
pub(crate) const S_GRID: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub enum InputStateSpec {
    Classical { nbar: f64 },
    FiniteNegativity { profile: NegativityProfile },
    Spat { q: f64 },
    Fock { m: u32 },
    SqueezedVacuum { lambda: f64 },
    KnownFock { rho: FockMatrix },
    EnergyOnly { nbar: f64 },
}

impl InputStateSpec {
    /// Mean photon number of the described state.
    pub fn mean_photon_number(&self) -> f64 {
        match self {
            InputStateSpec::Classical { nbar } | InputStateSpec::EnergyOnly { nbar } => *nbar,
            InputStateSpec::FiniteNegativity { profile } => profile.nbar(),
            InputStateSpec::Spat { q } => 1.0 + 2.0 * q,
            InputStateSpec::Fock { m } => *m as f64,
            InputStateSpec::SqueezedVacuum { lambda } => lambda * lambda / (1.0 - lambda * lambda),
            InputStateSpec::KnownFock { rho } => rho.mean_photon_number(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidState(msg));
        match self {
            InputStateSpec::Classical { nbar } | InputStateSpec::EnergyOnly { nbar } if !(*nbar >= 0.0 && nbar.is_finite()) => {
                bad(format!("mean photon number must be finite and non-negative, got {nbar}"))
            }
            InputStateSpec::Spat { q } if !(*q > 0.0 && q.is_finite()) => bad(format!("SPAT q must be positive, got {q}")),
            InputStateSpec::SqueezedVacuum { lambda } if !(*lambda > 0.0 && *lambda < 1.0) => {
                bad(format!("squeezing λ must lie in (0,1), got {lambda}"))
            }
            InputStateSpec::KnownFock { rho } if (rho.trace() - 1.0).abs() > 1e-6 => {
                bad(format!("known Fock state must be normalized, trace is {}", rho.trace()))
            }
            _ => Ok(()),
        }
    }
}

/// Free parameters of the extension. Each is present only when the branch uses it.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExtensionParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<f64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<f64>,
}

impl ExtensionParams {
    /// `s ∈ [0, ½)` (zero only for the noiseless SPAT form), `M ≥ 1`, `κ > 1`.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.s {
            if !(0.0..0.5).contains(&s) {
                return Err(Error::InvalidParams(format!("s must lie in [0, 1/2), got {s}")));
            }
        }
        if self.m == Some(0) {
            return Err(Error::InvalidParams("M must be a positive integer".into()));
        }
        if let Some(k) = self.kappa {
            if !(k > 1.0) {
                return Err(Error::InvalidParams(format!("kappa must exceed 1, got {k}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub branch: String,
    #[serde(rename = "params", skip_serializing_if = "Option::is_none", default)]
    pub chosen_params: Option<ExtensionParams>,
    #[serde(rename = "intermediates")]
    pub intermediate: BTreeMap<String, f64>,
}

/// `μ ε`, with `∞ · 0 = 0` (a vanishing curve beats any prefactor).
pub(crate) fn weighted(mu: f64, curve_value: f64) -> f64 {
    // An overflowed μ carries no information, even against a zero curve value.
    if !mu.is_finite() {
        f64::INFINITY
    } else if curve_value == 0.0 {
        0.0
    } else {
        mu * curve_value
    }
}

/// Coherences between the kept and discarded photon-number blocks; trace norm at most
/// `2√(η(1−η))`, doubled by `Ψ − Φ`.
pub(crate) fn cross_block_term(eta: f64) -> f64 {
    4.0 * (eta * (1.0 - eta)).max(0.0).sqrt()
}

impl BoundReport {
    /// Report for `η min(μ ε + penalty, 2) + 2(1−η) + cross`; every branch except the
    /// two-sided negativity form has this shape.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn truncated(
        branch: &str,
        params: Option<ExtensionParams>,
        eta: f64,
        mu_ub: f64,
        argument: f64,
        curve_value: f64,
        penalty: f64,
        cross: f64,
    ) -> BoundReport {
        let inner = (weighted(mu_ub, curve_value) + penalty).min(CEILING);
        let pre = eta * inner + CEILING * (1.0 - eta) + cross;
        let intermediate = BTreeMap::from([
            ("eta_m".to_string(), eta),
            ("mu_ub".to_string(), mu_ub),
            ("nu_over_mu".to_string(), argument),
            ("curve_value".to_string(), curve_value),
            ("penalty".to_string(), penalty),
            ("cross_term".to_string(), cross),
            ("pre_clamp".to_string(), pre),
        ]);
        BoundReport { value: pre.min(CEILING), branch: branch.to_string(), chosen_params: params, intermediate }
    }

    /// Recomputes `value` from the intermediates alone.
    pub fn recompute(&self) -> f64 {
        let get = |k: &str| self.intermediate.get(k).copied().unwrap_or(f64::NAN);
        let pre = if self.branch == "negativity_pm" {
            let n = get("negativity");
            (1.0 + n) * get("curve_plus") + n * get("curve_minus")
        } else {
            let eta = get("eta_m");
            eta * (weighted(get("mu_ub"), get("curve_value")) + get("penalty")).min(CEILING)
                + CEILING * (1.0 - eta)
                + get("cross_term")
        };
        pre.min(CEILING)
    }

    pub fn is_trivial(&self) -> bool {
        self.value >= CEILING
    }
}

pub(crate) fn require_concave(curve: &BoundCurve) -> Result<()> {
    if curve.concavified {
        Ok(())
    } else {
        Err(Error::NotConcave(format!(
            "the {} curve is not concave in n̄; build a concave hull before extending it to states",
            curve.class
        )))
    }
}

/// Any classical state: `ε(n̄)` by concavity.
pub fn classical_bound(curve: &BoundCurve, nbar: f64) -> Result<BoundReport> {
    require_concave(curve)?;
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidState(format!("mean photon number must be non-negative, got {nbar}")));
    }
    let v = curve.eval(nbar);
    Ok(BoundReport::truncated("classical", None, 1.0, 1.0, nbar, v, 0.0, 0.0))
}

/// `μ ε(ν/μ)`, which for concave non-negative `ε` never decreases in `μ` at fixed `ν`.
/// Any upper bound on `μ` may therefore replace it.
pub fn mu_monotone_envelope(mu_ub: f64, nu: f64, curve: &BoundCurve) -> Result<f64> {
    require_concave(curve)?;
    if !(mu_ub >= 1.0) || !(nu >= 0.0) {
        return Err(Error::InvalidParams(format!("need μ ≥ 1 and ν ≥ 0, got μ={mu_ub}, ν={nu}")));
    }
    Ok(mu_ub * curve.eval(nu / mu_ub))
}

/// Dispatches on the state family.
pub fn extend(curve: &BoundCurve, state: &InputStateSpec) -> Result<BoundReport> {
    state.validate()?;
    match state {
        InputStateSpec::Classical { nbar } => classical_bound(curve, *nbar),
        InputStateSpec::FiniteNegativity { profile } => finite_negativity_bound(curve, profile),
        InputStateSpec::Spat { q } => spat_bound(curve, *q),
        InputStateSpec::Fock { m } => fock_bound(curve, *m),
        InputStateSpec::SqueezedVacuum { lambda } => squeezed_vacuum_bound(curve, *lambda),
        InputStateSpec::KnownFock { rho } => known_fock_bound(curve, rho),
        InputStateSpec::EnergyOnly { nbar } => generic_energy_bound(curve, *nbar),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent_bounds::{displacement_bound, lipschitz_bound, phase_rotation_bound, InDistributionGuarantee};
    use proptest::prelude::*;

    fn g(eps0: f64) -> InDistributionGuarantee {
        InDistributionGuarantee::new(eps0, 1.0).unwrap()
    }

    #[test]
    fn overflowed_mu_is_never_zeroed() {
        assert_eq!(weighted(f64::INFINITY, 0.0), f64::INFINITY);
        assert_eq!(weighted(f64::NAN, 0.3), f64::INFINITY);
        assert_eq!(weighted(1e300, 0.0), 0.0);
        assert_eq!(weighted(3.0, 0.5), 1.5);
        let r = BoundReport::truncated("x", None, 1.0, f64::INFINITY, f64::NAN, 0.0, 0.0, 0.0);
        assert_eq!(r.value, CEILING);
    }

    #[test]
    fn classical_is_the_curve() {
        let c = phase_rotation_bound(g(0.1)).unwrap();
        let r = classical_bound(&c, 0.5).unwrap();
        assert_eq!(r.value, c.eval(0.5));
        assert_eq!(r.recompute(), r.value);
        assert_eq!(classical_bound(&c, 0.0).unwrap().value, 0.0);
        let d = displacement_bound(g(0.07)).unwrap();
        assert_eq!(classical_bound(&d, 123.0).unwrap().value, 0.07);
    }

    #[test]
    fn refuses_non_concave_curves() {
        let c = lipschitz_bound(g(0.1));
        assert!(matches!(classical_bound(&c, 1.0), Err(Error::NotConcave(_))));
        assert!(matches!(fock_bound(&c, 1), Err(Error::NotConcave(_))));
    }

    #[test]
    fn envelope_special_cases() {
        // Linear curve: μ(a + bν/μ) = μa + bν; with a = 0 it is independent of μ.
        let lin = BoundCurve::custom(g(0.1), true, |n| 0.01 * n);
        let a = mu_monotone_envelope(1.0, 3.0, &lin).unwrap();
        let b = mu_monotone_envelope(7.0, 3.0, &lin).unwrap();
        assert!((a - b).abs() < 1e-15);
        let d = displacement_bound(g(0.07)).unwrap();
        assert!(mu_monotone_envelope(3.0, 1.0, &d).unwrap() > mu_monotone_envelope(2.0, 1.0, &d).unwrap());
    }

    #[test]
    fn extension_params_validation() {
        assert!(ExtensionParams { s: Some(0.5), ..Default::default() }.validate().is_err());
        assert!(ExtensionParams { m: Some(0), ..Default::default() }.validate().is_err());
        assert!(ExtensionParams { kappa: Some(1.0), ..Default::default() }.validate().is_err());
        assert!(ExtensionParams { s: Some(0.1), m: Some(3), kappa: Some(2.0) }.validate().is_ok());
    }

    #[test]
    fn report_json_shape() {
        let r = BoundReport::truncated("fock", Some(ExtensionParams { s: Some(0.1), ..Default::default() }), 1.0, 2.0, 0.3, 0.1, 0.2, 0.0);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["params"]["s"], 0.1);
        assert!(v["params"].get("M").is_none());
        assert!(v["intermediates"]["pre_clamp"].is_number());
    }

    proptest! {
        #[test]
        fn envelope_nondecreasing_in_mu(knots in proptest::collection::vec(0.0f64..1.0, 2..8), nu in 0.0f64..20.0) {
            // Random concave piecewise-linear curve: sorted decreasing slopes.
            let mut slopes = knots.clone();
            slopes.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let intercept = 0.05;
            let curve = BoundCurve::custom(g(0.1), true, move |n| {
                let mut v = intercept;
                let mut x = 0.0;
                for &s in &slopes {
                    let step = (n - x).clamp(0.0, 1.0);
                    v += s * step;
                    x += 1.0;
                }
                v + slopes.last().unwrap() * (n - x).max(0.0)
            });
            let mut prev = 0.0;
            for i in 0..200 {
                let mu = 1.0 + 99.0 * i as f64 / 199.0;
                let v = mu_monotone_envelope(mu, nu, &curve).unwrap();
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
