//! Named collections of checks, each producing a [`VerificationReport`].

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::numerics::{delta_s_exact, gamma_quadrature, mu_nu_numeric};
use super::pairs::{curve_label, dominance_suite, log_grid, matching_curves, random_pair_suite, relaxed_witness_pair, worst_case_pair, PairClass};
use super::{Check, Status, VerificationReport, VIOLATION_TOL};
use crate::coherent_bounds::{
    phase_rotation_bound, symmetric_gaussian_bound, uniform_grid, BoundCurve, CurveClass, InDistributionGuarantee,
};
use crate::cvcore::{apply_loss, apply_phase_rotation, gamma_overlap, trace_distance, FockLabel, FockMatrix};
use crate::error::Result;
use crate::state_bounds::{extend, generic_energy_bound, known_fock_bound, mu_monotone_envelope, spat_profile, InputStateSpec};

/// Grid of dominance inputs: 60 log-spaced `n̄` on `[10⁻³, 100]`, 8 phases.
fn default_grids() -> (Vec<f64>, Vec<f64>) {
    (log_grid(1e-3, 100.0, 60), (0..8).map(|k| k as f64 * PI / 4.0).collect())
}

/// Every curve in `curves` against the saturating pair of `class` on the default grid and on
/// `samples` random pairs, plus exactness of the saturation and, where the class curve is
/// tight, equality with its witness pair.
pub fn dominance_report(
    class: PairClass,
    g: InDistributionGuarantee,
    curves: &[BoundCurve],
    seed: u64,
    samples: usize,
) -> Result<VerificationReport> {
    let (nbar, phi) = default_grids();
    let pair = worst_case_pair(class, g)?;
    let mut out = Vec::new();

    let mut sat = Check::new(format!("saturation/{class}"), 1e-10);
    // Unreachable guarantees (gap at its maximum) only need D(τ) ≤ ε₀.
    let reachable = !(class == PairClass::PhaseRotation && pair.gap == PI) && !(class == PairClass::Loss && pair.gap == 1.0);
    if reachable {
        sat.observe((pair.achieved_eps0 - g.eps0).abs(), 0.0, &[("achieved_eps0", pair.achieved_eps0), ("gap", pair.gap)]);
    } else {
        sat.observe(pair.achieved_eps0, g.eps0, &[("achieved_eps0", pair.achieved_eps0), ("gap", pair.gap)]);
    }
    out.push(sat.finish());

    for curve in curves {
        out.push(dominance_suite(curve, &pair, &nbar, &phi));
    }
    out.extend(random_pair_suite(class, curves, g, seed, samples)?);

    if class != PairClass::Loss {
        let witness = relaxed_witness_pair(class, g)?;
        let own = matching_curves(class, g)?.remove(0);
        let mut c = Check::new(format!("tightness/{class}"), 1e-10);
        for &n in &nbar {
            let d = witness.distance(n, 0.3)?;
            let b = own.eval(n);
            c.observe((d - b).abs(), 0.0, &[("nbar", n), ("distance", d), ("bound", b)]);
        }
        out.push(c.finish());
    }
    Ok(VerificationReport::new(&format!("dominance/{class}"), Some(seed), out))
}

/// The universal curve against saturating phase-rotation and displacement pairs, on a short
/// grid since each evaluation is an optimization.
pub fn universal_dominance_report(g: InDistributionGuarantee) -> Result<VerificationReport> {
    let curve = CurveClass::Universal.build(g)?;
    let nbar = log_grid(1e-3, 1.0, 10);
    let phi = [0.0, PI / 2.0];
    let mut out = Vec::new();
    for class in [PairClass::PhaseRotation, PairClass::Displacement] {
        out.push(dominance_suite(&curve, &worst_case_pair(class, g)?, &nbar, &phi));
    }
    Ok(VerificationReport::new("dominance/universal", None, out))
}

fn labels(max_m: u32) -> Vec<FockLabel> {
    (0..=max_m)
        .flat_map(|m| (0..=m).map(move |n| FockLabel::new(m, n, 0.37 * (m + 2 * n) as f64)))
        .collect()
}

/// Closed-form `γ_s` against quadrature, relative error `1e-6`, for all labels with `m ≤ max_m`.
pub fn gamma_closed_form_suite(max_m: u32, s_values: &[f64]) -> Result<VerificationReport> {
    let ls = labels(max_m);
    let mut cases: Vec<(FockLabel, FockLabel, f64)> = Vec::new();
    for &s in s_values {
        for &a in &ls {
            cases.extend(ls.iter().filter(|b| b.delta() == a.delta()).map(|&b| (a, b, s)));
        }
    }
    let results: Vec<Result<(f64, f64)>> =
        cases.par_iter().map(|&(a, b, s)| Ok((gamma_overlap(a, b, s)?, gamma_quadrature(a, b, s)?))).collect();
    let mut c = Check::new("gamma_relative_error", 1e-6);
    for (&(a, b, s), r) in cases.iter().zip(results) {
        let (closed, quad) = r?;
        let rel = (closed - quad).abs() / closed.abs().max(1e-12);
        c.observe(rel, 0.0, &[("m1", a.m as f64), ("n1", a.n as f64), ("m2", b.m as f64), ("n2", b.n as f64), ("s", s)]);
    }
    Ok(VerificationReport::new("gamma-closed-form", None, vec![c.finish()]))
}

/// Quadrature of `∫|P_s|` and `∫|α|²|P_s|` never exceeds the closed-form `μ` and `ν`.
pub fn mu_nu_suite(max_m: u32, s_values: &[f64]) -> Result<VerificationReport> {
    let cases: Vec<(u32, u32, f64)> =
        s_values.iter().flat_map(|&s| (0..=max_m).flat_map(move |m| (0..=m).map(move |n| (m, n, s)))).collect();
    let results: Vec<Result<_>> = cases.par_iter().map(|&(m, n, s)| mu_nu_numeric(m, n, s)).collect();
    let mut mu = Check::new("mu_dominates_quadrature", 1e-9);
    let mut nu = Check::new("nu_dominates_quadrature", 1e-9);
    for (&(m, n, s), r) in cases.iter().zip(results) {
        let v = r?;
        let pt = [("m", m as f64), ("n", n as f64), ("s", s)];
        // Relative comparison: μ grows like s^{−m}.
        mu.observe(v.mu_numeric / v.mu_bound, 1.0, &pt);
        nu.observe(v.nu_numeric / v.nu_bound, 1.0, &pt);
    }
    Ok(VerificationReport::new("mu-nu", None, vec![mu.finish(), nu.finish()]))
}

/// `‖|m⟩⟨m| − C_s(|m⟩⟨m|)‖₁ ≤ 2√(s(1+2m))`, with a truncation check.
pub fn delta_s_suite(max_m: u32, s_values: &[f64], dim: usize) -> Result<VerificationReport> {
    let mut bound = Check::new("delta_s_bound", VIOLATION_TOL);
    let mut trunc = Check::new("truncation_deficit", 1e-8);
    for m in 0..=max_m {
        for &s in s_values {
            let d = delta_s_exact(m, s, dim)?;
            let pt = [("m", m as f64), ("s", s), ("distance", d.distance), ("bound", d.bound)];
            bound.observe(d.distance, d.bound, &pt);
            trunc.observe(d.trace_deficit, 0.0, &pt);
        }
    }
    Ok(VerificationReport::new("delta-s", None, vec![bound.finish(), trunc.finish()]))
}

/// Sampling plan for [`concavity_and_limit_suite`]. `eps0` must be decreasing.
#[derive(Debug, Clone)]
pub struct LimitGrids {
    pub nbar: Vec<f64>,
    pub eps0: Vec<f64>,
    pub tau: f64,
    /// The curve at the smallest `ε₀` must be below this on the whole grid.
    pub limit_tol: f64,
}

impl Default for LimitGrids {
    fn default() -> Self {
        LimitGrids { nbar: uniform_grid(100.0, 201), eps0: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6], tau: 1.0, limit_tol: 0.05 }
    }
}

/// Midpoint concavity (when the curve claims it), monotonicity in `ε₀`, and convergence to 0
/// as `ε₀ → 0`. Step and Lipschitz curves stay large outside the trusted disc; that failure
/// is reported as a documented exception.
pub fn concavity_and_limit_suite(class: CurveClass, grids: &LimitGrids) -> Result<VerificationReport> {
    let curves = grids
        .eps0
        .iter()
        .map(|&e| class.build(InDistributionGuarantee::new(e, grids.tau)?))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Vec<f64>> = curves.iter().map(|c| grids.nbar.par_iter().map(|&n| c.eval(n)).collect()).collect();
    let mut out = Vec::new();

    if curves[0].concavified {
        let mut c = Check::new(format!("concavity/{class}"), 1e-10);
        for (curve, ys) in curves.iter().zip(&values) {
            midpoint_concavity(&mut c, curve, &grids.nbar, ys);
        }
        out.push(c.finish());
    }

    let mut mono = Check::new(format!("monotone_in_eps0/{class}"), 1e-12);
    for w in 0..values.len().saturating_sub(1) {
        for (i, &n) in grids.nbar.iter().enumerate() {
            mono.observe(values[w + 1][i], values[w][i], &[("nbar", n), ("eps0", grids.eps0[w + 1])]);
        }
    }
    out.push(mono.finish());

    let t2 = grids.tau * grids.tau;
    let last = values.last().expect("at least one ε₀");
    let mut inside = Check::new(format!("limit_inside/{class}"), 0.0);
    let mut outside = Check::new(format!("limit_outside/{class}"), 0.0);
    for (i, &n) in grids.nbar.iter().enumerate() {
        let c = if n <= t2 { &mut inside } else { &mut outside };
        c.observe(last[i], grids.limit_tol, &[("nbar", n), ("value", last[i])]);
    }
    // A majorant sampled on a fixed range ends in a ceiling knot; its hull keeps a chord
    // floor that no ε₀ removes. The universal curve converges, but far below ε₀ = 1e-8.
    let slow_limit = match class {
        CurveClass::CubicPhase => Some("certified on a fixed sampled range; the hull through the ceiling knot has a floor"),
        CurveClass::Universal => Some("converges too slowly in eps0 to reach the tolerance on this grid"),
        _ => None,
    };
    match slow_limit {
        Some(why) => out.push(inside.note(why).finish_with(Status::DocumentedException)),
        None => out.push(inside.finish()),
    }
    if let Some(why) = slow_limit.filter(|_| grids.nbar.iter().any(|&n| n > t2)) {
        out.push(outside.note(why).finish_with(Status::DocumentedException));
        return Ok(VerificationReport::new(&format!("concavity/{class}"), None, out));
    }
    let exception = matches!(class, CurveClass::Step | CurveClass::Lipschitz);
    if exception {
        out.push(
            outside
                .note("outside the trusted disc this curve does not shrink with eps0")
                .finish_with(Status::DocumentedException),
        );
    } else if grids.nbar.iter().any(|&n| n > t2) {
        out.push(outside.finish());
    }
    Ok(VerificationReport::new(&format!("concavity/{class}"), None, out))
}

fn midpoint_concavity(c: &mut Check, curve: &BoundCurve, xs: &[f64], ys: &[f64]) {
    let e = curve.guarantee.eps0;
    for i in 0..xs.len() {
        for k in [1usize, 2, 5, 10, 25, 50] {
            let j = i + 2 * k;
            if j >= xs.len() {
                continue;
            }
            let mid = 0.5 * (xs[i] + xs[j]);
            c.observe(0.5 * (ys[i] + ys[j]), curve.eval(mid), &[("eps0", e), ("lo", xs[i]), ("hi", xs[j])]);
        }
    }
}

/// Midpoint concavity and envelope monotonicity of a single curve that claims concavity;
/// a curve that makes no claim yields an empty report.
pub fn curve_structure_report(curve: &BoundCurve, nbar: &[f64]) -> Result<VerificationReport> {
    if !curve.concavified {
        return Ok(VerificationReport::new("structure", None, Vec::new()));
    }
    let ys: Vec<f64> = nbar.iter().map(|&n| curve.eval(n)).collect();
    let mut c = Check::new(format!("concavity/{}", curve_label(curve)), 1e-10);
    midpoint_concavity(&mut c, curve, nbar, &ys);
    let mut out = vec![c.finish()];
    out.extend(envelope_monotonicity_suite(curve, &[0.0, 0.5, 2.0, 10.0])?.assertions);
    Ok(VerificationReport::new("structure", None, out))
}

/// `μ ↦ μ ε(ν/μ)` is nondecreasing for a concave curve, on a grid of `μ ∈ [1, 10⁶]`.
pub fn envelope_monotonicity_suite(curve: &BoundCurve, nu_grid: &[f64]) -> Result<VerificationReport> {
    let mus = log_grid(1.0, 1e6, 80);
    let mut c = Check::new(format!("envelope_monotone/{}", curve_label(curve)), 1e-12);
    for &nu in nu_grid {
        let mut prev = mu_monotone_envelope(mus[0], nu, curve)?;
        for w in mus.windows(2) {
            let v = mu_monotone_envelope(w[1], nu, curve)?;
            c.observe(prev - v, 1e-12 * v.abs(), &[("nu", nu), ("mu", w[1])]);
            prev = v;
        }
    }
    Ok(VerificationReport::new("envelope", None, vec![c.finish()]))
}

const SOUNDNESS_DIM: usize = 40;
// SPAT tails decay like (q/(1+q))^k; at q = 2 dimension 40 loses 2e-6 of trace.
const SPAT_DIM: usize = 64;

fn soundness_states() -> Result<Vec<(String, FockMatrix, InputStateSpec)>> {
    let mut v = Vec::new();
    for m in 0..=4u32 {
        v.push((format!("fock{m}"), FockMatrix::fock(m as usize, SOUNDNESS_DIM)?, InputStateSpec::Fock { m }));
    }
    for lambda in [0.2, 0.5] {
        v.push((format!("squeezed{lambda}"), FockMatrix::squeezed_vacuum(lambda, SOUNDNESS_DIM)?, InputStateSpec::SqueezedVacuum { lambda }));
    }
    for q in [0.5, 1.0, 2.0] {
        let rho = FockMatrix::spat(q, SPAT_DIM)?;
        v.push((format!("spat{q}"), rho.clone(), InputStateSpec::Spat { q }));
        v.push((format!("spat{q}_profile"), rho, InputStateSpec::FiniteNegativity { profile: spat_profile(q, 0.0)? }));
    }
    let a = FockMatrix::coherent(Complex64::new(0.5, 0.0), SOUNDNESS_DIM);
    let b = FockMatrix::coherent(Complex64::new(0.0, 1.2), SOUNDNESS_DIM);
    let mix = FockMatrix::mixture(&[(0.5, a), (0.5, b)])?;
    let nbar = 0.5 * (0.25 + 1.44);
    v.push(("coherent_mixture".into(), mix, InputStateSpec::Classical { nbar }));
    let mut psi = nalgebra::DVector::zeros(SOUNDNESS_DIM);
    psi[0] = Complex64::new(0.5f64.sqrt(), 0.0);
    psi[3] = Complex64::new(0.0, 0.5f64.sqrt());
    let sup = FockMatrix::from_pure(&psi)?;
    v.push(("superposition03".into(), sup.clone(), InputStateSpec::KnownFock { rho: sup }));
    Ok(v)
}

/// Exact output distances of phase-rotation and loss pairs on Fock-basis states never exceed
/// the extended bounds: the family bound, the energy-only bound, and the known-state bound.
pub fn state_soundness_suite(g: InDistributionGuarantee) -> Result<VerificationReport> {
    let states = soundness_states()?;
    let pr = phase_rotation_bound(g)?;
    let sym = symmetric_gaussian_bound(g)?;
    let rotations = [worst_case_pair(PairClass::PhaseRotation, g)?.gap, relaxed_witness_pair(PairClass::PhaseRotation, g)?.gap];
    let eta = 1.0 - worst_case_pair(PairClass::Loss, g)?.gap;

    let rows: Vec<Result<Vec<(String, &'static str, f64, f64, f64)>>> = states
        .par_iter()
        .map(|(name, rho, spec)| {
            let mut rows = Vec::new();
            let pr_bounds = [
                ("family", extend(&pr, spec)?.value),
                ("energy_only", generic_energy_bound(&pr, spec.mean_photon_number())?.value),
                ("known_state", known_fock_bound(&pr, rho)?.value),
            ];
            for &theta in &rotations {
                let d = trace_distance(&apply_phase_rotation(rho, theta), rho)?;
                for (kind, b) in pr_bounds {
                    rows.push((format!("{name}/rotation"), kind, theta, d, b));
                }
            }
            let d = trace_distance(&apply_loss(rho, eta)?, rho)?;
            rows.push((format!("{name}/loss"), "family", 1.0 - eta, d, extend(&sym, spec)?.value));
            rows.push((format!("{name}/loss"), "known_state", 1.0 - eta, d, known_fock_bound(&sym, rho)?.value));
            Ok(rows)
        })
        .collect();

    let mut checks: Vec<Check> = ["family", "energy_only", "known_state"]
        .iter()
        .map(|k| Check::new(format!("state_soundness/{k}"), VIOLATION_TOL))
        .collect();
    for (i, r) in rows.into_iter().enumerate() {
        for (_, kind, gap, d, b) in r? {
            let idx = ["family", "energy_only", "known_state"].iter().position(|k| *k == kind).expect("known kind");
            checks[idx].observe(d, b, &[("state", i as f64), ("gap", gap), ("distance", d), ("bound", b)]);
        }
    }
    let names: Vec<String> = states.iter().enumerate().map(|(i, s)| format!("{i}={}", s.0)).collect();
    let assertions = checks.into_iter().map(|c| c.note(format!("states: {}", names.join(", "))).finish()).collect();
    Ok(VerificationReport::new("state-soundness", None, assertions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(eps0: f64) -> InDistributionGuarantee {
        InDistributionGuarantee::new(eps0, 1.0).unwrap()
    }

    #[test]
    fn dominance_reports_pass() {
        for class in PairClass::ALL {
            let r = dominance_report(class, g(1e-2), &matching_curves(class, g(1e-2)).unwrap(), 3, 100).unwrap();
            assert!(r.passed(), "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn closed_form_suites_pass() {
        assert!(gamma_closed_form_suite(3, &[0.1, 0.3]).unwrap().passed());
        assert!(mu_nu_suite(4, &[0.05, 0.3]).unwrap().passed());
        assert!(delta_s_suite(4, &[1e-3, 0.1], 64).unwrap().passed());
    }

    #[test]
    fn structural_suites() {
        let grids = LimitGrids { nbar: uniform_grid(100.0, 101), ..Default::default() };
        for class in [CurveClass::PhaseRotation, CurveClass::Gaussian, CurveClass::Squeezing, CurveClass::Symmetric, CurveClass::Displacement] {
            let r = concavity_and_limit_suite(class, &grids).unwrap();
            assert!(r.passed(), "{}", serde_json::to_string_pretty(&r).unwrap());
        }
        let step = concavity_and_limit_suite(CurveClass::Step, &grids).unwrap();
        assert!(step.passed());
        assert!(step.assertions.iter().any(|a| a.status == Status::DocumentedException));
        let pr = phase_rotation_bound(g(1e-3)).unwrap();
        assert!(envelope_monotonicity_suite(&pr, &[0.0, 0.5, 10.0]).unwrap().passed());
    }

    #[test]
    fn extended_bounds_are_sound() {
        for eps0 in [1e-2, 1e-4] {
            let r = state_soundness_suite(g(eps0)).unwrap();
            assert!(r.passed(), "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }
}
