//! Cubic phase gates `V_γ = exp(iγq̂³)`.
//!
//! For coherent input `|α⟩` the overlap `|⟨α|V_β† V_γ|α⟩|` depends only on `Δ = |γ − β|` and
//! `x = Re α`. No closed form exists, so the in-distribution constraint is inverted by
//! bisection on `Δ` and the resulting curve is sampled and concavified.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::hull::certified_concave_majorant;
use super::{uniform_grid, BoundCurve, CurveClass, CurveKind, InDistributionGuarantee, Table, Tail};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};

// e^{-t²/2} < 1e-31 beyond this half-width.
const HALF_WIDTH: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPhaseChannel {
    pub gamma: f64,
}

impl CubicPhaseChannel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidChannel(format!("cubic phase strength must be finite, got {gamma}")));
        }
        Ok(CubicPhaseChannel { gamma })
    }

    /// `|⟨α|V_other† V_self|α⟩|`.
    pub fn output_fidelity(&self, other: &CubicPhaseChannel, alpha: Complex64) -> Result<f64> {
        cubic_fidelity((self.gamma - other.gamma).abs(), alpha.re)
    }

    /// Trace distance between the two pure outputs.
    pub fn output_distance(&self, other: &CubicPhaseChannel, alpha: Complex64) -> Result<f64> {
        Ok(distance_from_fidelity(self.output_fidelity(other, alpha)?))
    }
}

fn distance_from_fidelity(f: f64) -> f64 {
    let f = f.clamp(0.0, 1.0);
    2.0 * ((1.0 - f) * (1.0 + f)).sqrt()
}

/// `F(Δ, x) = |∫ exp(iΔq³ − (q − 2x)²/2) dq| / √(2π)`.
///
/// The window is cut so that the phase advances by at most `π` per piece, which keeps the
/// adaptive rule from having to discover the oscillation on its own.
pub fn cubic_fidelity(delta: f64, x: f64) -> Result<f64> {
    if !delta.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!("cubic fidelity needs finite arguments, got Δ={delta}, x={x}")));
    }
    let delta = delta.abs();
    if delta == 0.0 {
        return Ok(1.0);
    }
    let c = 2.0 * x;
    let mut breaks = Vec::new();
    let mut t = -HALF_WIDTH;
    while t < HALF_WIDTH {
        let m = (t + c).abs().max((t + 1.0 + c).abs()) + 1.0;
        t += (PI / (3.0 * delta * m * m)).min(1.0);
        breaks.push(t);
    }
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_intervals: breaks.len() + 4000 };
    let f = |t: f64| {
        let q = t + c;
        Complex64::from_polar((-0.5 * t * t).exp(), delta * q * q * q)
    };
    let r = integrate_with_breaks(f, -HALF_WIDTH, HALF_WIDTH, &breaks, opts)?;
    Ok((r.value.norm() / (2.0 * PI).sqrt()).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicOptions {
    /// Amplitudes sampled on `[0, τ]` when checking the in-distribution constraint.
    pub x_points: usize,
    /// Upper end of the sampled `n̄` range; `None` means `16 max(τ², 1)`.
    pub nbar_max: Option<f64>,
    pub points: usize,
    pub bisection_steps: usize,
}

impl Default for CubicOptions {
    fn default() -> Self {
        CubicOptions { x_points: 33, nbar_max: None, points: 161, bisection_steps: 60 }
    }
}

struct Worst {
    distance: f64,
    monotone_in_x: bool,
}

fn worst_in_distribution(delta: f64, g: &InDistributionGuarantee, opts: &CubicOptions) -> Result<Worst> {
    let fs = uniform_grid(g.tau, opts.x_points.max(2))
        .par_iter()
        .map(|&x| cubic_fidelity(delta, x))
        .collect::<Result<Vec<f64>>>()?;
    let monotone_in_x = fs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let fmin = fs.iter().copied().fold(1.0, f64::min);
    Ok(Worst { distance: distance_from_fidelity(fmin), monotone_in_x })
}

pub fn cubic_phase_bound(g: InDistributionGuarantee) -> Result<BoundCurve> {
    cubic_phase_bound_with(g, CubicOptions::default())
}

/// Bisects for the critical `Δ_γ` (reported in `notes["delta_gamma"]`), then returns a
/// certified concave majorant of `2√(1 − F(Δ_γ, √n̄)²)`.
///
/// The returned `Δ_γ` is the infeasible end of the final bracket, so every pair meeting the
/// in-distribution guarantee on the sampled amplitudes has `Δ ≤ Δ_γ`. Monotonicity of `F` in
/// `Δ` is checked on the bracket's interior; a violation is an error, not a silent pass.
pub fn cubic_phase_bound_with(g: InDistributionGuarantee, opts: CubicOptions) -> Result<BoundCurve> {
    g.require_below_ceiling()?;
    if opts.points < 3 || opts.bisection_steps == 0 {
        return Err(Error::InvalidParams("cubic phase bound needs at least 3 points and 1 bisection step".into()));
    }
    let exceeds = |d: f64| -> Result<bool> { Ok(worst_in_distribution(d, &g, &opts)?.distance > g.eps0) };

    let mut hi = 1e-3;
    let mut doublings = 0;
    while !exceeds(hi)? {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::InvalidParams(format!(
                "cubic phase bisection did not bracket: distance stays below ε₀={} up to Δ={hi:e}",
                g.eps0
            )));
        }
    }
    let mut lo = if doublings == 0 { 0.0 } else { 0.5 * hi };
    for _ in 0..opts.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if exceeds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    let delta_gamma = hi;

    let probe = worst_in_distribution(delta_gamma, &g, &opts)?;
    for k in 1..8 {
        let d = delta_gamma * k as f64 / 8.0;
        if worst_in_distribution(d, &g, &opts)?.distance > probe.distance + 1e-12 {
            return Err(Error::NotMonotone(format!("cubic phase distance is not increasing in Δ near Δ={d:e}")));
        }
    }

    let nbar_max = opts.nbar_max.unwrap_or(16.0 * g.tau2().max(1.0));
    let raw = uniform_grid(nbar_max, opts.points)
        .par_iter()
        .map(|&n| cubic_fidelity(delta_gamma, n.sqrt()).map(distance_from_fidelity))
        .collect::<Result<Vec<f64>>>()?;
    let sampled = BoundCurve::new(
        CurveClass::CubicPhase,
        g,
        false,
        CurveKind::Table(Table { xs: uniform_grid(nbar_max, opts.points), ys: raw, tail: Tail::Ceiling }),
    );
    let mut out = certified_concave_majorant(&sampled, nbar_max, opts.points)?;
    out.notes.insert("delta_gamma".into(), delta_gamma);
    out.notes.insert("monotone_in_x".into(), if probe.monotone_in_x { 1.0 } else { 0.0 });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: composite trapezoid on a uniform grid, exponentially accurate for
    // smooth rapidly decaying integrands.
    fn trapezoid_fidelity(delta: f64, x: f64) -> f64 {
        let n = 200_000;
        let h = 2.0 * HALF_WIDTH / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let t = -HALF_WIDTH + i as f64 * h;
            let q = t + 2.0 * x;
            acc += Complex64::from_polar((-0.5 * t * t).exp(), delta * q * q * q);
        }
        acc.norm() * h / (2.0 * PI).sqrt()
    }

    #[test]
    fn zero_delta_is_perfect_overlap() {
        assert_eq!(cubic_fidelity(0.0, 3.0).unwrap(), 1.0);
        let c = CubicPhaseChannel::new(0.2).unwrap();
        assert!(c.output_distance(&c, Complex64::new(1.0, 0.5)).unwrap() == 0.0);
    }

    #[test]
    fn decreasing_in_delta_at_origin() {
        let fs: Vec<f64> = [0.01, 0.1, 1.0].iter().map(|&d| cubic_fidelity(d, 0.0).unwrap()).collect();
        assert!(fs[0] < 1.0 && fs[0] > fs[1] && fs[1] > fs[2], "{fs:?}");
        // Small Δ: 1 − F² ≈ Δ² Var(q³) = 15Δ² for q ~ N(0, 1).
        let f = cubic_fidelity(1e-3, 0.0).unwrap();
        assert!(((1.0 - f * f) / 1e-6 - 15.0).abs() < 0.01);
    }

    #[test]
    fn matches_trapezoid_oracle() {
        for (d, x) in [(0.3, 1.0), (0.05, 2.5), (1.0, 0.0), (0.2, -1.5)] {
            let a = cubic_fidelity(d, x).unwrap();
            let b = trapezoid_fidelity(d, x);
            assert!((a - b).abs() < 1e-9, "Δ={d}, x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn independent_of_imaginary_part() {
        let (a, b) = (CubicPhaseChannel::new(0.1).unwrap(), CubicPhaseChannel::new(0.25).unwrap());
        let f1 = a.output_fidelity(&b, Complex64::new(0.7, 0.0)).unwrap();
        let f2 = a.output_fidelity(&b, Complex64::new(0.7, -3.0)).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn bound_dominates_feasible_pairs() {
        let g = InDistributionGuarantee::new(0.1, 1.0).unwrap();
        let opts = CubicOptions { points: 81, ..CubicOptions::default() };
        let curve = cubic_phase_bound_with(g, opts).unwrap();
        let dg = curve.notes["delta_gamma"];
        assert!(dg > 0.0);
        assert_eq!(curve.notes["monotone_in_x"], 1.0);
        // The threshold pair meets the guarantee with equality at r = τ.
        let at_tau = distance_from_fidelity(cubic_fidelity(dg, 1.0).unwrap());
        assert!((at_tau - 0.1).abs() < 1e-6);
        for frac in [0.3, 0.9, 1.0] {
            for r in [0.0, 0.5, 1.0, 1.7, 2.9, 3.9] {
                let d = distance_from_fidelity(cubic_fidelity(frac * dg, r).unwrap());
                assert!(d <= curve.eval(r * r) + 1e-12, "Δ={}, r={r}", frac * dg);
            }
        }
        assert_eq!(curve.eval(1e3), 2.0);
    }

    #[test]
    fn rejects_trivial_guarantee() {
        assert!(cubic_phase_bound(InDistributionGuarantee::new(2.0, 1.0).unwrap()).is_err());
    }
}
