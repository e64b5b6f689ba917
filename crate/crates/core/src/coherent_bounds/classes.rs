//! Closed-form curves for the step, Lipschitz and Gaussian channel classes.
//!
//! With `a = 1 − ε₀/2`, every Gaussian-class curve has the form `2√(1 − a^{e(n̄)})` (or a
//! close variant); it is evaluated as `2√(−expm1(e · ln a))` to keep precision at small ε₀.

use super::{BoundCurve, CurveClass, CurveKind, InDistributionGuarantee, CEILING};
use crate::error::Result;
use crate::specfun::lambert_w0_of_exp;

fn ln_a(g: &InDistributionGuarantee) -> f64 {
    (-0.5 * g.eps0).ln_1p()
}

fn two_sqrt_one_minus_exp(ln_f2: f64) -> f64 {
    2.0 * (-ln_f2.min(0.0).exp_m1()).max(0.0).sqrt()
}

pub(crate) fn step_value(g: &InDistributionGuarantee, n: f64) -> f64 {
    if n <= g.tau2() {
        g.eps0
    } else {
        CEILING
    }
}

pub(crate) fn lipschitz_value(g: &InDistributionGuarantee, n: f64) -> f64 {
    if n <= g.tau2() {
        return g.eps0;
    }
    let d = n.sqrt() - g.tau;
    (g.eps0 + 4.0 * (-(-d * d).exp_m1()).sqrt()).min(CEILING)
}

pub(crate) fn gaussian_value(g: &InDistributionGuarantee, n: f64) -> f64 {
    let e = 2.0 * n / g.tau2() + n.sqrt() / g.tau + 2.0;
    two_sqrt_one_minus_exp(e * ln_a(g))
}

pub(crate) fn phase_rotation_value(g: &InDistributionGuarantee, n: f64) -> f64 {
    two_sqrt_one_minus_exp(n / g.tau2() * ln_a(g))
}

pub(crate) fn symmetric_value(g: &InDistributionGuarantee, n: f64) -> f64 {
    two_sqrt_one_minus_exp(2.0 * (n / g.tau2() + 1.0) * ln_a(g))
}

/// `W₀(e^{2τ²} τ² (2 − ε₀))`.
pub fn squeezing_w(g: &InDistributionGuarantee) -> Result<f64> {
    g.require_below_ceiling()?;
    let t2 = g.tau2();
    lambert_w0_of_exp(2.0 * t2 + (t2 * (2.0 - g.eps0)).ln())
}

pub(crate) fn squeezing_value(g: &InDistributionGuarantee, w: f64, n: f64) -> f64 {
    let t2 = g.tau2();
    let y = w / (2.0 * t2);
    two_sqrt_one_minus_exp(y.ln() + 2.0 * n * (y - 1.0))
}

/// `ε₀` inside the trusted disc, `2` outside.
pub fn step_bound(g: InDistributionGuarantee) -> BoundCurve {
    BoundCurve::new(CurveClass::Step, g, false, CurveKind::Step)
}

/// `ε₀ + 4√(1 − e^{−(r−τ)²})` outside the trusted disc: the in-distribution error plus twice
/// the input distance from the coherent state of amplitude `τ` in the same direction.
pub fn lipschitz_bound(g: InDistributionGuarantee) -> BoundCurve {
    BoundCurve::new(CurveClass::Lipschitz, g, false, CurveKind::Lipschitz)
}

/// Any pair of single-mode Gaussian channels.
pub fn gaussian_bound(g: InDistributionGuarantee) -> Result<BoundCurve> {
    g.require_below_ceiling()?;
    Ok(BoundCurve::new(CurveClass::Gaussian, g, true, CurveKind::Gaussian))
}

pub fn phase_rotation_bound(g: InDistributionGuarantee) -> Result<BoundCurve> {
    g.require_below_ceiling()?;
    Ok(BoundCurve::new(CurveClass::PhaseRotation, g, true, CurveKind::PhaseRotation))
}

pub fn squeezing_bound(g: InDistributionGuarantee) -> Result<BoundCurve> {
    let w = squeezing_w(&g)?;
    let mut c = BoundCurve::new(CurveClass::Squeezing, g, true, CurveKind::Squeezing { w });
    c.notes.insert("lambert_w".into(), w);
    Ok(c)
}

pub fn displacement_bound(g: InDistributionGuarantee) -> Result<BoundCurve> {
    g.require_below_ceiling()?;
    Ok(BoundCurve::new(CurveClass::Displacement, g, true, CurveKind::Displacement))
}

/// Rotationally symmetric Gaussian channel pairs.
pub fn symmetric_gaussian_bound(g: InDistributionGuarantee) -> Result<BoundCurve> {
    g.require_below_ceiling()?;
    Ok(BoundCurve::new(CurveClass::Symmetric, g, true, CurveKind::Symmetric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvcore::{trace_distance, FockMatrix};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn g(eps0: f64, tau: f64) -> InDistributionGuarantee {
        InDistributionGuarantee::new(eps0, tau).unwrap()
    }

    #[test]
    fn step_values() {
        let c = step_bound(g(0.3, 1.0));
        assert_eq!(c.eval(0.5), 0.3);
        assert_eq!(c.eval(4.0), 2.0);
        assert_eq!(step_bound(g(1e-12, 1.0)).eval(0.9), 1e-12);
    }

    #[test]
    fn lipschitz_values_and_coherent_distance() {
        let c = lipschitz_bound(g(0.1, 1.0));
        assert_eq!(c.eval(1.0), 0.1);
        assert_eq!(c.eval(1e4), 2.0);
        let want = 0.1 + 4.0 * (1.0 - (-0.25f64).exp()).sqrt();
        assert!((c.eval(2.25) - want).abs() < 1e-15);
        // 2√(1 − e^{−(r−τ)²}) is the trace distance between |r⟩ and |τ⟩.
        let d = trace_distance(&FockMatrix::coherent(Complex64::new(1.5, 0.0), 40), &FockMatrix::coherent(Complex64::new(1.0, 0.0), 40))
            .unwrap();
        assert!((0.1 + 2.0 * d - want).abs() < 1e-10);
    }

    #[test]
    fn gaussian_values() {
        let c = gaussian_bound(g(0.3, 1.0)).unwrap();
        assert!((c.eval(1.0) - 2.0 * (1.0 - 0.85f64.powi(5)).sqrt()).abs() < 1e-14);
        assert!((c.eval(0.0) - 2.0 * (1.0 - 0.85f64.powi(2)).sqrt()).abs() < 1e-14);
        assert!(c.eval(20.0) < 2.0);
        assert!(gaussian_bound(g(2.0, 1.0)).is_err());
    }

    #[test]
    fn phase_rotation_values() {
        let c = phase_rotation_bound(g(0.1, 1.0)).unwrap();
        assert_eq!(c.eval(0.0), 0.0);
        assert!((c.eval(1.0) - 2.0 * 0.05f64.sqrt()).abs() < 1e-14);
    }

    // Independent oracle: bisection for W on y e^{2τ² y} = (1 − ε₀/2) e^{2τ²}, y = W/(2τ²).
    fn squeezing_oracle(eps0: f64, tau: f64, n: f64) -> f64 {
        let t2 = tau * tau;
        let target = (1.0 - eps0 / 2.0) * (2.0 * t2).exp();
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let y: f64 = 0.5 * (lo + hi);
            if y * (2.0 * t2 * y).exp() < target {
                lo = y;
            } else {
                hi = y;
            }
        }
        let y = 0.5 * (lo + hi);
        2.0 * (1.0 - y * (2.0 * n * (y - 1.0)).exp()).sqrt()
    }

    #[test]
    fn squeezing_values() {
        for (eps0, tau, n) in [(0.3, 1.0, 0.0), (0.3, 1.0, 3.0), (0.05, 2.0, 10.0), (1.0, 0.5, 0.2)] {
            let c = squeezing_bound(g(eps0, tau)).unwrap();
            assert!((c.eval(n) - squeezing_oracle(eps0, tau, n)).abs() < 1e-9, "{eps0} {tau} {n}");
        }
        // Large τ: e^{2τ²} overflows, the log-argument Lambert W does not.
        let c = squeezing_bound(g(0.1, 30.0)).unwrap();
        assert!(c.eval(100.0).is_finite());
        let tiny = squeezing_bound(g(1e-14, 1.0)).unwrap();
        assert!(tiny.eval(4.0) < 1e-5);
    }

    #[test]
    fn symmetric_vs_gaussian() {
        let (s, ga) = (symmetric_gaussian_bound(g(0.2, 1.3)).unwrap(), gaussian_bound(g(0.2, 1.3)).unwrap());
        assert!((s.eval(0.0) - ga.eval(0.0)).abs() < 1e-15);
        for i in 0..200 {
            let n = 0.1 * i as f64;
            assert!(s.eval(n) <= ga.eval(n) + 1e-15);
        }
    }

    #[test]
    fn displacement_is_constant() {
        let c = displacement_bound(g(0.07, 1.0)).unwrap();
        for n in [0.0, 1.0, 1e3] {
            assert_eq!(c.eval(n), 0.07);
        }
    }

    fn midpoint_gap(c: &BoundCurve, a: f64, b: f64) -> f64 {
        0.5 * (c.eval(a) + c.eval(b)) - c.eval(0.5 * (a + b))
    }

    proptest! {
        #[test]
        fn concave_classes_are_midpoint_concave(eps0 in 1e-6f64..1.99, tau in 0.2f64..3.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let gg = g(eps0, tau);
            let top = 100.0 * gg.tau2();
            for c in [gaussian_bound(gg).unwrap(), phase_rotation_bound(gg).unwrap(), squeezing_bound(gg).unwrap(), symmetric_gaussian_bound(gg).unwrap()] {
                prop_assert!(midpoint_gap(&c, a * top, b * top) <= 1e-10, "{:?}", c.class);
            }
        }

        #[test]
        fn monotone_in_eps0(e1 in 1e-6f64..1.99, e2 in 1e-6f64..1.99, tau in 0.2f64..3.0, n in 0.0f64..50.0) {
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            for class in [CurveClass::Step, CurveClass::Lipschitz, CurveClass::Gaussian, CurveClass::PhaseRotation, CurveClass::Squeezing, CurveClass::Displacement, CurveClass::Symmetric] {
                let a = class.build(g(lo, tau)).unwrap().eval(n);
                let b = class.build(g(hi, tau)).unwrap().eval(n);
                prop_assert!(a <= b + 1e-14, "{class}: {a} > {b}");
            }
        }

        #[test]
        fn nondecreasing_in_nbar(eps0 in 1e-6f64..1.99, tau in 0.2f64..3.0, n in 0.0f64..50.0, dn in 0.0f64..5.0) {
            for class in [CurveClass::Step, CurveClass::Lipschitz, CurveClass::Gaussian, CurveClass::PhaseRotation, CurveClass::Squeezing, CurveClass::Displacement, CurveClass::Symmetric] {
                let c = class.build(g(eps0, tau)).unwrap();
                prop_assert!(c.eval(n) <= c.eval(n + dn) + 1e-14);
            }
        }
    }
}
