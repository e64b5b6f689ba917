//! Bounds `ε(ε₀, n̄)` on the output trace distance between a target and a learned channel
//! for every coherent input of mean photon number `n̄ = r²`, given that the distance is at
//! most `ε₀` for all coherent inputs with `r ≤ τ`.

mod classes;
mod cubic;
mod hull;
mod universal;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use classes::{
    displacement_bound, gaussian_bound, lipschitz_bound, phase_rotation_bound, squeezing_bound, squeezing_w, step_bound,
    symmetric_gaussian_bound,
};
pub use cubic::{cubic_fidelity, cubic_phase_bound, cubic_phase_bound_with, CubicOptions, CubicPhaseChannel};
pub use hull::{certified_concave_majorant, concave_hull, upper_hull_indices};
pub use universal::{universal_coherent_bound, universal_objective, xi_diag, xi_offdiag, UniversalEval};

use crate::error::{Error, Result};

/// Trace-distance ceiling in the `[0, 2]` convention.
pub const CEILING: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InDistributionGuarantee {
    pub eps0: f64,
    pub tau: f64,
}

impl InDistributionGuarantee {
    pub fn new(eps0: f64, tau: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 <= CEILING) {
            return Err(Error::InvalidGuarantee(format!("eps0 must lie in (0, 2], got {eps0}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidGuarantee(format!("tau must be positive and finite, got {tau}")));
        }
        Ok(InDistributionGuarantee { eps0, tau })
    }

    pub fn tau2(&self) -> f64 {
        self.tau * self.tau
    }

    pub(crate) fn require_below_ceiling(&self) -> Result<()> {
        if self.eps0 < CEILING {
            Ok(())
        } else {
            Err(Error::InvalidGuarantee("this bound needs eps0 < 2".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveClass {
    Step,
    Lipschitz,
    Gaussian,
    PhaseRotation,
    Squeezing,
    Displacement,
    Symmetric,
    CubicPhase,
    Universal,
    Custom,
}

impl CurveClass {
    pub const ALL: [CurveClass; 9] = [
        CurveClass::Step,
        CurveClass::Lipschitz,
        CurveClass::Gaussian,
        CurveClass::PhaseRotation,
        CurveClass::Squeezing,
        CurveClass::Displacement,
        CurveClass::Symmetric,
        CurveClass::CubicPhase,
        CurveClass::Universal,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            CurveClass::Step => "step",
            CurveClass::Lipschitz => "lipschitz",
            CurveClass::Gaussian => "gaussian",
            CurveClass::PhaseRotation => "phase_rotation",
            CurveClass::Squeezing => "squeezing",
            CurveClass::Displacement => "displacement",
            CurveClass::Symmetric => "symmetric",
            CurveClass::CubicPhase => "cubic_phase",
            CurveClass::Universal => "universal",
            CurveClass::Custom => "custom",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        let t = tag.trim().to_ascii_lowercase().replace('-', "_");
        let t = if t == "symmetric_gaussian" { "symmetric".to_string() } else { t };
        Self::ALL.iter().copied().chain(std::iter::once(CurveClass::Custom)).find(|c| c.tag() == t)
    }

    /// Builds the named curve. Cubic phase uses default grid options.
    pub fn build(self, g: InDistributionGuarantee) -> Result<BoundCurve> {
        match self {
            CurveClass::Step => Ok(step_bound(g)),
            CurveClass::Lipschitz => Ok(lipschitz_bound(g)),
            CurveClass::Gaussian => gaussian_bound(g),
            CurveClass::PhaseRotation => phase_rotation_bound(g),
            CurveClass::Squeezing => squeezing_bound(g),
            CurveClass::Displacement => displacement_bound(g),
            CurveClass::Symmetric => symmetric_gaussian_bound(g),
            CurveClass::CubicPhase => cubic_phase_bound(g),
            CurveClass::Universal => Ok(BoundCurve::new(CurveClass::Universal, g, false, CurveKind::Universal)),
            CurveClass::Custom => Err(Error::Unsupported("custom curves are built from a function or a table".into())),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Piecewise-linear curve on sorted knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub tail: Tail,
}

/// Behavior right of the last knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Continue the final segment, clamped to `[0, 2]`.
    ExtendFinalSegment,
    /// Jump to the ceiling.
    Ceiling,
}

impl Table {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        let last = n - 1;
        if x >= self.xs[last] {
            if x == self.xs[last] {
                return self.ys[last];
            }
            return match self.tail {
                Tail::Ceiling => CEILING,
                Tail::ExtendFinalSegment if n >= 2 => {
                    let slope = (self.ys[last] - self.ys[last - 1]) / (self.xs[last] - self.xs[last - 1]);
                    self.ys[last] + slope * (x - self.xs[last])
                }
                Tail::ExtendFinalSegment => self.ys[last],
            };
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }
}

type CurveFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub(crate) enum CurveKind {
    Step,
    Lipschitz,
    Gaussian,
    PhaseRotation,
    Squeezing { w: f64 },
    Displacement,
    Symmetric,
    Universal,
    Table(Table),
    Func(CurveFn),
    MinWithStep(Box<BoundCurve>),
}

/// An evaluable bound curve in the variable `n̄ = r²`, with values in `[0, 2]`.
#[derive(Clone)]
pub struct BoundCurve {
    pub class: CurveClass,
    pub guarantee: InDistributionGuarantee,
    pub concavified: bool,
    /// Construction-time scalars worth reporting (for instance the cubic phase `Δ_γ`).
    pub notes: BTreeMap<String, f64>,
    pub(crate) kind: CurveKind,
}

impl fmt::Debug for BoundCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundCurve")
            .field("class", &self.class)
            .field("guarantee", &self.guarantee)
            .field("concavified", &self.concavified)
            .field("notes", &self.notes)
            .finish_non_exhaustive()
    }
}

/// JSON form of a sampled curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub class_tag: String,
    pub eps0: f64,
    pub tau: f64,
    pub grid: Vec<[f64; 2]>,
    pub concavified: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub optimized_s: Option<Vec<Option<f64>>>,
}

impl BoundCurve {
    pub(crate) fn new(class: CurveClass, guarantee: InDistributionGuarantee, concavified: bool, kind: CurveKind) -> Self {
        BoundCurve { class, guarantee, concavified, notes: BTreeMap::new(), kind }
    }

    /// A user-supplied curve; `concavified` is the caller's claim and is checked by the oracle suites.
    pub fn custom(guarantee: InDistributionGuarantee, concavified: bool, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(CurveClass::Custom, guarantee, concavified, CurveKind::Func(Arc::new(f)))
    }

    /// A piecewise-linear curve through `(n̄, value)` knots, extended by its final segment.
    pub fn from_table(guarantee: InDistributionGuarantee, class: CurveClass, points: &[(f64, f64)], concavified: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("curve table is empty".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParams("curve table abscissae must be strictly increasing".into()));
        }
        let table = Table {
            xs: points.iter().map(|p| p.0).collect(),
            ys: points.iter().map(|p| p.1).collect(),
            tail: Tail::ExtendFinalSegment,
        };
        Ok(Self::new(class, guarantee, concavified, CurveKind::Table(table)))
    }

    /// `ε(n̄)`, clamped to `[0, 2]`. Negative `n̄` is treated as vacuum.
    pub fn eval(&self, nbar: f64) -> f64 {
        let n = nbar.max(0.0);
        let v = match &self.kind {
            CurveKind::Step => classes::step_value(&self.guarantee, n),
            CurveKind::Lipschitz => classes::lipschitz_value(&self.guarantee, n),
            CurveKind::Gaussian => classes::gaussian_value(&self.guarantee, n),
            CurveKind::PhaseRotation => classes::phase_rotation_value(&self.guarantee, n),
            CurveKind::Squeezing { w } => classes::squeezing_value(&self.guarantee, *w, n),
            CurveKind::Displacement => self.guarantee.eps0,
            CurveKind::Symmetric => classes::symmetric_value(&self.guarantee, n),
            CurveKind::Universal => universal_coherent_bound(self.guarantee, n.sqrt()).value,
            CurveKind::Table(t) => t.eval(n),
            CurveKind::Func(f) => f(n),
            CurveKind::MinWithStep(inner) => inner.eval(n).min(classes::step_value(&self.guarantee, n)),
        };
        if v.is_nan() {
            CEILING
        } else {
            v.clamp(0.0, CEILING)
        }
    }

    /// `min(curve, step)`: never worse than the trivial bound, but no longer concave.
    pub fn combined_with_step(&self) -> BoundCurve {
        let mut c = Self::new(self.class, self.guarantee, false, CurveKind::MinWithStep(Box::new(self.clone())));
        c.notes = self.notes.clone();
        c
    }

    /// `factor · curve` as a custom curve. Used to build deliberately unsound fixtures.
    pub fn scaled(&self, factor: f64) -> BoundCurve {
        let inner = self.clone();
        let mut c = BoundCurve::custom(self.guarantee, self.concavified, move |n| factor * inner.eval(n));
        c.notes.insert("scale".into(), factor);
        c
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.kind {
            CurveKind::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_expensive(&self) -> bool {
        matches!(self.kind, CurveKind::Universal)
    }

    /// Samples `points` uniformly spaced values of `n̄` on `[0, nbar_max]`.
    pub fn record(&self, nbar_max: f64, points: usize) -> CurveRecord {
        use rayon::prelude::*;
        let xs = uniform_grid(nbar_max, points);
        let (grid, optimized_s) = if matches!(self.kind, CurveKind::Universal) {
            let evals: Vec<UniversalEval> = xs.par_iter().map(|&x| universal_coherent_bound(self.guarantee, x.sqrt())).collect();
            let grid = xs.iter().zip(&evals).map(|(&x, e)| [x, e.value]).collect();
            (grid, Some(evals.iter().map(|e| e.s).collect()))
        } else {
            (xs.par_iter().map(|&x| [x, self.eval(x)]).collect(), None)
        };
        CurveRecord {
            class_tag: self.class.tag().to_string(),
            eps0: self.guarantee.eps0,
            tau: self.guarantee.tau,
            grid,
            concavified: self.concavified,
            optimized_s,
        }
    }
}

/// `points` values evenly spaced on `[0, max]` (just `[0]` for one point).
pub fn uniform_grid(max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| max * i as f64 / (points - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarantee_validation() {
        assert!(InDistributionGuarantee::new(0.0, 1.0).is_err());
        assert!(InDistributionGuarantee::new(2.5, 1.0).is_err());
        assert!(InDistributionGuarantee::new(0.1, 0.0).is_err());
        assert!(InDistributionGuarantee::new(2.0, 1.0).is_ok());
    }

    #[test]
    fn tags_round_trip() {
        for c in CurveClass::ALL {
            assert_eq!(CurveClass::from_tag(c.tag()), Some(c));
        }
        assert_eq!(CurveClass::from_tag("symmetric_gaussian"), Some(CurveClass::Symmetric));
        assert_eq!(CurveClass::from_tag("phase-rotation"), Some(CurveClass::PhaseRotation));
        assert_eq!(CurveClass::from_tag("nope"), None);
    }

    #[test]
    fn table_interpolation_and_tails() {
        let g = InDistributionGuarantee::new(0.1, 1.0).unwrap();
        let c = BoundCurve::from_table(g, CurveClass::Custom, &[(0.0, 0.1), (1.0, 0.5), (2.0, 0.7)], true).unwrap();
        assert!((c.eval(0.5) - 0.3).abs() < 1e-15);
        assert!((c.eval(3.0) - 0.9).abs() < 1e-15);
        assert_eq!(c.eval(100.0), 2.0);
        assert!(BoundCurve::from_table(g, CurveClass::Custom, &[(1.0, 0.1), (1.0, 0.2)], true).is_err());
    }

    #[test]
    fn combined_mode_never_exceeds_step() {
        let g = InDistributionGuarantee::new(0.3, 1.0).unwrap();
        let c = phase_rotation_bound(g).unwrap().combined_with_step();
        assert!(!c.concavified);
        assert!(c.eval(0.9) <= 0.3);
    }

    #[test]
    fn record_shape() {
        let g = InDistributionGuarantee::new(0.3, 1.0).unwrap();
        let r = phase_rotation_bound(g).unwrap().record(20.0, 200);
        assert_eq!(r.grid.len(), 200);
        assert_eq!(r.grid[199][0], 20.0);
        assert_eq!(r.class_tag, "phase_rotation");
    }
}
