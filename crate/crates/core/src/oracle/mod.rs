//! Independent checks of the bound formulas: exact distances for tractable channel pairs,
//! quadrature of the phase-space integrals the closed forms bound, and structural properties
//! of the curves.
//!
//! Nothing here is called by the bound formulas; the shared ground is `specfun`, `quad` and
//! the `cvcore` primitives.

mod numerics;
mod pairs;
mod suites;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub use numerics::{delta_s_exact, gamma_quadrature, laguerre_roots, mu_nu_numeric, DeltaSExact, MuNuNumeric};
pub use pairs::{
    dominance_suite, exact_coherent_distance, log_grid, matching_curves, random_pair_suite, relaxed_witness_pair,
    worst_case_pair, ChannelPairSample, PairClass,
};
pub use suites::{
    concavity_and_limit_suite, curve_structure_report, delta_s_suite, dominance_report, envelope_monotonicity_suite, gamma_closed_form_suite,
    mu_nu_suite, state_soundness_suite, universal_dominance_report, LimitGrids,
};

/// Distances may exceed a bound by at most this much.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Failure of a property known not to hold for this input; does not fail the suite.
    DocumentedException,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::DocumentedException => "documented_exception",
        })
    }
}

/// One assertion `lhs ≤ rhs + tolerance` checked over many points.
///
/// `max_slack` is the largest `lhs − rhs` seen; `worst_point` is where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub status: Status,
    pub max_slack: f64,
    pub tolerance: f64,
    pub worst_point: BTreeMap<String, f64>,
    pub checked: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub status: Status,
    pub assertions: Vec<Assertion>,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: Option<u64>, assertions: Vec<Assertion>) -> Self {
        let status = if assertions.iter().any(|a| a.status == Status::Fail) { Status::Fail } else { Status::Pass };
        VerificationReport { suite: suite.to_string(), seed, status, assertions }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// Concatenates several reports under one name.
    pub fn merge(suite: &str, seed: Option<u64>, parts: Vec<VerificationReport>) -> Self {
        let assertions = parts
            .into_iter()
            .flat_map(|r| {
                let prefix = r.suite.clone();
                r.assertions.into_iter().map(move |mut a| {
                    a.name = format!("{prefix}/{}", a.name);
                    a
                })
            })
            .collect();
        Self::new(suite, seed, assertions)
    }

    /// The assertion with the largest slack among failures, if any.
    pub fn worst_violation(&self) -> Option<&Assertion> {
        self.assertions
            .iter()
            .filter(|a| a.status == Status::Fail)
            .max_by(|a, b| a.max_slack.partial_cmp(&b.max_slack).unwrap_or(std::cmp::Ordering::Equal))
    }
}

/// Accumulates observations for one [`Assertion`], in a fixed order.
#[derive(Debug, Clone)]
pub struct Check {
    name: String,
    tolerance: f64,
    max_slack: f64,
    worst_point: BTreeMap<String, f64>,
    checked: usize,
    violations: usize,
    note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            tolerance,
            max_slack: f64::NEG_INFINITY,
            worst_point: BTreeMap::new(),
            checked: 0,
            violations: 0,
            note: None,
        }
    }

    /// Records `lhs ≤ rhs + tolerance` at `point`. NaN counts as a violation.
    pub fn observe(&mut self, lhs: f64, rhs: f64, point: &[(&str, f64)]) {
        let slack = if lhs.is_nan() || rhs.is_nan() { f64::INFINITY } else { lhs - rhs };
        self.checked += 1;
        if slack > self.tolerance {
            self.violations += 1;
        }
        if slack > self.max_slack {
            self.max_slack = slack;
            self.worst_point = point.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn finish(self) -> Assertion {
        self.finish_with(Status::Fail)
    }

    /// Like [`Check::finish`], but a failure is reported with `on_failure` instead.
    pub fn finish_with(self, on_failure: Status) -> Assertion {
        let status = if self.violations == 0 && self.checked > 0 { Status::Pass } else { on_failure };
        Assertion {
            name: self.name,
            status,
            max_slack: if self.checked == 0 { 0.0 } else { self.max_slack },
            tolerance: self.tolerance,
            worst_point: self.worst_point,
            checked: self.checked,
            violations: self.violations,
            note: self.note,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_records_worst_point() {
        let mut c = Check::new("x", 1e-9);
        c.observe(0.1, 0.2, &[("n", 1.0)]);
        c.observe(0.3, 0.2, &[("n", 2.0)]);
        c.observe(f64::NAN, 0.2, &[("n", 3.0)]);
        let a = c.finish();
        assert_eq!(a.status, Status::Fail);
        assert_eq!(a.violations, 2);
        assert_eq!(a.worst_point["n"], 3.0);
        let empty = Check::new("e", 0.0).finish();
        assert_eq!(empty.status, Status::Fail);
    }

    #[test]
    fn report_status_and_merge() {
        let mut ok = Check::new("ok", 0.0);
        ok.observe(0.0, 1.0, &[]);
        let mut bad = Check::new("bad", 0.0);
        bad.observe(2.0, 1.0, &[("r2", 4.0)]);
        let r = VerificationReport::merge(
            "all",
            Some(7),
            vec![VerificationReport::new("a", None, vec![ok.finish()]), VerificationReport::new("b", None, vec![bad.finish()])],
        );
        assert!(!r.passed());
        assert_eq!(r.worst_violation().unwrap().name, "b/bad");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["assertions"][1]["status"], "fail");
    }
}
