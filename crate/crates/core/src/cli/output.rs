//! CSV and JSON emission. Numbers in CSV carry 17 significant digits; absent optional
//! columns are empty.

use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::coherent_bounds::CurveRecord;
use crate::error::Result;
use crate::state_bounds::BoundReport;

pub const BOUND_CSV_SCHEMA: &str = "cv-oodg/bound-csv/1";
pub const STATE_CSV_SCHEMA: &str = "cv-oodg/state-csv/1";

pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub(crate) fn curve_csv(rec: &CurveRecord) -> String {
    let with_s = rec.optimized_s.is_some();
    let mut out = format!("# schema: {BOUND_CSV_SCHEMA}\n");
    out.push_str(if with_s { "nbar,epsilon,class,eps0,tau,s\n" } else { "nbar,epsilon,class,eps0,tau\n" });
    for (i, [n, v]) in rec.grid.iter().enumerate() {
        let _ = write!(out, "{},{},{},{},{}", num(*n), num(*v), rec.class_tag, num(rec.eps0), num(rec.tau));
        if let Some(s) = &rec.optimized_s {
            let _ = write!(out, ",{}", opt(s[i]));
        }
        out.push('\n');
    }
    out
}

/// One extended bound, as emitted by `extend` and `sweep`.
#[derive(Debug, Clone, Serialize)]
pub(crate) struct StateRecord {
    pub state: String,
    pub nbar: f64,
    pub class_tag: String,
    pub eps0: f64,
    pub tau: f64,
    /// Whether the curve was replaced by a certified concave majorant first.
    pub hulled: bool,
    pub report: BoundReport,
}

pub(crate) fn state_csv(rows: &[StateRecord]) -> String {
    let mut out = format!("# schema: {STATE_CSV_SCHEMA}\nnbar,epsilon,class,eps0,tau,s,M,kappa,state,branch\n");
    for r in rows {
        let p = r.report.chosen_params.unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            num(r.nbar),
            num(r.report.value),
            r.class_tag,
            num(r.eps0),
            num(r.tau),
            opt(p.s),
            p.m.map(|m| m.to_string()).unwrap_or_default(),
            opt(p.kappa),
            csv_field(&r.state),
            r.report.branch
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub(crate) fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to standard output when absent.
pub(crate) fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
