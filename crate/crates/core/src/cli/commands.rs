use rayon::prelude::*;
use std::path::Path;

use super::output::{curve_csv, emit, json, state_csv, StateRecord};
use super::state_arg::expand_states;
use super::{Format, JobConfig, Suite, EXIT_OK, EXIT_TRIVIAL, EXIT_VIOLATION};
use crate::coherent_bounds::{certified_concave_majorant, uniform_grid, BoundCurve, CurveClass, InDistributionGuarantee};
use crate::error::{Error, Result};
use crate::oracle::{
    concavity_and_limit_suite, curve_structure_report, delta_s_suite, dominance_report, envelope_monotonicity_suite,
    gamma_closed_form_suite, matching_curves, mu_nu_suite, state_soundness_suite, universal_dominance_report, LimitGrids,
    PairClass, VerificationReport,
};
use crate::state_bounds::extend;

/// Hull range and resolution for curves that are not concave as built.
const HULL_NBAR_MAX: f64 = 100.0;
const HULL_POINTS: usize = 401;

/// Reads `(nbar, epsilon)` from the first two columns of a bound CSV; `#` lines and a
/// header starting with `nbar` are skipped. The curve counts as concave when its slopes
/// never increase.
pub fn read_curve_table(path: &Path, g: InDistributionGuarantee) -> Result<BoundCurve> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("nbar") {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = || -> Result<f64> {
            cols.next()
                .and_then(|c| c.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("{}:{}: expected two numeric columns", path.display(), i + 1)))
        };
        pts.push((next()?, next()?));
    }
    let concave = pts.windows(3).all(|w| {
        let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
        s2 <= s1 + 1e-12 * (1.0 + s1.abs())
    });
    BoundCurve::from_table(g, CurveClass::Custom, &pts, concave)
}

/// The curve named by `tag` or read from `table`, then scaled and combined with the step bound.
pub fn build_curve(
    tag: &str,
    table: Option<&Path>,
    scale: Option<f64>,
    combined: bool,
    g: InDistributionGuarantee,
) -> Result<BoundCurve> {
    let mut curve = match table {
        Some(p) => read_curve_table(p, g)?,
        None => CurveClass::from_tag(tag)
            .ok_or_else(|| Error::Config(format!("unknown curve class `{tag}`")))?
            .build(g)?,
    };
    if let Some(k) = scale {
        curve = curve.scaled(k);
    }
    if combined {
        curve = curve.combined_with_step();
    }
    Ok(curve)
}

/// The curve itself when concave, otherwise its certified concave majorant on `[0, 100]`.
/// The flag reports which.
pub fn curve_for_extension(curve: BoundCurve) -> Result<(BoundCurve, bool)> {
    if curve.concavified {
        Ok((curve, false))
    } else {
        Ok((certified_concave_majorant(&curve, HULL_NBAR_MAX, HULL_POINTS)?, true))
    }
}

fn job_curve(job: &JobConfig, eps0: f64) -> Result<BoundCurve> {
    let g = InDistributionGuarantee::new(eps0, job.tau)?;
    build_curve(&job.class_tag, job.curve_table.as_deref(), job.curve_scale, job.combined, g)
}

pub fn cmd_bound(job: &JobConfig) -> Result<i32> {
    let curve = job_curve(job, job.eps0[0])?;
    let rec = curve.record(job.nbar_max, job.points);
    let text = match job.format {
        Format::Csv => curve_csv(&rec),
        Format::Json => json(&rec)?,
    };
    emit(job.output_path.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_extend(job: &JobConfig) -> Result<i32> {
    let state = expand_states(&job.states)?;
    if state.len() != 1 {
        return Err(Error::Config("extend needs exactly one state".into()));
    }
    let state = &state[0];
    let (curve, hulled) = curve_for_extension(job_curve(job, job.eps0[0])?)?;
    let report = extend(&curve, &state.spec)?;
    let trivial = report.is_trivial();
    let rec = StateRecord {
        state: state.label.clone(),
        nbar: state.spec.mean_photon_number(),
        class_tag: curve.class.tag().to_string(),
        eps0: job.eps0[0],
        tau: job.tau,
        hulled,
        report,
    };
    let text = match job.format {
        Format::Csv => state_csv(std::slice::from_ref(&rec)),
        Format::Json => json(&rec)?,
    };
    emit(job.output_path.as_deref(), &text)?;
    Ok(if trivial && job.fail_on_trivial { EXIT_TRIVIAL } else { EXIT_OK })
}

/// Rows ordered by state, then by `ε₀` as given.
pub fn cmd_sweep(job: &JobConfig) -> Result<i32> {
    let states = expand_states(&job.states)?;
    if states.is_empty() || job.eps0.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let curves = job
        .eps0
        .iter()
        .map(|&e| curve_for_extension(job_curve(job, e)?))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> = (0..states.len()).flat_map(|i| (0..curves.len()).map(move |j| (i, j))).collect();
    let rows = cells
        .par_iter()
        .map(|&(i, j)| {
            let (curve, hulled) = &curves[j];
            Ok(StateRecord {
                state: states[i].label.clone(),
                nbar: states[i].spec.mean_photon_number(),
                class_tag: curve.class.tag().to_string(),
                eps0: job.eps0[j],
                tau: job.tau,
                hulled: *hulled,
                report: extend(curve, &states[i].spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let text = match job.format {
        Format::Csv => state_csv(&rows),
        Format::Json => json(&rows)?,
    };
    emit(job.output_path.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn pair_classes(tag: &str) -> Result<Vec<PairClass>> {
    if tag == "all" {
        return Ok(PairClass::ALL.to_vec());
    }
    PairClass::from_tag(tag)
        .map(|c| vec![c])
        .ok_or_else(|| Error::Config(format!("unknown channel-pair class `{tag}` (phase_rotation, displacement, squeezing, loss, all)")))
}

fn concavity_reports(g: InDistributionGuarantee) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let grids = LimitGrids { tau: g.tau, ..Default::default() };
    for class in [
        CurveClass::Step,
        CurveClass::Lipschitz,
        CurveClass::Gaussian,
        CurveClass::PhaseRotation,
        CurveClass::Squeezing,
        CurveClass::Displacement,
        CurveClass::Symmetric,
        CurveClass::CubicPhase,
    ] {
        out.push(concavity_and_limit_suite(class, &grids)?);
    }
    // Each universal evaluation is an optimization; a short grid inside the trusted disc.
    let small = LimitGrids { nbar: uniform_grid(g.tau * g.tau, 6), eps0: vec![1e-4, 1e-6, 1e-8], tau: g.tau, limit_tol: 0.05 };
    out.push(concavity_and_limit_suite(CurveClass::Universal, &small)?);
    out.push(envelope_monotonicity_suite(&CurveClass::PhaseRotation.build(g)?, &[0.0, 0.5, 2.0, 10.0])?);
    Ok(out)
}

pub fn cmd_verify(job: &JobConfig) -> Result<i32> {
    let g = InDistributionGuarantee::new(job.eps0[0], job.tau)?;
    let pairs = pair_classes(&job.class_tag)?;
    let custom = job.curve_tag.is_some() || job.curve_table.is_some() || job.curve_scale.is_some() || job.combined;
    let custom_curve = if custom {
        let tag = job.curve_tag.as_deref().unwrap_or("phase_rotation");
        Some(build_curve(tag, job.curve_table.as_deref(), job.curve_scale, job.combined, g)?)
    } else {
        None
    };
    let wants = |s: Suite| job.suite == s || job.suite == Suite::All;
    let mut parts = Vec::new();

    if wants(Suite::Dominance) {
        for &class in &pairs {
            let curves = match &custom_curve {
                Some(c) => vec![c.clone()],
                None => matching_curves(class, g)?,
            };
            parts.push(dominance_report(class, g, &curves, job.seed, job.samples)?);
        }
        if custom_curve.is_none() && g.eps0 <= 1e-4 {
            parts.push(universal_dominance_report(g)?);
        }
    }
    if wants(Suite::GammaClosedForm) {
        parts.push(gamma_closed_form_suite(6, &[0.05, 0.1, 0.3])?);
    }
    if wants(Suite::MuNu) {
        parts.push(mu_nu_suite(6, &[0.05, 0.1, 0.3])?);
    }
    if wants(Suite::DeltaS) {
        parts.push(delta_s_suite(5, &[0.005, 0.01, 0.02, 0.05], 64)?);
    }
    if wants(Suite::Concavity) {
        match &custom_curve {
            Some(c) => parts.push(curve_structure_report(c, &uniform_grid(100.0, 201))?),
            None => parts.extend(concavity_reports(g)?),
        }
    }
    if wants(Suite::Soundness) && custom_curve.is_none() {
        parts.push(state_soundness_suite(g)?);
    }

    let report = VerificationReport::merge("verify", Some(job.seed), parts);
    for a in &report.assertions {
        eprintln!("{:<20} {:<60} max_slack={:.3e} checked={}", a.status.to_string(), a.name, a.max_slack, a.checked);
    }
    if let Some(worst) = report.worst_violation() {
        let point: Vec<String> = worst.worst_point.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        eprintln!("VIOLATION {} exceeds its bound by {:.6e} at {}", worst.name, worst.max_slack, point.join(", "));
    }
    emit(job.output_path.as_deref(), &json(&report)?)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_VIOLATION })
}
