//! The oracle at work: exact distances of sampled channel pairs against their curves, and
//! a deliberately under-scaled curve that the suite must reject.

use cv_oodg::coherent_bounds::InDistributionGuarantee;
use cv_oodg::oracle::{dominance_report, log_grid, matching_curves, worst_case_pair, PairClass, Status};

fn main() -> cv_oodg::Result<()> {
    let g = InDistributionGuarantee::new(0.1, 1.0)?;
    for class in PairClass::ALL {
        let report = dominance_report(class, g, &matching_curves(class, g)?, 7, 32)?;
        let fails = report.assertions.iter().filter(|a| a.status == Status::Fail).count();
        println!("{:<16} {} assertions, {fails} failing", class.tag(), report.assertions.len());
    }

    let pair = worst_case_pair(PairClass::PhaseRotation, g)?;
    let curve = matching_curves(PairClass::PhaseRotation, g)?.remove(0);
    println!("worst-case rotation gap {:.6e}, achieved eps0 {:.6e}", pair.gap, pair.achieved_eps0);
    for nbar in log_grid(0.1, 100.0, 4) {
        println!("  nbar={nbar:>8.3} exact={:.6e} curve={:.6e}", pair.distance(nbar, 0.0)?, curve.eval(nbar));
    }

    let bad = curve.scaled(0.05);
    let report = dominance_report(PairClass::PhaseRotation, g, &[bad], 7, 32)?;
    match report.worst_violation() {
        Some(a) => println!("under-scaled curve rejected: {} by {:.3e} at {:?}", a.name, a.max_slack, a.worst_point),
        None => println!("under-scaled curve was NOT rejected"),
    }
    Ok(())
}
