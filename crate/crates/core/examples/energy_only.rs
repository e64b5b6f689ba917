//! Only the mean photon number is known. The bound trades a photon-number cutoff against
//! the Markov tail.

use cv_oodg::coherent_bounds::{CurveClass, InDistributionGuarantee};
use cv_oodg::state_bounds::{classical_bound, generic_energy_bound};

fn main() -> cv_oodg::Result<()> {
    let curve = CurveClass::PhaseRotation.build(InDistributionGuarantee::new(1e-6, 1.0)?)?;
    println!("{:>6} {:>14} {:>14} {:>20}", "nbar", "classical", "energy-only", "params");
    for nbar in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let e = generic_energy_bound(&curve, nbar)?;
        let p = e.chosen_params.unwrap_or_default();
        println!(
            "{nbar:>6.1} {:>14.6e} {:>14.6e} {:>20}",
            classical_bound(&curve, nbar)?.value,
            e.value,
            format!("M={:?} kappa={:.3}", p.m.unwrap_or(0), p.kappa.unwrap_or(f64::NAN)),
        );
    }
    Ok(())
}
