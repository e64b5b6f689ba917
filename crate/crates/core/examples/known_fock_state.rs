//! A state known through its Fock-basis density matrix. The bound is checked against the
//! exact output distance for a phase-rotation pair that saturates the guarantee.

use cv_oodg::coherent_bounds::{CurveClass, InDistributionGuarantee};
use cv_oodg::cvcore::{apply_phase_rotation, coherent_vector, trace_distance, FockMatrix};
use cv_oodg::state_bounds::known_fock_bound;
use nalgebra::DVector;
use num_complex::Complex64;

fn main() -> cv_oodg::Result<()> {
    let dim = 12;
    let mut psi = DVector::zeros(dim);
    psi[0] = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    psi[3] = Complex64::new(0.0, 1.0 / 2f64.sqrt());
    let cat_like = FockMatrix::from_pure(&psi)?;
    let mixed = FockMatrix::mixture(&[
        (0.5, FockMatrix::from_pure(&coherent_vector(Complex64::new(0.6, 0.0), dim))?),
        (0.5, FockMatrix::fock(2, dim)?),
    ])?;

    for eps0 in [1e-6, 1e-9, 1e-12] {
        let g = InDistributionGuarantee::new(eps0, 1.0)?;
        let curve = CurveClass::PhaseRotation.build(g)?;
        // Rotation angle whose coherent-state distance at |α| = τ is exactly ε₀.
        let theta = 2.0 * (-(-eps0 * eps0 / 4.0).ln_1p() / (2.0 * g.tau2())).sqrt().asin();
        for (name, rho) in [("(|0>+i|3>)/sqrt2", &cat_like), ("mixture", &mixed)] {
            let b = known_fock_bound(&curve, rho)?;
            let exact = trace_distance(rho, &apply_phase_rotation(rho, theta))?;
            println!("eps0={eps0:.0e} {name:<18} exact={exact:.4e} bound={:.4e} ({})", b.value, b.branch);
        }
    }
    Ok(())
}
