//! Extending a coherent-input curve to non-classical inputs: Fock states, SPAT states and
//! squeezed vacuum, as ε₀ shrinks.

use cv_oodg::coherent_bounds::{CurveClass, InDistributionGuarantee};
use cv_oodg::state_bounds::{extend, InputStateSpec};

fn main() -> cv_oodg::Result<()> {
    let states = [
        ("fock:1", InputStateSpec::Fock { m: 1 }),
        ("fock:3", InputStateSpec::Fock { m: 3 }),
        ("spat:1", InputStateSpec::Spat { q: 1.0 }),
        ("squeezed:0.5", InputStateSpec::SqueezedVacuum { lambda: 0.5 }),
    ];
    print!("{:>8}", "eps0");
    for (name, _) in &states {
        print!(" {name:>14}");
    }
    println!();
    for eps0 in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8] {
        let curve = CurveClass::PhaseRotation.build(InDistributionGuarantee::new(eps0, 1.0)?)?;
        print!("{eps0:>8.0e}");
        for (_, s) in &states {
            print!(" {:>14.6e}", extend(&curve, s)?.value);
        }
        println!();
    }
    let r = extend(&CurveClass::PhaseRotation.build(InDistributionGuarantee::new(1e-4, 1.0)?)?, &states[1].1)?;
    println!("fock:3 at 1e-4 via {} with {:?}", r.branch, r.chosen_params);
    Ok(())
}
