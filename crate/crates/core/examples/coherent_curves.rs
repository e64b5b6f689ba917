//! Coherent-input bounds for each channel class at one guarantee, tabulated over n̄.
//!
//! Run with `cargo run --example coherent_curves -- 0.1 1.0`.

use cv_oodg::coherent_bounds::{CurveClass, InDistributionGuarantee};

fn main() -> cv_oodg::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps0: f64 = args.next().map_or(0.1, |a| a.parse().expect("eps0 must be a number"));
    let tau: f64 = args.next().map_or(1.0, |a| a.parse().expect("tau must be a number"));
    let g = InDistributionGuarantee::new(eps0, tau)?;

    let classes = [
        CurveClass::Step,
        CurveClass::Lipschitz,
        CurveClass::Gaussian,
        CurveClass::PhaseRotation,
        CurveClass::Squeezing,
        CurveClass::Displacement,
        CurveClass::Symmetric,
    ];
    let curves = classes.iter().map(|c| c.build(g)).collect::<cv_oodg::Result<Vec<_>>>()?;

    print!("{:>6}", "nbar");
    for c in &classes {
        print!(" {:>15}", c.tag());
    }
    println!();
    for nbar in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        print!("{nbar:>6.1}");
        for curve in &curves {
            print!(" {:>15.6e}", curve.eval(nbar));
        }
        println!();
    }
    Ok(())
}
