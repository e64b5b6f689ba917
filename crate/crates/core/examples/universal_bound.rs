//! The channel-agnostic bound: every channel pair meeting the guarantee on the disc of
//! radius τ is bounded through the noisy P-representation, minimized over the noise.

use cv_oodg::coherent_bounds::{universal_coherent_bound, InDistributionGuarantee};

fn main() -> cv_oodg::Result<()> {
    for eps0 in [1e-4, 1e-6, 1e-8, 1e-10] {
        let g = InDistributionGuarantee::new(eps0, 1.0)?;
        print!("eps0={eps0:.0e}");
        for r in [0.0, 0.5, 1.0, 1.5] {
            let e = universal_coherent_bound(g, r);
            match e.s {
                Some(s) => print!("  r={r}: {:.4e} (s={s:.3e})", e.value),
                None => print!("  r={r}: trivial"),
            }
        }
        println!();
    }
    Ok(())
}
