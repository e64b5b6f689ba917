//! The additive Gaussian noise map on Fock states: how far it moves a state, against the
//! closed-form bound used by the truncation argument.

use cv_oodg::cvcore::{additive_noise_apply, delta_s_bound, trace_distance_padded, FockMatrix};

fn main() -> cv_oodg::Result<()> {
    let dim = 48;
    println!("{:>3} {:>7} {:>13} {:>13} {:>10}", "m", "s", "distance", "bound", "deficit");
    for m in [0usize, 1, 3, 5] {
        let rho = FockMatrix::fock(m, dim)?;
        for s in [0.005, 0.02, 0.05] {
            let noisy = additive_noise_apply(&rho, s, dim)?;
            let d = trace_distance_padded(&rho, &noisy.state) + noisy.trace_deficit.abs();
            println!("{m:>3} {s:>7} {d:>13.6e} {:>13.6e} {:>10.2e}", delta_s_bound(m as f64, s), noisy.trace_deficit);
        }
    }
    Ok(())
}
