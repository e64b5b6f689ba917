//! Output fidelity of two Gaussian channels on coherent inputs, from first and second
//! moments alone, and the matching trace distance of the pure outputs.

use cv_oodg::cvcore::{output_fidelity_sq, pure_output_distance, GaussianChannel};
use num_complex::Complex64;

fn main() -> cv_oodg::Result<()> {
    let target = GaussianChannel::phase_rotation(0.0);
    let learned = GaussianChannel::phase_rotation(0.05);
    let squeezer = GaussianChannel::squeezing(0.1);
    let lossy = GaussianChannel::loss(0.95)?;

    println!("{:>6} {:>14} {:>14} {:>14}", "|a|", "rotation F^2", "rotation D", "squeeze D");
    for r in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let a = Complex64::new(r, 0.0);
        println!(
            "{r:>6.1} {:>14.8} {:>14.8} {:>14.8}",
            output_fidelity_sq(&target, &learned, a)?,
            pure_output_distance(&target, &learned, a)?,
            pure_output_distance(&GaussianChannel::identity(), &squeezer, a)?,
        );
    }
    // Mixed outputs: only the fidelity is exact; 2√(1 − F²) is then an upper bound.
    let f2 = output_fidelity_sq(&GaussianChannel::identity(), &lossy, Complex64::new(2.0, 0.0))?;
    println!("loss 0.95 at |a|=2: F^2 = {f2:.10}");
    Ok(())
}
