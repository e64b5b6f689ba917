//! The special functions the bounds rest on, at a few reference points.

use cv_oodg::specfun::{gamma_upper, lambert_w0, lambert_w0_of_exp, laguerre, ln_gamma};

fn main() -> cv_oodg::Result<()> {
    println!("ln Γ(0.5)       = {:.17e}  (ln √π = {:.17e})", ln_gamma(0.5), std::f64::consts::PI.sqrt().ln());
    println!("Γ(3, 2)         = {:.17e}  (10 e^-2 = {:.17e})", gamma_upper(3.0, 2.0)?, 10.0 * (-2f64).exp());
    println!("W0(1)           = {:.17e}", lambert_w0(1.0)?);
    println!("W0(-1/e)        = {:.17e}", lambert_w0(-(-1f64).exp())?);
    // e^800 overflows; the log-argument form does not.
    println!("W0(e^800)       = {:.17e}", lambert_w0_of_exp(800.0)?);
    for (n, a, x) in [(3u32, 0.0, 1.5), (6, 2.0, 0.3), (20, 1.0, 40.0)] {
        println!("L_{n}^({a})({x}) = {:.17e}", laguerre(n, a, x));
    }
    Ok(())
}
