//! Special functions used by the bound formulas and the numerical oracles.
//!
//! Everything that can overflow in `f64` (factorials, Pochhammer symbols,
//! large powers) is carried as a [`SignedLog`] until the final combination.

use crate::error::{domain, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// A real number stored as `sign * exp(ln_abs)`. Zero has `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { sign: 1.0, ln_abs: 0.0 };
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: x.signum(), ln_abs: x.abs().ln() }
        }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        let sign = self.sign * other.sign;
        if sign == 0.0 {
            return Self::ZERO;
        }
        SignedLog { sign, ln_abs: self.ln_abs + other.ln_abs }
    }

    pub fn div(self, other: SignedLog) -> SignedLog {
        SignedLog { sign: self.sign * other.sign, ln_abs: self.ln_abs - other.ln_abs }
    }
}

/// `ln |Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin().abs();
        return (std::f64::consts::PI / s).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x > 0.0 && x <= 171.0 && x == x.floor() {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    let sign = if x > 0.0 || (x.floor() as i64) % 2 == 0 { 1.0 } else { -1.0 };
    sign * ln_gamma(x).exp()
}

/// `ln n!`, exact to rounding for `n <= 20`.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 20 {
        let mut p: u64 = 1;
        for k in 2..=n {
            p *= k;
        }
        (p as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    ln_binomial(n, k).exp().round_if_small()
}

trait RoundIfSmall {
    fn round_if_small(self) -> Self;
}

impl RoundIfSmall for f64 {
    // Integers below 2^52 are exactly representable; strip the log/exp rounding.
    fn round_if_small(self) -> f64 {
        if self < 4.0e15 {
            self.round()
        } else {
            self
        }
    }
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)` in sign/log form.
pub fn pochhammer_log(x: f64, n: u64) -> SignedLog {
    let mut acc = SignedLog::ONE;
    for k in 0..n {
        acc = acc.mul(SignedLog::from_f64(x + k as f64));
        if acc.sign == 0.0 {
            return SignedLog::ZERO;
        }
    }
    acc
}

/// Principal branch `W₀` of the Lambert function on `[-1/e, ∞)`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if x.is_nan() {
        return Err(domain("lambert_w0 of NaN"));
    }
    if x < branch {
        // Allow the rounding of -1/e itself.
        if x >= branch * (1.0 + 4.0 * f64::EPSILON) {
            return Ok(-1.0);
        }
        return Err(domain(format!("lambert_w0 requires x >= -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > 100.0 {
        // Solve w + ln w = ln x; avoids forming e^w.
        let lx = x.ln();
        let llx = lx.ln();
        let mut w = lx - llx + llx / lx;
        for _ in 0..64 {
            let g = w + w.ln() - lx;
            let g1 = 1.0 + 1.0 / w;
            let g2 = -1.0 / (w * w);
            let step = g / (g1 - 0.5 * g * g2 / g1);
            w -= step;
            if step.abs() <= 1e-12 * w.abs() {
                return Ok(w);
            }
        }
        return Ok(w);
    }
    let mut w = if x < -0.25 {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 1e-12 * w.abs().max(1e-300) {
            break;
        }
    }
    Ok(w)
}

/// `W₀(e^{ln_x})`, usable when `e^{ln_x}` itself would overflow.
pub fn lambert_w0_of_exp(ln_x: f64) -> Result<f64> {
    if ln_x < 100f64.ln() {
        return lambert_w0(ln_x.exp());
    }
    let llx = ln_x.ln();
    let mut w = ln_x - llx + llx / ln_x;
    for _ in 0..64 {
        let g = w + w.ln() - ln_x;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-15 * w.abs() {
            break;
        }
    }
    Ok(w)
}

/// Generalized Laguerre polynomial `L_n^a(x)` by the three-term recurrence.
pub fn laguerre(n: u32, a: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `₂F₁(a, b; c; z)` for a non-positive integer `a`, where the series is a polynomial.
pub fn hyp2f1_terminating(a: i64, b: f64, c: f64, z: f64) -> Result<f64> {
    if a > 0 {
        return Err(domain(format!("hyp2f1_terminating requires a <= 0, got {a}")));
    }
    let deg = (-a) as u64;
    // (c)_k must not vanish for any k <= deg.
    if c <= 0.0 && c == c.floor() && -c < deg as f64 {
        return Err(domain(format!("(c)_k vanishes for c = {c} within degree {deg}")));
    }
    let lnz = SignedLog::from_f64(z);
    let mut terms = Vec::with_capacity(deg as usize + 1);
    for k in 0..=deg {
        let mut t = pochhammer_log(a as f64, k)
            .mul(pochhammer_log(b, k))
            .div(pochhammer_log(c, k));
        t.ln_abs -= log_factorial(k);
        if k > 0 {
            if lnz.sign == 0.0 {
                break;
            }
            t = t.mul(SignedLog { sign: lnz.sign.powi(k as i32), ln_abs: lnz.ln_abs * k as f64 });
        }
        terms.push(t.value());
    }
    Ok(neumaier_sum(terms.iter().copied()))
}

/// Compensated summation.
pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 100_000;

// ln of the lower-series sum e^{-x} x^a Σ x^n / (a)_{n+1}
fn ln_gamma_lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    -x + a * x.ln() + sum.ln()
}

// ln of e^{-x} x^a · CF for Γ(a, x), modified Lentz.
fn ln_gamma_upper_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    -x + a * x.ln() + h.ln()
}

fn check_gamma_args(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(domain(format!("incomplete gamma requires a > 0, x >= 0; got a={a}, x={x}")));
    }
    Ok(())
}

/// `ln Γ(a, x)`, finite even when `Γ(a, x)` underflows.
pub fn ln_gamma_upper(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(ln_gamma(a));
    }
    if x < a + 1.0 {
        let lg = ln_gamma(a);
        let p = (ln_gamma_lower_series(a, x) - lg).exp();
        Ok(lg + (-p).ln_1p())
    } else {
        Ok(ln_gamma_upper_cf(a, x))
    }
}

/// Upper incomplete gamma `Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt`.
pub fn gamma_upper(a: f64, x: f64) -> Result<f64> {
    Ok(ln_gamma_upper(a, x)?.exp())
}

/// Lower incomplete gamma `γ(a, x)`.
pub fn gamma_lower(a: f64, x: f64) -> Result<f64> {
    check_gamma_args(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(ln_gamma_lower_series(a, x).exp())
    } else {
        let lg = ln_gamma(a);
        let q = (ln_gamma_upper_cf(a, x) - lg).exp();
        Ok(lg.exp() * (1.0 - q))
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    let tiny = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Unregularized incomplete beta `B(x; a, b) = ∫_0^x t^{a-1} (1-t)^{b-1} dt`.
pub fn beta_incomplete(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(a > 0.0) || !(b > 0.0) {
        return Err(domain(format!("beta_incomplete requires x in [0,1], a,b > 0; got x={x}, a={a}, b={b}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    if x == 1.0 {
        return Ok(ln_beta.exp());
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((a * x.ln() + b * (-x).ln_1p()).exp() * beta_cf(x, a, b) / a)
    } else {
        let y = 1.0 - x;
        let tail = (b * y.ln() + a * x.ln()).exp() * beta_cf(y, b, a) / b;
        Ok(ln_beta.exp() - tail)
    }
}
