//! Complex Gamma function via the Lanczos approximation (g = 7, 9 terms),
//! evaluated in log form so that `|Γ(σ + it)|` stays representable up to
//! `|t| ≈ 200`, with reflection for `Re(z) < ½`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
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

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln sin(πz)` on some branch, without overflowing for large `|Im z|`.
pub(crate) fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    if w.im.abs() < 30.0 {
        return w.sin().ln();
    }
    // sin w = (e^{iw} - e^{-iw}) / 2i; keep the dominant exponential factored out
    let i = Complex64::i();
    if w.im > 0.0 {
        // |e^{-iw}| = e^{Im w} dominates
        let small = (i * w * 2.0).exp();
        -i * w - (i * 2.0).ln() + (Complex64::new(1.0, 0.0) - small).ln() + Complex64::new(0.0, PI)
    } else {
        let small = (-i * w * 2.0).exp();
        i * w - (i * 2.0).ln() + (Complex64::new(1.0, 0.0) - small).ln()
    }
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let tt = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * tt.ln() - tt + x.ln()
}

/// `ln Γ(z)` on a branch whose exponential is `Γ(z)` (not the principal log-gamma).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        Ok(PI.ln() - ln_sin_pi(z) - ln_gamma_right(one - z))
    } else {
        Ok(ln_gamma_right(z))
    }
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    let v = ln_gamma(z)?.exp();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("gamma"))
    }
}

/// `ln |Γ(z)|`.
pub fn ln_abs_gamma(z: Complex64) -> Result<f64> {
    Ok(ln_gamma(z)?.re)
}

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `sqrt(π / cosh(πt))`, the closed form of `|Γ(½ + it)|`.
pub fn half_line_gamma_modulus(t: f64) -> f64 {
    (0.5 * (PI.ln() - ln_cosh(PI * t))).exp()
}
