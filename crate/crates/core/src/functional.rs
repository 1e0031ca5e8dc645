//! The functional-equation ratio
//! `P(s) = (1-2^s)/(1-2^(1-s)) · 2(2π)^(-s) · cos(πs/2) · Γ(s)`,
//! which equals `η(1-s)/η(s)` wherever `η(s) ≠ 0`, and the quantities
//! derived from it.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::gamma::{gamma, ln_abs_gamma};
use crate::oracle::{EtaOracle, DEFAULT_TARGET_ERROR};
use crate::{Error, Result, StripPoint, CONJECTURE_T_MIN};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalRatio {
    pub value: Complex64,
    /// `(1 - 2^s) / (1 - 2^(1-s))`.
    pub factor_two_power: Complex64,
    /// `2 (2π)^(-s)`.
    pub factor_exp: Complex64,
    /// `cos(πs/2)`.
    pub factor_cos: Complex64,
    /// `Γ(s)`.
    pub factor_gamma: Complex64,
    /// `ln |P(s)|`, assembled from per-factor log-moduli.
    pub ln_modulus: f64,
}

impl FunctionalRatio {
    /// `|P(s)|` from the log-space route.
    pub fn modulus(&self) -> f64 {
        self.ln_modulus.exp()
    }
}

fn pow2(z: Complex64) -> Complex64 {
    (z * LN_2).exp()
}

/// `ln |cos(x + iy)|` without forming `cosh y`.
pub fn ln_abs_cos(z: Complex64) -> f64 {
    // |cos z|^2 = (cosh 2y + cos 2x) / 2
    let y = z.im.abs();
    let e = (-2.0 * y).exp();
    y - LN_2 + 0.5 * (e * e + 2.0 * (2.0 * z.re).cos() * e).ln_1p()
}

/// `ln |2(2π)^(-s)| = ln 2 - σ ln 2π`.
fn ln_abs_exp_factor(sigma: f64) -> f64 {
    LN_2 - sigma * (2.0 * PI).ln()
}

/// `|(1 - 2^s) / (1 - 2^(1-s))|`.
pub fn two_power_modulus(s: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    (one - pow2(s)).norm() / (one - pow2(one - s)).norm()
}

/// `P(s)` with its four factors.
pub fn big_p(s: StripPoint) -> Result<FunctionalRatio> {
    let z = s.to_complex();
    let one = Complex64::new(1.0, 0.0);
    let denom = one - pow2(one - z);
    if denom.norm() == 0.0 {
        return Err(Error::DenominatorPole {
            sigma: s.sigma(),
            t: s.t(),
        });
    }
    let factor_two_power = (one - pow2(z)) / denom;
    let factor_exp = 2.0 * (-z * (2.0 * PI).ln()).exp();
    let factor_cos = (z * (PI / 2.0)).cos();
    let factor_gamma = gamma(z)?;
    let value = factor_two_power * factor_exp * factor_cos * factor_gamma;

    let ln_modulus = factor_two_power.norm().ln()
        + ln_abs_exp_factor(s.sigma())
        + ln_abs_cos(z * (PI / 2.0))
        + ln_abs_gamma(z)?;
    Ok(FunctionalRatio {
        value,
        factor_two_power,
        factor_exp,
        factor_cos,
        factor_gamma,
        ln_modulus,
    })
}

/// `|P(s)|` through the log-space route only.
pub fn p_modulus(s: StripPoint) -> Result<f64> {
    let z = s.to_complex();
    let ln = two_power_modulus(z).ln()
        + ln_abs_exp_factor(s.sigma())
        + ln_abs_cos(z * (PI / 2.0))
        + ln_abs_gamma(z)?;
    Ok(ln.exp())
}

/// `| |P(½ + it)| - 1 |`.
pub fn critical_line_identity_check(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    Ok((p_modulus(StripPoint::new(0.5, t)?)? - 1.0).abs())
}

/// Closed-form bounds on `|η(½+α+it) / η(½-α+it)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureBounds {
    pub alpha: f64,
    pub t: f64,
    /// `(1-2α)/(1+2α) · (8π/9t)^α`.
    pub lower: f64,
    /// `(8π/9t)^α`.
    pub upper: f64,
}

/// Bound formulas without range checks; scans also use them below `2π + 1`.
pub(crate) fn bounds_unchecked(alpha: f64, t: f64) -> ConjectureBounds {
    // (8π/9t)^α = (4/9)^α (2π/t)^α
    let upper = (alpha * ((4.0f64 / 9.0).ln() + (2.0 * PI / t).ln())).exp();
    let lower = (1.0 - 2.0 * alpha) / (1.0 + 2.0 * alpha) * upper;
    ConjectureBounds {
        alpha,
        t,
        lower,
        upper,
    }
}

pub fn conjecture_bounds(alpha: f64, t: f64) -> Result<ConjectureBounds> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in [0, 1/2), got {alpha}"
        )));
    }
    if !(t >= CONJECTURE_T_MIN) {
        return Err(Error::InvalidInput(format!(
            "t must be at least 2π + 1, got {t}"
        )));
    }
    Ok(bounds_unchecked(alpha, t))
}

/// Which elementary approximation of the two-power factor's extreme values to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxKind {
    /// `(1+2^σ)/(1+2^(1-σ)) ≤ (4/9)^(½-σ)`.
    Upper,
    /// `σ/(1-σ) · (4/9)^(½-σ) ≤ (1-2^σ)/(1-2^(1-σ))`.
    Lower,
}

impl ApproxKind {
    /// `(exact, approximation)` at `σ`.
    pub fn evaluate(self, sigma: f64) -> (f64, f64) {
        let four_ninths = (4.0f64 / 9.0).powf(0.5 - sigma);
        match self {
            ApproxKind::Upper => {
                let exact = (1.0 + sigma.exp2()) / (1.0 + (1.0 - sigma).exp2());
                (exact, four_ninths)
            }
            ApproxKind::Lower => {
                // (1 - 2^σ)/(1 - 2^(1-σ)) written with expm1 for σ → 0
                let exact = if sigma == 0.0 {
                    0.0
                } else {
                    (sigma * LN_2).exp_m1() / ((1.0 - sigma) * LN_2).exp_m1()
                };
                (exact, sigma / (1.0 - sigma) * four_ninths)
            }
        }
    }

    /// `true` when the inequality points the stated way (with a rounding allowance).
    fn holds(self, exact: f64, approx: f64) -> bool {
        let slack = 4.0 * f64::EPSILON * exact.abs().max(approx.abs()).max(1.0);
        match self {
            ApproxKind::Upper => exact <= approx + slack,
            ApproxKind::Lower => approx <= exact + slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRecord {
    pub kind: ApproxKind,
    pub max_deviation: f64,
    pub sigma_at_max: f64,
    pub grid_points: usize,
    /// Grid σ values where the inequality points the wrong way.
    pub direction_violations: Vec<f64>,
    /// Deviations at `σ = 0` and `σ = ½`.
    pub boundary_deviation: (f64, f64),
}

/// Maximum of `|approximation - exact|` over `σ ∈ [0, ½]` on a uniform grid.
pub fn approx_deviation_scan(kind: ApproxKind, grid_step: f64) -> Result<DeviationRecord> {
    if !(grid_step > 0.0 && grid_step <= 1e-4) {
        return Err(Error::InvalidInput(format!(
            "grid step must be in (0, 1e-4], got {grid_step}"
        )));
    }
    let intervals = (0.5 / grid_step).round() as usize;
    let mut rec = DeviationRecord {
        kind,
        max_deviation: 0.0,
        sigma_at_max: 0.0,
        grid_points: intervals + 1,
        direction_violations: Vec::new(),
        boundary_deviation: (0.0, 0.0),
    };
    for i in 0..=intervals {
        let sigma = 0.5 * i as f64 / intervals as f64;
        let (exact, approx) = kind.evaluate(sigma);
        let dev = (approx - exact).abs();
        if dev > rec.max_deviation {
            rec.max_deviation = dev;
            rec.sigma_at_max = sigma;
        }
        if !kind.holds(exact, approx) {
            rec.direction_violations.push(sigma);
        }
        if i == 0 {
            rec.boundary_deviation.0 = dev;
        }
        if i == intervals {
            rec.boundary_deviation.1 = dev;
        }
    }
    Ok(rec)
}

/// `|1 - 2^(½-α+it)| / |1 - 2^(½+α-it)|`.
pub fn two_power_alpha_ratio(alpha: f64, t: f64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    (one - pow2(Complex64::new(0.5 - alpha, t))).norm()
        / (one - pow2(Complex64::new(0.5 + alpha, -t))).norm()
}

/// Finite-difference step for α-derivatives.
pub const FD_STEP: f64 = 1e-6;

/// Central difference `∂/∂α` of [`two_power_alpha_ratio`].
pub fn two_power_alpha_derivative(alpha: f64, t: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in [0, 1/2], got {alpha}"
        )));
    }
    let h = FD_STEP;
    Ok((two_power_alpha_ratio(alpha + h, t) - two_power_alpha_ratio(alpha - h, t)) / (2.0 * h))
}

/// Both sides of the eta-ratio / zeta-ratio relation at `(α, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzRelation {
    /// `|η(½+α+it) / η(½-α+it)|`.
    pub eta_ratio: f64,
    /// `a(α, t) = |ζ(½-α+it)| / |ζ(½+α+it)|`.
    pub a: f64,
    /// `|1 - 2^(½-α+it)| / |1 - 2^(½+α-it)| / a(α, t)`.
    pub rhs: f64,
    pub deviation: f64,
}

/// Evaluates both sides of
/// `|η(½+α+it)/η(½-α+it)| = |1-2^(½-α+it)| / |1-2^(½+α-it)| / a(α,t)`
/// with `a(α,t) = |ζ(½-α+it)|/|ζ(½+α+it)|` taken from the oracle.
pub fn sz_relation(alpha: f64, t: f64) -> Result<SzRelation> {
    let oracle = EtaOracle::default();
    let left = StripPoint::from_alpha(alpha, t)?;
    let right = StripPoint::from_alpha(-alpha, t)?;
    let eta_left = oracle.eta(left, DEFAULT_TARGET_ERROR)?;
    if eta_left.zero_indistinguishable() {
        return Err(Error::ZeroDenominator {
            n: None,
            magnitude: eta_left.value.norm(),
        });
    }
    let eta_right = oracle.eta(right, DEFAULT_TARGET_ERROR)?;
    let zeta_left = oracle.zeta(left, DEFAULT_TARGET_ERROR)?;
    let zeta_right = oracle.zeta(right, DEFAULT_TARGET_ERROR)?;
    if zeta_right.zero_indistinguishable() {
        return Err(Error::ZeroDenominator {
            n: None,
            magnitude: zeta_right.value.norm(),
        });
    }
    let eta_ratio = eta_right.value.norm() / eta_left.value.norm();
    let a = zeta_left.value.norm() / zeta_right.value.norm();
    let rhs = two_power_alpha_ratio(alpha, t) / a;
    Ok(SzRelation {
        eta_ratio,
        a,
        rhs,
        deviation: (eta_ratio - rhs).abs(),
    })
}

/// Absolute deviation between the two sides of [`sz_relation`].
pub fn sz_relation_check(alpha: f64, t: f64) -> Result<f64> {
    Ok(sz_relation(alpha, t)?.deviation)
}
