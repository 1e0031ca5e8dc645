//! Leading-order forms of the disk-nesting margins, compared against the
//! exact values from [`crate::orbit`].

use crate::orbit::{dr2_minus_dc2, scaled_containment_margin};
use crate::{Result, StripPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRecord {
    pub n: u64,
    pub exact: f64,
    pub leading: f64,
    /// `exact / leading`.
    pub ratio: f64,
}

impl AsymptoticRecord {
    fn new(n: u64, exact: f64, leading: f64) -> Self {
        AsymptoticRecord {
            n,
            exact,
            leading,
            ratio: exact / leading,
        }
    }
}

/// `Δ_r² - Δ_c²` against `σ²/(n(n+1)) · 1/((n+1)^σ (n+2)^σ)`.
pub fn check_dr2_minus_dc2(n: u64, s: StripPoint) -> Result<AsymptoticRecord> {
    let sigma = s.sigma();
    let nf = n as f64;
    let leading =
        sigma * sigma / (nf * (nf + 1.0)) / ((nf + 1.0).powf(sigma) * (nf + 2.0).powf(sigma));
    Ok(AsymptoticRecord::new(n, dr2_minus_dc2(n, s)?, leading))
}

/// `ε²Δ_r² - Δ_c²` against `ε²σ²/(n(n+1)) · 1/(n+2)^(2σ)`.
pub fn check_scaled_radius(n: u64, s: StripPoint, epsilon: f64) -> Result<AsymptoticRecord> {
    let sigma = s.sigma();
    let nf = n as f64;
    let leading =
        epsilon * epsilon * sigma * sigma / (nf * (nf + 1.0)) / (nf + 2.0).powf(2.0 * sigma);
    Ok(AsymptoticRecord::new(
        n,
        scaled_containment_margin(n, s, epsilon)?,
        leading,
    ))
}

/// Half-radius case, `ε = ½`.
pub fn check_half_radius(n: u64, s: StripPoint) -> Result<AsymptoticRecord> {
    check_scaled_radius(n, s, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(sigma: f64, t: f64) -> StripPoint {
        StripPoint::new(sigma, t).unwrap()
    }

    #[test]
    fn large_n_ratios() {
        // 50-digit evaluations give 0.99999934 and 0.99999936 here
        let r = check_dr2_minus_dc2(1_000_000, sp(0.5, 20.0)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-2, "{r:?}");
        assert!((r.ratio - 0.999999339).abs() < 1e-6, "{r:?}");
        let h = check_half_radius(1_000_000, sp(0.5, 20.0)).unwrap();
        assert!((h.ratio - 1.0).abs() < 2e-2, "{h:?}");
        assert!((h.ratio - 0.999999356).abs() < 1e-5, "{h:?}");
    }

    #[test]
    fn moderate_n_at_larger_t() {
        // 50-digit reference ratio 0.826243
        let r = check_dr2_minus_dc2(10_000, sp(0.3, 50.0)).unwrap();
        assert!((r.ratio - 1.0).abs() < 0.2);
        assert!((r.ratio - 0.8262429).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn real_axis_agrees_to_first_order() {
        for n in [100u64, 1000, 10_000] {
            let r = check_dr2_minus_dc2(n, sp(0.6, 0.0)).unwrap();
            assert!((r.ratio - 1.0).abs() < 3.0 / n as f64, "{r:?}");
        }
    }

    #[test]
    fn epsilon_squared_scaling() {
        let s = sp(0.4, 10.0);
        let n = 5_000_000;
        let a = check_scaled_radius(n, s, 0.5).unwrap().exact;
        let b = check_scaled_radius(n, s, 0.25).unwrap().exact;
        assert!((a / b - 4.0).abs() < 1e-3, "{}", a / b);
    }
}
