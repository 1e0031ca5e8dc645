//! Nested-disk geometry of the partial-sum path.
//!
//! Once consecutive turn angles are acute, three segments `n, n+1, n+2`
//! form a triangle. The disk having segment `n+2` as diameter lies inside
//! the disk on segment `n` exactly when `Δ_c < Δ_r`, the distance between
//! the two centres against the difference of the radii. Scanning the sign
//! of `Δ_r² - Δ_c²` yields `n_o(s)`; repeating the scan with disks shrunk by
//! a factor `ε` yields `j(s)`, and beyond `m = max(n_o, j)` the remainder
//! satisfies `(1-ε)/(2n^σ) < |R_n| < 1/n^σ`.
//!
//! Every quantity is evaluated at `|t|`; the path at `-t` is its mirror image.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::oracle::{EtaOracle, DEFAULT_TARGET_ERROR};
use crate::{Error, Result, StripPoint};

/// Default length of the positive run that certifies a transition.
pub const DEFAULT_WINDOW: u64 = 1000;
/// Default upper end of `n` scans.
pub const DEFAULT_SCAN_CEILING: u64 = 10_000_000;

/// `N(t)`: the smallest integer not less than `1/(e^(π/2t) - 1)`.
///
/// For `t = 0` every turn angle vanishes and the threshold is 1.
pub fn angle_threshold(t: f64) -> u64 {
    let t = t.abs();
    if t == 0.0 {
        return 1;
    }
    let x = 1.0 / (FRAC_PI_2 / t).exp_m1();
    (x.ceil() as u64).max(1)
}

/// Turn angles of the triangle on segments `n, n+1, n+2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleTriple {
    /// `δ_{n+1} = t ln((n+1)/n)`.
    pub delta1: f64,
    /// `δ_{n+2} = t ln((n+2)/(n+1))`.
    pub delta2: f64,
    /// `β = δ_{n+1} + δ_{n+2} = t ln((n+2)/n)`.
    pub beta: f64,
}

impl AngleTriple {
    pub fn new(n: u64, t: f64) -> Self {
        let t = t.abs();
        let nf = n as f64;
        AngleTriple {
            delta1: t * (1.0 / nf).ln_1p(),
            delta2: t * (1.0 / (nf + 1.0)).ln_1p(),
            beta: t * (2.0 / nf).ln_1p(),
        }
    }
}

/// The disks on segments `n` and `n+2` in the frame where segment `n`
/// runs from `1/n^σ` to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPair {
    pub n: u64,
    pub c_n: Complex64,
    pub c_n2: Complex64,
    /// `1/(2n^σ)`.
    pub r_n: f64,
    /// `1/(2(n+2)^σ)`.
    pub r_n2: f64,
    /// `|C_{n+2} - C_n|²`.
    pub delta_c_sq: f64,
    /// `(r_n - r_{n+2})²`.
    pub delta_r_sq: f64,
}

fn check_threshold(n: u64, t: f64) -> Result<()> {
    let threshold = angle_threshold(t);
    if n < threshold {
        Err(Error::AngleTooLarge { n, threshold })
    } else {
        Ok(())
    }
}

/// Centres and radii from the explicit triangle coordinates.
pub fn disk_pair(n: u64, s: StripPoint) -> Result<DiskPair> {
    check_threshold(n, s.t())?;
    let sigma = s.sigma();
    let nf = n as f64;
    let a = AngleTriple::new(n, s.t());
    let p1 = (nf + 1.0).powf(-sigma);
    let p2 = (nf + 2.0).powf(-sigma);
    let r_n = 0.5 * nf.powf(-sigma);
    let r_n2 = 0.5 * p2;
    let c_n = Complex64::new(r_n, 0.0);
    let c_n2 = Complex64::new(
        a.delta1.cos() * p1 - a.beta.cos() * r_n2,
        -a.delta1.sin() * p1 + a.beta.sin() * r_n2,
    );
    Ok(DiskPair {
        n,
        c_n,
        c_n2,
        r_n,
        r_n2,
        delta_c_sq: (c_n2 - c_n).norm_sqr(),
        delta_r_sq: (r_n - r_n2) * (r_n - r_n2),
    })
}

/// `2 sin²(x/2) = 1 - cos x` without cancellation.
#[inline]
fn one_minus_cos(x: f64) -> f64 {
    let h = (0.5 * x).sin();
    2.0 * h * h
}

/// Powers `n^σ, (n+1)^σ, (n+2)^σ` and the gaps between consecutive ones.
struct Ladder {
    a: f64,
    b: f64,
    c: f64,
    gap_ab: f64,
    gap_bc: f64,
}

impl Ladder {
    fn new(n: u64, sigma: f64) -> Self {
        let nf = n as f64;
        let a = nf.powf(sigma);
        let b = (nf + 1.0).powf(sigma);
        let c = (nf + 2.0).powf(sigma);
        Ladder {
            a,
            b,
            c,
            gap_ab: a * (sigma * (1.0 / nf).ln_1p()).exp_m1(),
            gap_bc: b * (sigma * (1.0 / (nf + 1.0)).ln_1p()).exp_m1(),
        }
    }

    fn denominator(&self) -> f64 {
        self.a * self.b * self.b * self.c
    }

    /// `(r_n - r_{n+2})²` from `1/(2n^σ) · (1 - (n/(n+2))^σ)`.
    fn delta_r_sq(&self, n: u64, sigma: f64) -> f64 {
        let nf = n as f64;
        let d = 0.5 / self.a * -(-sigma * (2.0 / nf).ln_1p()).exp_m1();
        d * d
    }
}

fn numerator_from(l: &Ladder, a: &AngleTriple) -> f64 {
    // (n+1)^σ[(n+2)^σ cos δ1 - (n+1)^σ (1+cos β)/2] - n^σ[(n+2)^σ - (n+1)^σ cos δ2]
    // regrouped with cos x = 1 - h(x) into the exactly equal form
    // (C-B)(B-A) - BC h(δ1) + B² h(β)/2 - AB h(δ2)
    l.gap_bc * l.gap_ab - l.b * l.c * one_minus_cos(a.delta1)
        + 0.5 * l.b * l.b * one_minus_cos(a.beta)
        - l.a * l.b * one_minus_cos(a.delta2)
}

/// The numerator of `Δ_r² - Δ_c²` over its positive denominator
/// `n^σ (n+1)^(2σ) (n+2)^σ`; its sign is the sign of `Δ_r² - Δ_c²`.
pub fn nesting_numerator(n: u64, s: StripPoint) -> Result<f64> {
    check_threshold(n, s.t())?;
    Ok(numerator_from(
        &Ladder::new(n, s.sigma()),
        &AngleTriple::new(n, s.t()),
    ))
}

/// `Δ_r² - Δ_c²` in its well-conditioned form.
pub fn dr2_minus_dc2(n: u64, s: StripPoint) -> Result<f64> {
    check_threshold(n, s.t())?;
    let l = Ladder::new(n, s.sigma());
    Ok(numerator_from(&l, &AngleTriple::new(n, s.t())) / l.denominator())
}

/// `scale²Δ_r² - Δ_c² = (Δ_r² - Δ_c²) - (1 - scale²)Δ_r²`.
fn scaled_margin(n: u64, sigma: f64, t: f64, scale: f64) -> f64 {
    let l = Ladder::new(n, sigma);
    let diff = numerator_from(&l, &AngleTriple::new(n, t)) / l.denominator();
    diff - (1.0 - scale * scale) * l.delta_r_sq(n, sigma)
}

/// `scale² Δ_r² - Δ_c²`, positive exactly when the `scale`-shrunk disk on
/// segment `n+2` lies inside the shrunk disk on segment `n`.
pub fn scaled_containment_margin(n: u64, s: StripPoint, scale: f64) -> Result<f64> {
    check_threshold(n, s.t())?;
    Ok(scaled_margin(n, s.sigma(), s.t(), scale))
}

/// `Δ_c < scale · (r_n - r_{n+2})`.
pub fn containment_check(n: u64, s: StripPoint, scale: f64) -> Result<bool> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "scale must lie in (0, 1], got {scale}"
        )));
    }
    Ok(scaled_containment_margin(n, s, scale)? > 0.0)
}

/// Result of a stable-run scan for an eventually positive predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunScan {
    /// Last index at which the predicate failed, or `threshold - 1` when it never did.
    pub last_failure: u64,
    /// Number of failure→success transitions seen; more than one means the
    /// onset was not a single sign change.
    pub transitions: u64,
}

/// Scans `n = threshold, threshold+1, ...` until `predicate` has held for
/// `window` consecutive indices.
fn stable_run<F: FnMut(u64) -> bool>(
    threshold: u64,
    window: u64,
    ceiling: u64,
    mut predicate: F,
) -> Result<RunScan> {
    let mut last_failure = threshold - 1;
    let mut transitions = 0;
    let mut previous_ok = true;
    let mut n = threshold;
    while n - last_failure <= window {
        if n > ceiling {
            return Err(Error::WindowExhausted { window, ceiling });
        }
        let ok = predicate(n);
        if !ok {
            last_failure = n;
        } else if !previous_ok {
            transitions += 1;
        }
        previous_ok = ok;
        n += 1;
    }
    Ok(RunScan {
        last_failure,
        transitions,
    })
}

fn check_window(window: u64) -> Result<()> {
    if window == 0 {
        Err(Error::InvalidInput("window must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `n_o(s)` with an explicit scan ceiling; also reports the transition count.
pub fn scan_n_o(s: StripPoint, window: u64, ceiling: u64) -> Result<RunScan> {
    check_window(window)?;
    let sigma = s.sigma();
    let t = s.t().abs();
    let threshold = angle_threshold(t);
    if t == 0.0 {
        // numerator is (C-B)(B-A) > 0 everywhere
        return Ok(RunScan {
            last_failure: 0,
            transitions: 0,
        });
    }
    stable_run(threshold, window, ceiling, |n| {
        numerator_from(&Ladder::new(n, sigma), &AngleTriple::new(n, t)) > 0.0
    })
}

/// `n_o(s)`: the last index `≥ N(t)` where the numerator is not positive,
/// confirmed by `window` positive values after it; `N(t) - 1` when the
/// numerator is positive from the threshold on.
pub fn find_n_o(s: StripPoint, window: u64) -> Result<u64> {
    Ok(scan_n_o(s, window, DEFAULT_SCAN_CEILING)?.last_failure)
}

/// Stable-run start for containment of the `scale`-shrunk disks.
pub fn scan_containment(s: StripPoint, scale: f64, window: u64, ceiling: u64) -> Result<RunScan> {
    check_window(window)?;
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "scale must lie in (0, 1], got {scale}"
        )));
    }
    let sigma = s.sigma();
    let t = s.t().abs();
    stable_run(angle_threshold(t), window, ceiling, |n| {
        scaled_margin(n, sigma, t, scale) > 0.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitDiagnostics {
    /// `N(t)`.
    pub n_threshold: u64,
    pub n_o: u64,
    /// Start of the stable containment run for the `ε`-shrunk disks.
    pub j: u64,
    /// `max(n_o, j)`.
    pub m: u64,
    pub epsilon: f64,
    /// Length of the positive run confirmed after both `n_o` and `j`.
    pub verified_window: u64,
    /// Set when either scan saw more than one onset of positivity.
    pub multiple_transitions: bool,
}

/// `n_o`, `j` and `m = max(n_o, j)` for the sandwich with parameter `epsilon`.
///
/// `j` is found with disks of radius `ε r_n`: if `η(s)` stays inside those
/// nested disks, its distance from the endpoint `S_n` is at least `(1-ε) r_n`.
pub fn find_m(s: StripPoint, epsilon: f64, window: u64) -> Result<OrbitDiagnostics> {
    find_m_with_ceiling(s, epsilon, window, DEFAULT_SCAN_CEILING)
}

pub fn find_m_with_ceiling(
    s: StripPoint,
    epsilon: f64,
    window: u64,
    ceiling: u64,
) -> Result<OrbitDiagnostics> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let no = scan_n_o(s, window, ceiling)?;
    let j = scan_containment(s, epsilon, window, ceiling)?;
    Ok(OrbitDiagnostics {
        n_threshold: angle_threshold(s.t()),
        n_o: no.last_failure,
        j: j.last_failure,
        m: no.last_failure.max(j.last_failure),
        epsilon,
        verified_window: window,
        multiple_transitions: no.transitions > 1 || j.transitions > 1,
    })
}

/// `(1-ε)/(2n^σ) < |R_n| < 1/n^σ` at one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderBound {
    pub n: u64,
    pub lower: f64,
    pub measured: f64,
    pub upper: f64,
}

impl RemainderBound {
    pub fn holds(&self) -> bool {
        self.lower < self.measured && self.measured < self.upper
    }
}

/// Remainder bounds for `n ∈ [n_from, n_to]`, measured against the oracle.
///
/// Fails with `InvalidInput` unless `n_from > m(s, ε)`.
pub fn sandwich_report(
    s: StripPoint,
    epsilon: f64,
    n_from: u64,
    n_to: u64,
) -> Result<Vec<RemainderBound>> {
    let diag = find_m(s, epsilon, DEFAULT_WINDOW)?;
    if n_from <= diag.m {
        return Err(Error::InvalidInput(format!(
            "sandwich requires n_from > m = {}, got {n_from}",
            diag.m
        )));
    }
    sandwich_unchecked(s, epsilon, n_from, n_to)
}

/// As [`sandwich_report`] but without computing `m`.
pub fn sandwich_unchecked(
    s: StripPoint,
    epsilon: f64,
    n_from: u64,
    n_to: u64,
) -> Result<Vec<RemainderBound>> {
    if n_from == 0 || n_to < n_from {
        return Err(Error::InvalidInput(format!(
            "bad index range [{n_from}, {n_to}]"
        )));
    }
    let sigma = s.sigma();
    let remainders = EtaOracle::default().remainders(s, n_from, n_to, DEFAULT_TARGET_ERROR)?;
    Ok(remainders
        .into_iter()
        .map(|r| {
            let upper = (-sigma * (r.n as f64).ln()).exp();
            RemainderBound {
                n: r.n,
                lower: (1.0 - epsilon) * 0.5 * upper,
                measured: r.magnitude,
                upper,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::turn_angle;

    fn sp(sigma: f64, t: f64) -> StripPoint {
        StripPoint::new(sigma, t).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(angle_threshold(1.0), 1);
        assert_eq!(angle_threshold(20.0), 13);
        assert_eq!(angle_threshold(37.58631), 24);
        assert_eq!(angle_threshold(0.0), 1);
        for t in [0.5, 3.0, 20.0, 147.0] {
            let n = angle_threshold(t);
            assert!(turn_angle(n, t) < FRAC_PI_2);
            if n > 1 {
                assert!(turn_angle(n - 1, t) >= FRAC_PI_2);
            }
        }
    }

    #[test]
    fn angle_triple_adds_up() {
        let a = AngleTriple::new(1200, 20.0);
        assert!((a.delta1 + a.delta2 - a.beta).abs() < 1e-15);
    }

    #[test]
    fn below_threshold_is_rejected() {
        let s = sp(0.5, 20.0);
        assert_eq!(
            nesting_numerator(12, s),
            Err(Error::AngleTooLarge {
                n: 12,
                threshold: 13
            })
        );
        assert!(disk_pair(5, s).is_err());
        assert!(containment_check(1, s, 1.0).is_err());
    }

    #[test]
    fn degenerate_real_axis_centres() {
        let s = sp(0.7, 0.0);
        for n in [1u64, 5, 40] {
            let d = disk_pair(n, s).unwrap();
            let nf = n as f64;
            let expected = (nf + 1.0).powf(-0.7) - 0.5 * (nf + 2.0).powf(-0.7);
            assert!((d.c_n2.re - expected).abs() < 1e-15);
            assert_eq!(d.c_n2.im, 0.0);
            assert!(d.r_n > d.r_n2 && d.r_n2 > 0.0);
            // product form of the numerator when all cosines are 1
            let l = (nf.powf(0.7), (nf + 1.0).powf(0.7), (nf + 2.0).powf(0.7));
            let product = (l.1 - l.0) * (l.2 - l.1) / (l.0 * l.1 * l.1 * l.2);
            let diff = dr2_minus_dc2(n, s).unwrap();
            assert!((diff - product).abs() < 1e-12 * product, "n = {n}");
            assert!(nesting_numerator(n, s).unwrap() > 0.0);
        }
    }

    #[test]
    fn containment_turns_positive_at_1398() {
        let s = sp(0.5, 20.0);
        let d = disk_pair(1200, s).unwrap();
        assert!(d.delta_r_sq - d.delta_c_sq > 0.0);
        assert!(containment_check(1200, s, 1.0).unwrap());
        assert!(containment_check(1200, s, 0.5).unwrap());
    }

    #[test]
    fn transition_at_1398() {
        let s = sp(0.50567, 37.58631);
        assert!(nesting_numerator(1397, s).unwrap() < 0.0);
        assert!(nesting_numerator(1398, s).unwrap() > 0.0);
        assert_eq!(find_n_o(s, 1000).unwrap(), 1397);
    }

    #[test]
    fn real_axis_n_o_is_zero() {
        assert_eq!(find_n_o(sp(0.5, 0.0), 1000).unwrap(), 0);
    }

    #[test]
    fn ceiling_is_enforced() {
        let s = sp(0.5, 37.58631);
        assert!(matches!(
            scan_n_o(s, 1000, 500),
            Err(Error::WindowExhausted { .. })
        ));
        assert!(find_n_o(s, 0).is_err());
    }

    #[test]
    fn tiny_scale_fails_containment() {
        let s = sp(0.4, 10.0);
        assert!(!containment_check(100, s, 1e-6).unwrap());
        assert!(containment_check(100, s, 0.0).is_err());
    }

    #[test]
    fn m_dominates_both_indices() {
        let d = find_m(sp(0.50567, 37.58631), 0.5, 1000).unwrap();
        assert_eq!(d.n_o, 1397);
        assert!(d.m >= d.n_o && d.m >= d.j && d.m >= 1397);
        assert!(!d.multiple_transitions);
        let d = find_m(sp(1.0, 0.0), 0.5, 1000).unwrap();
        assert!(d.m <= 10, "{d:?}");
        assert!(find_m(sp(0.5, 20.0), 1.0, 1000).is_err());
    }

    #[test]
    fn sandwich_precondition() {
        let s = sp(0.5, 20.0);
        assert!(sandwich_report(s, 0.5, 10, 20).is_err());
        let m = find_m(s, 0.5, DEFAULT_WINDOW).unwrap().m;
        let recs = sandwich_report(s, 0.5, m + 1, m + 50).unwrap();
        assert_eq!(recs.len(), 50);
        for r in recs {
            assert!(r.holds(), "{r:?}");
            let diameter = 2.0 * 0.5 / (r.n as f64).sqrt();
            assert!((r.upper - diameter).abs() < 1e-15);
        }
    }
}
