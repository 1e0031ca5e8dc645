//! Ratios `P_n(s) = S_n(1-s) / S_n(s)` of partial sums at critical-line
//! symmetric arguments, vanishing partial sums, and convergence diagnostics.
//!
//! The companion point is `(1-σ) + it`, i.e. `1 - s̄`: the same `t` as `s`.
//! Its partial sums are the conjugates of those at `1 - s`, so all moduli
//! agree with the `1 - s` convention while complex values are conjugated.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::orbit::{scan_n_o, DEFAULT_SCAN_CEILING, DEFAULT_WINDOW};
use crate::series::PartialSums;
use crate::{Error, Result, StripPoint};

/// Default `|S_n(s)|` below which a partial sum counts as zero.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-9;

/// Threshold for reproducing the vanishing partial sums at the rounded
/// coordinates printed for them.
pub const COARSE_ZERO_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSample {
    pub n: u64,
    pub value: Complex64,
    /// `|S_n(s)|`.
    pub denom_magnitude: f64,
}

/// Lockstep streams of `S_n(s)` and `S_n(1 - s̄)`.
#[derive(Debug, Clone)]
pub struct DualSums {
    lower: PartialSums,
    upper: PartialSums,
}

impl DualSums {
    pub fn new(s: StripPoint) -> Result<Self> {
        Ok(DualSums {
            lower: PartialSums::new(s),
            upper: PartialSums::new(s.mirror()?),
        })
    }
}

impl Iterator for DualSums {
    /// `(n, S_n(s), S_n(1 - s̄))`.
    type Item = (u64, Complex64, Complex64);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        let a = self.lower.next()?;
        let b = self.upper.next()?;
        Some((a.n, a.sum, b.sum))
    }
}

fn check_domain(s: StripPoint) -> Result<()> {
    if s.sigma() > 0.0 && s.sigma() <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "ratio sequence needs 0 < σ ≤ 1/2, got σ = {}",
            s.sigma()
        )))
    }
}

fn sample(n: u64, lower: Complex64, upper: Complex64, threshold: f64) -> Result<RatioSample> {
    let denom_magnitude = lower.norm();
    if denom_magnitude <= threshold {
        return Err(Error::ZeroDenominator {
            n: Some(n),
            magnitude: denom_magnitude,
        });
    }
    Ok(RatioSample {
        n,
        value: upper / lower,
        denom_magnitude,
    })
}

/// `P_n(s)` with the default zero threshold.
pub fn ratio_p_n(n: u64, s: StripPoint) -> Result<RatioSample> {
    ratio_p_n_with_threshold(n, s, DEFAULT_ZERO_THRESHOLD)
}

pub fn ratio_p_n_with_threshold(n: u64, s: StripPoint, threshold: f64) -> Result<RatioSample> {
    check_domain(s)?;
    if n == 0 {
        return Err(Error::InvalidInput("ratio index starts at 1".into()));
    }
    let lower = PartialSums::new(s).advance_to(n);
    let upper = PartialSums::new(s.mirror()?).advance_to(n);
    sample(n, lower, upper, threshold)
}

/// `P_n(s)` for every `n` in `n_from..=n_to`; indices with a vanishing
/// denominator are returned separately.
pub fn ratio_range(
    s: StripPoint,
    n_from: u64,
    n_to: u64,
    threshold: f64,
) -> Result<(Vec<RatioSample>, Vec<u64>)> {
    check_domain(s)?;
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for (n, lo, up) in DualSums::new(s)?.skip(n_from.saturating_sub(1) as usize) {
        if n > n_to {
            break;
        }
        match sample(n, lo, up, threshold) {
            Ok(r) => samples.push(r),
            Err(_) => skipped.push(n),
        }
    }
    Ok((samples, skipped))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSumEvent {
    pub n: u64,
    /// `|S_n(s)|`.
    pub magnitude: f64,
    /// `n ≤ n_o(s)`.
    pub below_n_o: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumScan {
    pub events: Vec<ZeroSumEvent>,
    pub n_o: u64,
    /// Index and value of the smallest `|S_n(s)|` over the scan.
    pub argmin: (u64, f64),
}

impl ZeroSumScan {
    /// Events beyond `n_o`; at most one is possible for an exact zero.
    pub fn flagged(&self) -> impl Iterator<Item = &ZeroSumEvent> {
        self.events.iter().filter(|e| !e.below_n_o)
    }
}

/// Every `n ≤ n_max` with `|S_n(s)| < threshold`, classified against `n_o(s)`.
pub fn detect_zero_sums(s: StripPoint, n_max: u64, threshold: f64) -> Result<ZeroSumScan> {
    if n_max == 0 || n_max > DEFAULT_SCAN_CEILING {
        return Err(Error::InvalidInput(format!(
            "n_max must lie in [1, 1e7], got {n_max}"
        )));
    }
    let n_o = scan_n_o(s, DEFAULT_WINDOW, DEFAULT_SCAN_CEILING)?.last_failure;
    let mut events = Vec::new();
    let mut argmin = (0, f64::INFINITY);
    for st in PartialSums::new(s).take(n_max as usize) {
        let magnitude = st.sum.norm();
        if magnitude < argmin.1 {
            argmin = (st.n, magnitude);
        }
        if magnitude < threshold {
            events.push(ZeroSumEvent {
                n: st.n,
                magnitude,
                below_n_o: st.n <= n_o,
            });
        }
    }
    Ok(ZeroSumScan {
        events,
        n_o,
        argmin,
    })
}

/// Index and value of the smallest `|S_n(s)|` over `n_from..=n_to`.
pub fn argmin_partial_sum(s: StripPoint, n_from: u64, n_to: u64) -> (u64, f64) {
    PartialSums::new(s)
        .take(n_to as usize)
        .filter(|st| st.n >= n_from)
        .map(|st| (st.n, st.sum.norm()))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub value: Complex64,
    /// Largest index that entered the estimate.
    pub n_used: u64,
    /// `|P_odd - P_even|` for the last odd and even indices.
    pub residual: f64,
    /// `|value|` no larger than `max(tol, residual)`.
    pub zero_flag: bool,
    /// Indices skipped because `|S_n(s)|` vanished.
    pub skipped: u64,
}

impl LimitEstimate {
    pub fn converged(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// `L(s)` estimated by the mean of the last odd- and even-indexed ratios.
pub fn limit_estimate(s: StripPoint, n_max: u64, tol: f64) -> Result<LimitEstimate> {
    check_domain(s)?;
    if n_max < 2 {
        return Err(Error::InvalidInput("limit estimate needs n_max ≥ 2".into()));
    }
    let mut last: [Option<(u64, Complex64)>; 2] = [None, None];
    let mut skipped = 0;
    for (n, lo, up) in DualSums::new(s)?.take(n_max as usize) {
        match sample(n, lo, up, DEFAULT_ZERO_THRESHOLD) {
            Ok(r) => last[(n % 2) as usize] = Some((n, r.value)),
            Err(_) => skipped += 1,
        }
    }
    let (even, odd) = match (last[0], last[1]) {
        (Some(e), Some(o)) => (e, o),
        _ => {
            return Err(Error::ZeroDenominator {
                n: None,
                magnitude: 0.0,
            })
        }
    };
    let value = 0.5 * (even.1 + odd.1);
    let residual = (even.1 - odd.1).norm();
    Ok(LimitEstimate {
        value,
        n_used: even.0.max(odd.0),
        residual,
        zero_flag: value.norm() <= tol.max(residual),
        skipped,
    })
}

/// Sign pattern of `|P_n(s)| - |P(s)|` along `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub n_from: u64,
    pub n_to: u64,
    /// `-1`, `0` or `+1` per index; `0` when within `1e-12` of `|P(s)|`.
    pub signs: Vec<i8>,
    /// Fraction of consecutive nonzero pairs with opposite signs.
    pub alternation_rate: f64,
    /// Run length → number of runs of equal nonzero sign.
    pub run_lengths: BTreeMap<usize, usize>,
}

/// Which side of `|P(s)|` each `|P_n(s)|` falls on for `n ∈ [n_from, n_to]`.
///
/// The side pattern is only meaningful past `m(s)`; choosing the range is left
/// to the caller since `m` can be large at big `t`.
pub fn envelope_diagnostics(s: StripPoint, n_from: u64, n_to: u64) -> Result<EnvelopeReport> {
    check_domain(s)?;
    if n_from == 0 || n_to < n_from {
        return Err(Error::InvalidInput(format!(
            "bad index range [{n_from}, {n_to}]"
        )));
    }
    let target = crate::functional::p_modulus(s)?;
    let (samples, _) = ratio_range(s, n_from, n_to, DEFAULT_ZERO_THRESHOLD)?;
    let signs: Vec<i8> = samples
        .iter()
        .map(|r| {
            let d = r.value.norm() - target;
            if d.abs() <= 1e-12 {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();

    let nonzero: Vec<i8> = signs.iter().copied().filter(|&x| x != 0).collect();
    let pairs = nonzero.len().saturating_sub(1);
    let flips = nonzero.windows(2).filter(|w| w[0] != w[1]).count();
    let alternation_rate = if pairs == 0 {
        0.0
    } else {
        flips as f64 / pairs as f64
    };

    let mut run_lengths = BTreeMap::new();
    let mut run = 0usize;
    for (i, &x) in nonzero.iter().enumerate() {
        run += 1;
        if i + 1 == nonzero.len() || nonzero[i + 1] != x {
            *run_lengths.entry(run).or_insert(0) += 1;
            run = 0;
        }
    }
    Ok(EnvelopeReport {
        n_from,
        n_to,
        signs,
        alternation_rate,
        run_lengths,
    })
}

/// `|P_n(½-α+it)|` with the default zero threshold.
fn ratio_modulus(n: u64, alpha: f64, t: f64) -> Result<f64> {
    Ok(ratio_p_n(n, StripPoint::from_alpha(alpha, t)?)?
        .value
        .norm())
}

/// Sign changes of `|P_n| - |P_m|` along an α-grid at fixed `t`.
pub fn alpha_sign_changes(n: u64, m: u64, t: f64, alpha_grid: &[f64]) -> Result<usize> {
    if n == m {
        return Ok(0);
    }
    let mut previous = 0i8;
    let mut changes = 0;
    for &alpha in alpha_grid {
        let d = ratio_modulus(n, alpha, t)? - ratio_modulus(m, alpha, t)?;
        let sign = if d.abs() <= 1e-13 {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        };
        if sign != 0 {
            if previous != 0 && sign != previous {
                changes += 1;
            }
            previous = sign;
        }
    }
    Ok(changes)
}

/// Central difference `∂/∂α |P_n(½-α+it)|`; at `α = 0` a one-sided forward difference.
pub fn alpha_fd_slope(n: u64, t: f64, alpha: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) || alpha < 0.0 || alpha + step >= 0.5 {
        return Err(Error::InvalidInput(format!(
            "α ± step must stay in [0, 1/2): α = {alpha}, step = {step}"
        )));
    }
    if alpha - step < 0.0 {
        return Ok((ratio_modulus(n, alpha + step, t)? - ratio_modulus(n, alpha, t)?) / step);
    }
    Ok((ratio_modulus(n, alpha + step, t)? - ratio_modulus(n, alpha - step, t)?) / (2.0 * step))
}

/// `|S_{m+j}(s) - S_m(s)|`, which tends to `|R_m(s)|` as `j → ∞`.
pub fn vertex_distance(m: u64, j: u64, s: StripPoint) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidInput("vertex distance needs j ≥ 1".into()));
    }
    let mut stream = PartialSums::new(s);
    let sm = stream.advance_to(m);
    let smj = stream.advance_to(m + j);
    Ok((smj - sm).norm())
}
