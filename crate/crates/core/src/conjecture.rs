//! Grid scans of `|η(½+α+it) / η(½-α+it)|` over `(α, t)`: bound checks,
//! α-monotonicity of `|P|`, and the extrema structure along `t`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::functional::{bounds_unchecked, p_modulus};
use crate::oracle::{EtaOracle, OracleValue, DEFAULT_TARGET_ERROR};
use crate::{Error, Result, StripPoint, CONJECTURE_T_MIN};

/// Uniform grid over `α ∈ [alpha_from, alpha_to]`, `t ∈ [t_from, t_to]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub alpha_from: f64,
    pub alpha_to: f64,
    pub alpha_step: f64,
    pub t_from: f64,
    pub t_to: f64,
    pub t_step: f64,
}

impl Default for ScanGrid {
    /// α step 0.01 over `[0, 0.49]`, t step 0.25 over `[2π+1, 120]`.
    fn default() -> Self {
        ScanGrid {
            alpha_from: 0.0,
            alpha_to: 0.49,
            alpha_step: 0.01,
            t_from: CONJECTURE_T_MIN,
            t_to: 120.0,
            t_step: 0.25,
        }
    }
}

/// `from, from + step, ...` up to `to`; the count is rounded so that a
/// range that is an exact multiple of the step includes its end point.
pub fn grid_axis(from: f64, to: f64, step: f64) -> Vec<f64> {
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| from + i as f64 * step).collect()
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.alpha_step > 0.0 && self.t_step > 0.0) {
            return bad("grid steps must be positive".into());
        }
        if !(self.alpha_from >= 0.0 && self.alpha_to < 0.5 && self.alpha_from <= self.alpha_to) {
            return bad(format!(
                "alpha range [{}, {}] not inside [0, 1/2)",
                self.alpha_from, self.alpha_to
            ));
        }
        if !(self.t_from > 0.0 && self.t_to <= 200.0 && self.t_from <= self.t_to) {
            return bad(format!(
                "t range [{}, {}] not inside (0, 200]",
                self.t_from, self.t_to
            ));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<f64> {
        grid_axis(self.alpha_from, self.alpha_to, self.alpha_step)
    }

    pub fn ts(&self) -> Vec<f64> {
        grid_axis(self.t_from, self.t_to, self.t_step)
    }

    /// Grid points in `(t, α)` order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let alphas = self.alphas();
        self.ts()
            .into_iter()
            .flat_map(|t| alphas.iter().map(move |&a| (a, t)))
            .collect()
    }

    pub fn cardinality(&self) -> usize {
        self.alphas().len() * self.ts().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheckRecord {
    pub alpha: f64,
    pub t: f64,
    /// `|η(½+α+it) / η(½-α+it)|`.
    pub ratio: f64,
    /// Propagated oracle error of `ratio`.
    pub ratio_error: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass_lower: bool,
    pub pass_upper: bool,
    /// `t < 2π + 1`: bounds are evaluated but not claimed there.
    pub informational: bool,
}

impl BoundCheckRecord {
    pub fn is_violation(&self) -> bool {
        !self.informational && !(self.pass_lower && self.pass_upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedPoint {
    pub alpha: f64,
    pub t: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureScan {
    pub records: Vec<BoundCheckRecord>,
    pub violations: Vec<BoundCheckRecord>,
    pub skipped: Vec<SkippedPoint>,
}

/// `|η(½+α+it)| / |η(½-α+it)|` with its error, or `None` if the denominator may vanish.
pub fn eta_ratio(alpha: f64, t: f64, target_error: f64) -> Result<Option<(f64, f64)>> {
    let oracle = EtaOracle::default();
    let den: OracleValue = oracle.eta(StripPoint::from_alpha(alpha, t)?, target_error)?;
    if den.zero_indistinguishable() {
        return Ok(None);
    }
    if alpha == 0.0 {
        return Ok(Some((1.0, 0.0)));
    }
    let num = oracle.eta(StripPoint::from_alpha(-alpha, t)?, target_error)?;
    let ratio = num.value.norm() / den.value.norm();
    let err = ratio
        * (num.abs_error_bound / num.value.norm().max(f64::MIN_POSITIVE)
            + den.abs_error_bound / den.value.norm());
    Ok(Some((ratio, err)))
}

/// Bounds check at a single grid point; `Ok(Err(_))` when the point is skipped.
pub fn check_point(
    alpha: f64,
    t: f64,
    target_error: f64,
) -> Result<std::result::Result<BoundCheckRecord, SkippedPoint>> {
    let Some((ratio, ratio_error)) = eta_ratio(alpha, t, target_error)? else {
        return Ok(Err(SkippedPoint {
            alpha,
            t,
            reason: "eta(1/2 - alpha + it) is zero-indistinguishable",
        }));
    };
    let b = bounds_unchecked(alpha, t);
    Ok(Ok(BoundCheckRecord {
        alpha,
        t,
        ratio,
        ratio_error,
        lower: b.lower,
        upper: b.upper,
        pass_lower: b.lower <= ratio + ratio_error,
        pass_upper: ratio - ratio_error <= b.upper,
        informational: t < CONJECTURE_T_MIN,
    }))
}

/// Checks the bounds at every grid point. Results are in `(t, α)` order
/// regardless of how rayon schedules the work.
pub fn scan_conjecture(grid: &ScanGrid) -> Result<ConjectureScan> {
    scan_conjecture_with_target(grid, DEFAULT_TARGET_ERROR)
}

pub fn scan_conjecture_with_target(grid: &ScanGrid, target_error: f64) -> Result<ConjectureScan> {
    grid.validate()?;
    let outcomes: Vec<_> = grid
        .points()
        .into_par_iter()
        .map(|(alpha, t)| check_point(alpha, t, target_error))
        .collect::<Result<_>>()?;
    let mut scan = ConjectureScan {
        records: Vec::new(),
        violations: Vec::new(),
        skipped: Vec::new(),
    };
    for o in outcomes {
        match o {
            Ok(rec) => {
                if rec.is_violation() {
                    scan.violations.push(rec);
                }
                scan.records.push(rec);
            }
            Err(skip) => scan.skipped.push(skip),
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub t: f64,
    /// `(α, |P(½-α+it)|)`.
    pub values: Vec<(f64, f64)>,
    /// Index `i` of the first pair with `values[i+1].1 ≥ values[i].1`.
    pub first_violation: Option<usize>,
}

impl MonotonicityReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Strict decrease of `|P(½-α+it)|` over an ascending α-grid.
pub fn scan_monotonicity(t: f64, alpha_grid: &[f64]) -> Result<MonotonicityReport> {
    if !(t >= CONJECTURE_T_MIN) {
        return Err(Error::InvalidInput(format!(
            "t must be at least 2π + 1, got {t}"
        )));
    }
    if alpha_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "alpha grid must be strictly ascending".into(),
        ));
    }
    let values = alpha_grid
        .iter()
        .map(|&a| Ok((a, p_modulus(StripPoint::from_alpha(a, t)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let first_violation = values.windows(2).position(|w| w[1].1 >= w[0].1);
    Ok(MonotonicityReport {
        t,
        values,
        first_violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
    /// Nearest multiple `k·π/ln 2` of the expected parity (even for minima, odd for maxima).
    pub nearest_multiple: i64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaReport {
    pub alpha: f64,
    pub minima: Vec<Extremum>,
    pub maxima: Vec<Extremum>,
    /// `(k, minima, maxima)` for each window `[(2k-1)·π/ln2, (2k+1)·π/ln2)`
    /// fully inside the scanned range.
    pub per_window: Vec<(i64, usize, usize)>,
    /// Points where the denominator was zero-indistinguishable.
    pub skipped: usize,
}

fn nearest_of_parity(t: f64, odd: bool) -> (i64, f64) {
    let unit = PI / std::f64::consts::LN_2;
    let x = t / unit;
    let k = if odd {
        2 * ((x - 1.0) / 2.0).round() as i64 + 1
    } else {
        2 * (x / 2.0).round() as i64
    };
    (k, (t - k as f64 * unit).abs())
}

/// Local extrema of the eta ratio along `t` at fixed `α`, after a 3-point
/// moving average.
pub fn extrema_structure(alpha: f64, t_from: f64, t_to: f64, t_step: f64) -> Result<ExtremaReport> {
    extrema_structure_with_target(alpha, t_from, t_to, t_step, DEFAULT_TARGET_ERROR)
}

pub fn extrema_structure_with_target(
    alpha: f64,
    t_from: f64,
    t_to: f64,
    t_step: f64,
    target_error: f64,
) -> Result<ExtremaReport> {
    if !(t_step > 0.0 && t_step <= 0.01) {
        return Err(Error::InvalidInput(format!(
            "t_step must be in (0, 0.01], got {t_step}"
        )));
    }
    if !(0.0..0.5).contains(&alpha) || !(t_from > 0.0 && t_to > t_from) {
        return Err(Error::InvalidInput("invalid alpha or t range".into()));
    }
    let ts = grid_axis(t_from, t_to, t_step);
    let raw: Vec<Option<f64>> = ts
        .par_iter()
        .map(|&t| Ok(eta_ratio(alpha, t, target_error)?.map(|(r, _)| r)))
        .collect::<Result<_>>()?;
    let skipped = raw.iter().filter(|r| r.is_none()).count();
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(&raw)
        .filter_map(|(&t, r)| r.map(|r| (t, r)))
        .collect();

    let smooth: Vec<(f64, f64)> = pts
        .windows(3)
        .map(|w| (w[1].0, (w[0].1 + w[1].1 + w[2].1) / 3.0))
        .collect();

    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for w in smooth.windows(3) {
        let (t, v) = w[1];
        if v < w[0].1 && v < w[2].1 {
            let (k, d) = nearest_of_parity(t, false);
            minima.push(Extremum {
                t,
                value: v,
                nearest_multiple: k,
                distance: d,
            });
        } else if v > w[0].1 && v > w[2].1 {
            let (k, d) = nearest_of_parity(t, true);
            maxima.push(Extremum {
                t,
                value: v,
                nearest_multiple: k,
                distance: d,
            });
        }
    }

    // windows of width 2π/ln 2 centred on the even multiples 2k·π/ln 2
    let unit = PI / std::f64::consts::LN_2;
    let first = ((t_from / unit + 1.0) / 2.0).ceil() as i64;
    let last = ((t_to / unit - 1.0) / 2.0).floor() as i64;
    let per_window = (first..=last)
        .map(|k| {
            let lo = (2 * k - 1) as f64 * unit;
            let hi = (2 * k + 1) as f64 * unit;
            let inside = |e: &&Extremum| e.t >= lo && e.t < hi;
            (
                k,
                minima.iter().filter(inside).count(),
                maxima.iter().filter(inside).count(),
            )
        })
        .collect();
    Ok(ExtremaReport {
        alpha,
        minima,
        maxima,
        per_window,
        skipped,
    })
}
