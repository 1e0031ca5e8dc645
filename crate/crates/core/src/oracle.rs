//! Reference values for `η(s)`, `ζ(s)` and remainders `R_n(s)`.
//!
//! Evaluation uses the Cohen–Rodriguez Villegas–Zagier acceleration of the
//! alternating series (their "Algorithm 1"), which never touches the direct
//! partial-sum path in [`crate::series`]. The term count is
//! `ceil(1.31·D + 0.9·|t|)` for `D` requested decimals; the error is then
//! certified by re-running with a few more terms and adding a rounding
//! budget for the term phases `t ln k`.

use num_complex::Complex64;

use crate::series::{CompensatedSum, PartialSums};
use crate::{Error, Result, StripPoint, TWO_PI_OVER_LN2};

/// Smallest error target the oracle accepts.
pub const MIN_TARGET_ERROR: f64 = 1e-13;

/// Default target used by scans and CLI commands.
pub const DEFAULT_TARGET_ERROR: f64 = 1e-10;

/// Above this the weight normaliser `(3+√8)^n` leaves the f64 range.
const HARD_MAX_TERMS: usize = 390;

const EXTRA_TERMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub abs_error_bound: f64,
}

impl OracleValue {
    /// `|value| < 10 · abs_error_bound`: the value may be an exact zero.
    pub fn zero_indistinguishable(&self) -> bool {
        self.value.norm() < 10.0 * self.abs_error_bound
    }
}

/// `R_n(s) = η(s) - S_n(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderRecord {
    pub n: u64,
    pub value: Complex64,
    pub magnitude: f64,
    /// Error bound inherited from the oracle value of `η(s)`.
    pub abs_error_bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct EtaOracle {
    /// Term-count ceiling; clamped to what the weights can represent.
    pub max_terms: usize,
}

impl Default for EtaOracle {
    fn default() -> Self {
        EtaOracle {
            max_terms: HARD_MAX_TERMS,
        }
    }
}

/// Accelerated sum with `n` terms and its rounding budget, reusing `terms`.
fn accelerated(terms: &[Complex64], rounding_weights: &[f64], n: usize) -> (Complex64, f64) {
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut acc = CompensatedSum::new();
    let mut budget = 0.0;
    for k in 0..n {
        c = b - c;
        acc.add(terms[k] * (c / d));
        budget += (c / d).abs() * rounding_weights[k];
        let kf = k as f64;
        let nf = n as f64;
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    (acc.value(), f64::EPSILON * budget)
}

impl EtaOracle {
    pub fn with_max_terms(max_terms: usize) -> Self {
        EtaOracle {
            max_terms: max_terms.min(HARD_MAX_TERMS),
        }
    }

    /// Starting term count for `target_error` at height `t`.
    pub fn initial_terms(target_error: f64, t: f64) -> usize {
        let digits = -target_error.log10();
        (1.31 * digits + 0.9 * t.abs()).ceil().max(4.0) as usize
    }

    /// `η(s)` with `|value - η(s)| ≤ abs_error_bound ≤ target_error`.
    pub fn eta(&self, s: StripPoint, target_error: f64) -> Result<OracleValue> {
        if !(target_error >= MIN_TARGET_ERROR) {
            return Err(Error::InvalidInput(format!(
                "target error {target_error:e} below floor {MIN_TARGET_ERROR:e}"
            )));
        }
        let upper = s.upper();
        let sigma = upper.sigma();
        let t = upper.t();
        let max_terms = self.max_terms.min(HARD_MAX_TERMS);

        let mut n = Self::initial_terms(target_error, t);
        let mut best = f64::INFINITY;
        while n + EXTRA_TERMS <= max_terms {
            let m = n + EXTRA_TERMS;
            let mut terms = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for k in 0..m {
                let ln_k = ((k + 1) as f64).ln();
                let mag = (-sigma * ln_k).exp();
                let (sin, cos) = (t * ln_k).sin_cos();
                terms.push(Complex64::new(mag * cos, -mag * sin));
                weights.push(mag * (2.0 + (sigma + t) * ln_k));
            }
            let (coarse, _) = accelerated(&terms, &weights, n);
            let (fine, rounding) = accelerated(&terms, &weights, m);
            let bound = (fine - coarse).norm() + rounding;
            if !fine.re.is_finite() || !fine.im.is_finite() {
                return Err(Error::NonFinite("eta oracle"));
            }
            if bound <= target_error {
                let value = if s.t() < 0.0 { fine.conj() } else { fine };
                return Ok(OracleValue {
                    value,
                    abs_error_bound: bound,
                });
            }
            best = best.min(bound);
            // truncation not the issue once the difference is below the rounding budget
            if (fine - coarse).norm() < rounding {
                break;
            }
            n += (n / 4).max(EXTRA_TERMS);
        }
        Err(Error::AccuracyUnreachable {
            sigma,
            t: s.t(),
            target: target_error,
            achieved: best,
        })
    }

    /// `ζ(s) = η(s) / (1 - 2^(1-s))`.
    pub fn zeta(&self, s: StripPoint, target_error: f64) -> Result<OracleValue> {
        let k = (s.t() / TWO_PI_OVER_LN2).round();
        let pole = Complex64::new(1.0, k * TWO_PI_OVER_LN2);
        if (s.to_complex() - pole).norm() < 1e-9 {
            return Err(Error::DenominatorPole {
                sigma: s.sigma(),
                t: s.t(),
            });
        }
        let denom = two_power_factor(s.to_complex());
        let e = self.eta(s, target_error)?;
        let scale = 1.0 / denom.norm();
        Ok(OracleValue {
            value: e.value / denom,
            abs_error_bound: e.abs_error_bound * scale,
        })
    }

    /// `R_n(s)`; `n = 0` gives `η(s)` itself.
    pub fn remainder(&self, n: u64, s: StripPoint, target_error: f64) -> Result<RemainderRecord> {
        let e = self.eta(s, target_error)?;
        let value = e.value - PartialSums::new(s).advance_to(n);
        Ok(RemainderRecord {
            n,
            value,
            magnitude: value.norm(),
            abs_error_bound: e.abs_error_bound,
        })
    }

    /// `R_n(s)` for every `n` in `n_from..=n_to`, sharing one `η` evaluation and one stream.
    pub fn remainders(
        &self,
        s: StripPoint,
        n_from: u64,
        n_to: u64,
        target_error: f64,
    ) -> Result<Vec<RemainderRecord>> {
        let e = self.eta(s, target_error)?;
        let mut stream = PartialSums::new(s);
        let mut out = Vec::with_capacity(n_to.saturating_sub(n_from) as usize + 1);
        for n in n_from..=n_to {
            let value = e.value - stream.advance_to(n);
            out.push(RemainderRecord {
                n,
                value,
                magnitude: value.norm(),
                abs_error_bound: e.abs_error_bound,
            });
        }
        Ok(out)
    }
}

/// `1 - 2^(1-s)`.
pub(crate) fn two_power_factor(s: Complex64) -> Complex64 {
    let e = Complex64::new(1.0, 0.0) - s;
    Complex64::new(1.0, 0.0) - (e * std::f64::consts::LN_2).exp()
}

/// [`EtaOracle::eta`] with default settings.
pub fn eta(s: StripPoint, target_error: f64) -> Result<OracleValue> {
    EtaOracle::default().eta(s, target_error)
}

/// [`EtaOracle::zeta`] with default settings.
pub fn zeta(s: StripPoint, target_error: f64) -> Result<OracleValue> {
    EtaOracle::default().zeta(s, target_error)
}

/// [`EtaOracle::remainder`] with default settings.
pub fn remainder(n: u64, s: StripPoint, target_error: f64) -> Result<RemainderRecord> {
    EtaOracle::default().remainder(n, s, target_error)
}
