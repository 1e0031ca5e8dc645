use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

/// A point `s = σ + it` with `σ > 0`, carrying `α = ½ - σ`.
///
/// Most of the crate works inside the critical strip `0 < σ < 1`; the
/// oracle also accepts `σ ≥ 1` for reference values such as `η(1)` or `ζ(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripPoint {
    sigma: f64,
    t: f64,
    alpha: f64,
}

impl StripPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() || !t.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite point {sigma} + {t}i"
            )));
        }
        if sigma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(StripPoint {
            sigma,
            t,
            alpha: 0.5 - sigma,
        })
    }

    /// `s = ½ - α + it`. The stored α is exactly the argument.
    pub fn from_alpha(alpha: f64, t: f64) -> Result<Self> {
        let mut p = Self::new(0.5 - alpha, t)?;
        p.alpha = alpha;
        Ok(p)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    /// `0 < σ < 1`.
    pub fn in_strip(&self) -> bool {
        self.sigma > 0.0 && self.sigma < 1.0
    }

    /// Membership in the open left half strip `0 < σ < ½`.
    pub fn in_left_half(&self) -> bool {
        self.sigma > 0.0 && self.sigma < 0.5
    }

    /// The companion point `(1 - σ) + it`.
    ///
    /// The imaginary part keeps its sign, so this is `1 - s̄` rather than
    /// `1 - s`; every modulus is the same for both.
    pub fn mirror(&self) -> Result<Self> {
        let mut p = Self::new(1.0 - self.sigma, self.t)?;
        p.alpha = -self.alpha;
        Ok(p)
    }

    pub fn conj(&self) -> Self {
        StripPoint {
            t: -self.t,
            ..*self
        }
    }

    /// Same σ, `|t|`.
    pub(crate) fn upper(&self) -> Self {
        StripPoint {
            t: self.t.abs(),
            ..*self
        }
    }
}

impl fmt::Display for StripPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t < 0.0 {
            write!(f, "{} - {}i", self.sigma, -self.t)
        } else {
            write!(f, "{} + {}i", self.sigma, self.t)
        }
    }
}
