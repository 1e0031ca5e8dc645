use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The accelerated series could not certify the requested error.
    #[error("accuracy {target:e} unreachable at s = {sigma} + {t}i (best certified {achieved:e})")]
    AccuracyUnreachable {
        sigma: f64,
        t: f64,
        target: f64,
        achieved: f64,
    },

    /// `1 - 2^(1-s)` vanishes at `s = 1 + k·2π/ln 2 · i`.
    #[error("s = {sigma} + {t}i is on the pole set of 1/(1 - 2^(1-s))")]
    DenominatorPole { sigma: f64, t: f64 },

    /// The turn angle at `n` is not yet acute.
    #[error("index {n} is below the acute-angle threshold {threshold}")]
    AngleTooLarge { n: u64, threshold: u64 },

    #[error("no stable run of length {window} found below scan ceiling {ceiling}")]
    WindowExhausted { window: u64, ceiling: u64 },

    #[error("Gamma has a pole at {0}")]
    Pole(f64),

    /// A divisor is indistinguishable from zero; carries the offending index when there is one.
    #[error("denominator indistinguishable from zero (index {n:?}, magnitude {magnitude:e})")]
    ZeroDenominator { n: Option<u64>, magnitude: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
}
