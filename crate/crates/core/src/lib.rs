//! Numerical laboratory for the alternating Dirichlet series
//! `η(s) = 1 - 2^-s + 3^-s - ...` inside the critical strip.
//!
//! The crate covers the partial sums `S_n(s)` and their segment geometry,
//! a high-accuracy reference evaluator for `η` and `ζ`, the nested-disk
//! machinery that brackets the remainders `R_n(s)`, the functional-equation
//! ratio `P(s)`, the partial-sum ratios `P_n(s) = S_n(1-s̄)/S_n(s)`, and grid
//! scans over `(α, t)` for the eta-ratio bounds.
//!
//! All public functions are pure. Scans parallelise across independent
//! points and always return results in grid order.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod conjecture;
mod error;
pub mod functional;
pub mod gamma;
pub mod oracle;
pub mod orbit;
pub mod ratio;
pub mod series;
mod strip;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use strip::StripPoint;

/// Complex quantities used throughout the crate.
pub type ComplexValue = Complex64;

pub use functional::{big_p, FunctionalRatio};
pub use oracle::{eta, zeta, EtaOracle, OracleValue, RemainderRecord};
pub use orbit::{OrbitDiagnostics, RemainderBound};
pub use series::{eta_term, partial_sum, PartialSums, SeriesState};

/// `2π / ln 2`, the spacing of the poles of `1/(1 - 2^(1-s))` along `Re(s) = 1`.
pub const TWO_PI_OVER_LN2: f64 = 2.0 * std::f64::consts::PI / std::f64::consts::LN_2;

/// `2π + 1`, the lower end of the `t` range on which the eta-ratio bounds are stated.
pub const CONJECTURE_T_MIN: f64 = 2.0 * std::f64::consts::PI + 1.0;
