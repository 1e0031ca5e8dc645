//! Terms, partial sums and segment geometry of `Σ (-1)^(n-1) n^(-s)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::StripPoint;

/// Neumaier-compensated accumulator for complex sums.
///
/// Each component carries its own running compensation; `value()` folds it back in.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

#[inline]
fn two_sum(acc: f64, comp: &mut f64, x: f64) -> f64 {
    let s = acc + x;
    if acc.abs() >= x.abs() {
        *comp += (acc - s) + x;
    } else {
        *comp += (x - s) + acc;
    }
    s
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, &mut self.comp.re, x.re);
        self.sum.im = two_sum(self.sum.im, &mut self.comp.im, x.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `n^(-σ) e^(-i t ln n)` for `t ≥ 0`, given `ln n`.
#[inline]
fn unsigned_term(ln_n: f64, sigma: f64, t_abs: f64) -> Complex64 {
    let mag = (-sigma * ln_n).exp();
    let (sin, cos) = (t_abs * ln_n).sin_cos();
    Complex64::new(mag * cos, -mag * sin)
}

/// The `n`-th term `(-1)^(n-1) n^(-s)`.
///
/// Negative `t` is evaluated at `|t|` and conjugated.
///
/// # Panics
/// If `n == 0`.
pub fn eta_term(n: u64, s: StripPoint) -> Complex64 {
    assert!(n >= 1, "series index starts at 1");
    let ln_n = (n as f64).ln();
    let mut z = unsigned_term(ln_n, s.sigma(), s.t().abs());
    if n.is_multiple_of(2) {
        z = -z;
    }
    if s.t() < 0.0 {
        z = z.conj();
    }
    z
}

/// State of the partial-sum stream after `n` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesState {
    pub n: u64,
    /// `S_n(s)`.
    pub sum: Complex64,
    /// The `n`-th term.
    pub last_term: Complex64,
}

/// Streaming iterator over `S_1(s), S_2(s), ...` with compensated accumulation.
#[derive(Debug, Clone)]
pub struct PartialSums {
    sigma: f64,
    t_abs: f64,
    conj: bool,
    n: u64,
    acc: CompensatedSum,
}

impl PartialSums {
    pub fn new(s: StripPoint) -> Self {
        PartialSums {
            sigma: s.sigma(),
            t_abs: s.t().abs(),
            conj: s.t() < 0.0,
            n: 0,
            acc: CompensatedSum::new(),
        }
    }

    /// Index of the last emitted state (0 before the first call to `next`).
    pub fn index(&self) -> u64 {
        self.n
    }

    pub fn current(&self) -> Complex64 {
        let v = self.acc.value();
        if self.conj {
            v.conj()
        } else {
            v
        }
    }

    /// Advances to index `n` and returns `S_n`; a no-op if already at or past `n`.
    pub fn advance_to(&mut self, n: u64) -> Complex64 {
        while self.n < n {
            self.step();
        }
        self.current()
    }

    #[inline]
    fn step(&mut self) -> Complex64 {
        self.n += 1;
        let mut term = unsigned_term((self.n as f64).ln(), self.sigma, self.t_abs);
        if self.n.is_multiple_of(2) {
            term = -term;
        }
        self.acc.add(term);
        term
    }
}

impl Iterator for PartialSums {
    type Item = SeriesState;

    #[inline]
    fn next(&mut self) -> Option<SeriesState> {
        let mut term = self.step();
        let mut sum = self.acc.value();
        if self.conj {
            term = term.conj();
            sum = sum.conj();
        }
        Some(SeriesState {
            n: self.n,
            sum,
            last_term: term,
        })
    }
}

/// `S_n(s) = Σ_{k=1..n} (-1)^(k-1) k^(-s)`; `S_0 = 0`.
pub fn partial_sum(n: u64, s: StripPoint) -> Complex64 {
    PartialSums::new(s).advance_to(n)
}

/// Direction of segment `n`: `-t ln n` for odd `n`, `π - t ln n` for even `n`.
pub fn segment_angle(n: u64, t: f64) -> f64 {
    assert!(n >= 1, "series index starts at 1");
    let base = -t * (n as f64).ln();
    if n.is_multiple_of(2) {
        PI + base
    } else {
        base
    }
}

/// Acute angle between segments `n` and `n+1`: `δ_{n+1} = t ln((n+1)/n)`.
pub fn turn_angle(n: u64, t: f64) -> f64 {
    assert!(n >= 1, "series index starts at 1");
    t * (1.0 / n as f64).ln_1p()
}

/// Segment `n` of the partial-sum path, from `S_{n-1}` to `S_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub n: u64,
    pub start: Complex64,
    pub end: Complex64,
    /// `n^(-σ)`.
    pub length: f64,
    /// Angle with the real axis per [`segment_angle`].
    pub theta: f64,
}

/// Segments `1..=n_max` of the path at `s`.
pub fn segments(s: StripPoint, n_max: u64) -> impl Iterator<Item = Segment> {
    let sigma = s.sigma();
    let t = s.t();
    let mut prev = Complex64::new(0.0, 0.0);
    PartialSums::new(s).take(n_max as usize).map(move |st| {
        let seg = Segment {
            n: st.n,
            start: prev,
            end: st.sum,
            length: (-(sigma) * (st.n as f64).ln()).exp(),
            theta: segment_angle(st.n, t),
        };
        prev = st.sum;
        seg
    })
}
