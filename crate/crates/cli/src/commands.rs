//! One function per subcommand, each producing a [`Dataset`].

use crate::cache;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::format::{json_float, Cell, Dataset};
use crate::row;
use crate::zeros::{self, ZeroEntry};
use etaorbit::asymptotics::{check_dr2_minus_dc2, check_scaled_radius};
use etaorbit::conjecture::{self, ScanGrid};
use etaorbit::functional::{approx_deviation_scan, p_modulus, ApproxKind};
use etaorbit::oracle::EtaOracle;
use etaorbit::orbit::{dr2_minus_dc2, find_m_with_ceiling, nesting_numerator, sandwich_unchecked};
use etaorbit::ratio::{detect_zero_sums, envelope_diagnostics, limit_estimate, ratio_range};
use etaorbit::{big_p, Complex64, StripPoint};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::Path;

/// Largest `n_max` accepted by path and ratio exports.
pub const MAX_N: u64 = 10_000_000;

/// Default tolerance for `verify-zeros`.
pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-5;

/// Default threshold for reporting vanishing partial sums in `ratio`.
pub const DEFAULT_RATIO_ZERO_THRESHOLD: f64 = 1e-4;

/// Rows checked by the sandwich spot check in `orbit`.
pub const ORBIT_SPOT_CHECK: u64 = 100;


#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanKind {
    Conjecture,
    Monotonicity,
    Extrema,
}

impl ScanKind {
    fn name(self) -> &'static str {
        match self {
            ScanKind::Conjecture => "conjecture",
            ScanKind::Monotonicity => "monotonicity",
            ScanKind::Extrema => "extrema",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    Upper,
    Lower,
    Both,
}

/// A dataset plus whether it records a property violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub data: Dataset,
    pub violation: bool,
}

impl Report {
    fn ok(data: Dataset) -> Self {
        Report {
            data,
            violation: false,
        }
    }
}

fn schema(name: &str) -> String {
    format!("etaorbit/{name}/v1")
}

fn c_json(z: Complex64) -> Value {
    json!({ "re": json_float(z.re), "im": json_float(z.im), "abs": json_float(z.norm()) })
}

/// Half a unit in the last decimal of `x` as written in shortest form.
pub fn decimal_resolution(x: f64) -> f64 {
    let text = format!("{:?}", x.abs());
    let (mantissa, exp) = match text.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (text.as_str(), 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, f)| f.len() as i32) - exp;
    0.5 * 10f64.powi(-decimals)
}

fn oracle_eval(cfg: &RunConfig, zeta: bool) -> Result<Report> {
    let s = cfg.point()?;
    let oracle = EtaOracle::default();
    let eval = |p: StripPoint| {
        if zeta {
            oracle.zeta(p, cfg.precision)
        } else {
            oracle.eta(p, cfg.precision)
        }
    };
    let v = eval(s)?;
    let dt = decimal_resolution(s.t());
    let h = 1e-4;
    let slope = (eval(StripPoint::new(s.sigma(), s.t() + h)?)?.value
        - eval(StripPoint::new(s.sigma(), s.t() - h)?)?.value)
        .norm()
        / (2.0 * h);
    let zero =
        v.zero_indistinguishable() || v.value.norm() <= slope * dt + 10.0 * v.abs_error_bound;
    let mut d = Dataset::new(
        schema(if zeta { "zeta" } else { "eta" }),
        &[
            "sigma",
            "t",
            "re",
            "im",
            "abs",
            "abs_error_bound",
            "t_resolution",
            "zero_indistinguishable",
        ],
    );
    d.push(row![
        s.sigma(),
        s.t(),
        v.value.re,
        v.value.im,
        v.value.norm(),
        v.abs_error_bound,
        dt,
        zero
    ]);
    Ok(Report::ok(d))
}

pub fn cmd_eta(cfg: &RunConfig) -> Result<Report> {
    oracle_eval(cfg, false)
}

pub fn cmd_zeta(cfg: &RunConfig) -> Result<Report> {
    oracle_eval(cfg, true)
}

/// `n,re,im` for `S_n`, one row per stride step plus the final index.
/// With `mirror` the path of `1 - s̄` is exported instead.
pub fn cmd_path_export(cfg: &RunConfig, mirror: bool) -> Result<Report> {
    let mut s = cfg.point()?;
    if mirror {
        s = s.mirror()?;
    }
    let n_max = cfg.params.n_max.unwrap_or(1000);
    let stride = cfg.params.stride.unwrap_or(1);
    if n_max == 0 || n_max > MAX_N {
        return Err(CliError::Usage(format!(
            "--n-max must lie in [1, {MAX_N}], got {n_max}"
        )));
    }
    if stride == 0 {
        return Err(CliError::Usage("--stride must be positive".into()));
    }
    let mut d = Dataset::new(schema("path"), &["n", "re", "im"]);
    for st in etaorbit::PartialSums::new(s).take(n_max as usize) {
        if st.n % stride == 0 || st.n == n_max {
            d.push(row![st.n, st.sum.re, st.sum.im]);
        }
    }
    d.note("sigma", json_float(s.sigma()));
    d.note("t", json_float(s.t()));
    Ok(Report::ok(d))
}

pub fn cmd_orbit(cfg: &RunConfig) -> Result<Report> {
    let s = cfg.point()?;
    let diag = find_m_with_ceiling(s, cfg.epsilon, cfg.window, cfg.ceiling)?;
    let from = cfg
        .params
        .n_from
        .unwrap_or(diag.n_o.saturating_sub(500))
        .max(diag.n_threshold)
        .max(1);
    let to = cfg.params.n_to.unwrap_or(diag.n_o + 500).max(from);
    let stride = cfg.params.stride.unwrap_or(1).max(1);
    let mut d = Dataset::new(
        schema("orbit"),
        &["n", "nesting_numerator", "dr2_minus_dc2"],
    );
    let ns: Vec<u64> = (from..=to).step_by(stride as usize).collect();
    let rows: Vec<Vec<Cell>> = ns
        .par_iter()
        .map(|&n| Ok(row![n, nesting_numerator(n, s)?, dr2_minus_dc2(n, s)?]))
        .collect::<Result<_>>()?;
    d.rows = rows;
    let check = sandwich_unchecked(s, cfg.epsilon, diag.m + 1, diag.m + ORBIT_SPOT_CHECK)?;
    let failures = check.iter().filter(|b| !b.holds()).count();
    d.note("n_threshold", diag.n_threshold);
    d.note("n_o", diag.n_o);
    d.note("transition", diag.n_o + 1);
    d.note("j", diag.j);
    d.note("m", diag.m);
    d.note("epsilon", json_float(diag.epsilon));
    d.note("verified_window", diag.verified_window);
    d.note("multiple_transitions", diag.multiple_transitions);
    d.note("sandwich_checked", check.len());
    d.note("sandwich_violations", failures);
    Ok(Report {
        data: d,
        violation: failures > 0,
    })
}

pub fn cmd_sandwich(cfg: &RunConfig, with_asymptotics: bool) -> Result<Report> {
    let s = cfg.point()?;
    let diag = find_m_with_ceiling(s, cfg.epsilon, cfg.window, cfg.ceiling)?;
    let from = cfg.params.n_from.unwrap_or(diag.m + 1);
    let to = cfg.params.n_to.unwrap_or(diag.m + 5000);
    if from <= diag.m {
        return Err(CliError::Usage(format!(
            "--n-from must exceed m = {}, got {from}",
            diag.m
        )));
    }
    let bounds = sandwich_unchecked(s, cfg.epsilon, from, to)?;
    let mut header = vec!["n", "lower", "measured", "upper", "holds"];
    if with_asymptotics {
        header.extend([
            "dr2_dc2_exact",
            "dr2_dc2_leading",
            "dr2_dc2_ratio",
            "scaled_exact",
            "scaled_leading",
            "scaled_ratio",
        ]);
    }
    let mut d = Dataset::new(
        schema(if with_asymptotics {
            "sandwich-asymptotics"
        } else {
            "sandwich"
        }),
        &header,
    );
    d.rows = bounds
        .par_iter()
        .map(|b| {
            let mut r = row![b.n, b.lower, b.measured, b.upper, b.holds()];
            if with_asymptotics {
                let a = check_dr2_minus_dc2(b.n, s)?;
                let h = check_scaled_radius(b.n, s, cfg.epsilon)?;
                r.extend(row![
                    a.exact, a.leading, a.ratio, h.exact, h.leading, h.ratio
                ]);
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let failures = bounds.iter().filter(|b| !b.holds()).count();
    d.note("n_o", diag.n_o);
    d.note("j", diag.j);
    d.note("m", diag.m);
    d.note("checked", bounds.len());
    d.note("violations", failures);
    Ok(Report {
        data: d,
        violation: failures > 0,
    })
}

pub fn cmd_ratio(cfg: &RunConfig) -> Result<Report> {
    let s = cfg.point()?;
    let n_max = cfg.params.n_max.unwrap_or(1_000_000);
    if !(2..=MAX_N).contains(&n_max) {
        return Err(CliError::Usage(format!(
            "--n-max must lie in [2, {MAX_N}], got {n_max}"
        )));
    }
    let stride = cfg.params.stride.unwrap_or((n_max / 1000).max(1)).max(1);
    let threshold = cfg
        .params
        .zero_threshold
        .unwrap_or(DEFAULT_RATIO_ZERO_THRESHOLD);
    let companion = s.mirror()?;

    let limit = limit_estimate(s, n_max, 1e-3)?;
    let p = big_p(s)?;
    let (samples, skipped) = ratio_range(s, 1, n_max, etaorbit::ratio::DEFAULT_ZERO_THRESHOLD)?;
    let mut d = Dataset::new(schema("ratio"), &["n", "re", "im", "abs"]);
    for r in samples.iter().filter(|r| r.n % stride == 0 || r.n == n_max) {
        d.push(row![r.n, r.value.re, r.value.im, r.value.norm()]);
    }

    let scans = [("s", s), ("companion", companion)]
        .into_par_iter()
        .map(|(label, pt)| detect_zero_sums(pt, n_max, threshold).map(|z| (label, z)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut events = Vec::new();
    let mut argmins = serde_json::Map::new();
    for (label, z) in &scans {
        argmins.insert(
            label.to_string(),
            json!({ "n": z.argmin.0, "abs": json_float(z.argmin.1), "n_o": z.n_o }),
        );
        for e in &z.events {
            events.push(json!({ "point": label, "n": e.n, "abs": json_float(e.magnitude), "below_n_o": e.below_n_o }));
        }
    }

    let env_from = n_max.saturating_sub(1000).max(1);
    let env = envelope_diagnostics(s, env_from, n_max)?;
    let runs: serde_json::Map<String, Value> = env
        .run_lengths
        .iter()
        .map(|(k, v)| (k.to_string(), Value::from(*v)))
        .collect();

    d.note("sigma", json_float(s.sigma()));
    d.note("t", json_float(s.t()));
    d.note("limit", c_json(limit.value));
    d.note("limit_n_used", limit.n_used);
    d.note("limit_residual", json_float(limit.residual));
    d.note("limit_zero_flag", limit.zero_flag);
    d.note("p", c_json(p.value));
    d.note(
        "limit_abs_minus_p_abs",
        json_float(limit.value.norm() - p.modulus()),
    );
    d.note("skipped_indices", skipped.len());
    d.note("zero_threshold", json_float(threshold));
    d.note("zero_events", Value::Array(events));
    d.note("partial_sum_argmin", Value::Object(argmins));
    d.note(
        "envelope",
        json!({
            "n_from": env.n_from,
            "n_to": env.n_to,
            "alternation_rate": json_float(env.alternation_rate),
            "run_lengths": runs,
        }),
    );
    Ok(Report::ok(d))
}

/// Canonical text hashed into the cache key.
pub fn scan_key(kind: ScanKind, grid: &ScanGrid, precision: f64) -> String {
    format!(
        "etaorbit-scan-v1\nwhich={}\nalpha={:?},{:?},{:?}\nt={:?},{:?},{:?}\nprecision={:?}\n",
        kind.name(),
        grid.alpha_from,
        grid.alpha_to,
        grid.alpha_step,
        grid.t_from,
        grid.t_to,
        grid.t_step,
        precision
    )
}

pub fn cmd_scan(cfg: &RunConfig, kind: ScanKind) -> Result<Report> {
    let key = scan_key(kind, &cfg.grid, cfg.precision);
    if let Some(dir) = &cfg.cache_dir {
        if let Some(hit) = cache::load(dir, &key) {
            if verify_cached(cfg, kind, &hit)? {
                return Ok(scan_report(hit));
            }
            eprintln!(
                "cache entry {} failed verification; recomputing",
                cache::digest(&key)
            );
        }
    }
    let data = match kind {
        ScanKind::Conjecture => scan_conjecture(cfg)?,
        ScanKind::Monotonicity => scan_monotonicity(cfg)?,
        ScanKind::Extrema => scan_extrema(cfg)?,
    };
    if let Some(dir) = &cfg.cache_dir {
        cache::store(dir, &key, &data)?;
    }
    Ok(scan_report(data))
}

fn scan_report(data: Dataset) -> Report {
    let violation = data
        .summary
        .get("violations")
        .and_then(Value::as_u64)
        .is_some_and(|v| v > 0);
    Report { data, violation }
}

fn verify_cached(cfg: &RunConfig, kind: ScanKind, data: &Dataset) -> Result<bool> {
    let Some(i) = cache::random_row(data) else {
        return Ok(true);
    };
    let row = &data.rows[i];
    let num = |c: usize| row.get(c).and_then(Cell::as_f64);
    let expected = match kind {
        ScanKind::Conjecture => {
            let (Some(t), Some(alpha)) = (num(0), num(1)) else {
                return Ok(false);
            };
            match conjecture::check_point(alpha, t, cfg.precision)? {
                Ok(r) => conjecture_row(&r),
                Err(_) => return Ok(false),
            }
        }
        ScanKind::Monotonicity => {
            let (Some(t), Some(alpha)) = (num(0), num(1)) else {
                return Ok(false);
            };
            row![t, alpha, p_modulus(StripPoint::from_alpha(alpha, t)?)?]
        }
        ScanKind::Extrema => {
            let Some(alpha) = num(0) else {
                return Ok(false);
            };
            let g = &cfg.grid;
            let r = conjecture::extrema_structure_with_target(
                alpha,
                g.t_from,
                g.t_to,
                g.t_step,
                cfg.precision,
            )?;
            let fresh = extrema_rows(&r);
            return Ok(fresh.iter().any(|f| cache::cells_agree(row, f)));
        }
    };
    Ok(cache::cells_agree(row, &expected))
}

fn conjecture_row(r: &conjecture::BoundCheckRecord) -> Vec<Cell> {
    row![
        r.t,
        r.alpha,
        r.ratio,
        r.ratio_error,
        r.lower,
        r.upper,
        r.pass_lower,
        r.pass_upper,
        r.informational
    ]
}

fn scan_conjecture(cfg: &RunConfig) -> Result<Dataset> {
    let scan = conjecture::scan_conjecture_with_target(&cfg.grid, cfg.precision)?;
    let mut d = Dataset::new(
        schema("scan-conjecture"),
        &[
            "t",
            "alpha",
            "ratio",
            "ratio_error",
            "lower",
            "upper",
            "pass_lower",
            "pass_upper",
            "informational",
        ],
    );
    d.rows = scan.records.iter().map(conjecture_row).collect();
    let min_gap = |f: fn(&conjecture::BoundCheckRecord) -> f64| {
        json_float(
            scan.records
                .iter()
                .filter(|r| r.alpha > 0.0)
                .map(f)
                .fold(f64::INFINITY, f64::min),
        )
    };
    d.note("grid_points", cfg.grid.cardinality());
    d.note("rows", scan.records.len());
    d.note("skipped", scan.skipped.len());
    d.note("violations", scan.violations.len());
    d.note("min_upper_margin", min_gap(|r| r.upper - r.ratio));
    d.note("min_lower_margin", min_gap(|r| r.ratio - r.lower));
    Ok(d)
}

fn scan_monotonicity(cfg: &RunConfig) -> Result<Dataset> {
    cfg.grid.validate()?;
    let alphas = cfg.grid.alphas();
    let reports: Vec<_> = cfg
        .grid
        .ts()
        .par_iter()
        .map(|&t| conjecture::scan_monotonicity(t, &alphas))
        .collect::<std::result::Result<_, _>>()?;
    let mut d = Dataset::new(
        schema("scan-monotonicity"),
        &["t", "alpha", "p_abs", "decreasing"],
    );
    let mut inversions = 0usize;
    for r in &reports {
        for (i, &(alpha, v)) in r.values.iter().enumerate() {
            let ok = i == 0 || v < r.values[i - 1].1;
            inversions += usize::from(!ok);
            d.push(row![r.t, alpha, v, ok]);
        }
    }
    d.note("t_values", reports.len());
    d.note("violations", inversions);
    Ok(d)
}

fn extrema_rows(r: &conjecture::ExtremaReport) -> Vec<Vec<Cell>> {
    let tag = |kind: &str, e: &conjecture::Extremum| {
        row![r.alpha, kind, e.t, e.value, e.nearest_multiple, e.distance]
    };
    let mut rows: Vec<Vec<Cell>> = r
        .minima
        .iter()
        .map(|e| tag("min", e))
        .chain(r.maxima.iter().map(|e| tag("max", e)))
        .collect();
    rows.sort_by(|a, b| {
        a[2].as_f64()
            .partial_cmp(&b[2].as_f64())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    rows
}

fn scan_extrema(cfg: &RunConfig) -> Result<Dataset> {
    let g = &cfg.grid;
    g.validate()?;
    let reports: Vec<_> = g
        .alphas()
        .par_iter()
        .filter(|&&a| a > 0.0)
        .map(|&a| {
            conjecture::extrema_structure_with_target(a, g.t_from, g.t_to, g.t_step, cfg.precision)
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut d = Dataset::new(
        schema("scan-extrema"),
        &[
            "alpha",
            "kind",
            "t",
            "value",
            "nearest_multiple",
            "distance",
        ],
    );
    let (mut windows, mut single_min, mut skipped) = (0usize, 0usize, 0usize);
    let (mut min_gap, mut max_gap) = (0.0f64, 0.0f64);
    for r in &reports {
        d.rows.extend(extrema_rows(r));
        windows += r.per_window.len();
        single_min += r.per_window.iter().filter(|w| w.1 == 1).count();
        skipped += r.skipped;
        min_gap = r.minima.iter().map(|e| e.distance).fold(min_gap, f64::max);
        max_gap = r.maxima.iter().map(|e| e.distance).fold(max_gap, f64::max);
    }
    d.note("alphas", reports.len());
    d.note("windows", windows);
    d.note("windows_with_one_minimum", single_min);
    d.note("skipped", skipped);
    d.note("max_minimum_gap", json_float(min_gap));
    d.note("max_maximum_gap", json_float(max_gap));
    Ok(d)
}

pub fn cmd_verify_zeros(cfg: &RunConfig, table: Option<&Path>) -> Result<Report> {
    let entries: Vec<ZeroEntry> = match table {
        Some(p) => zeros::load_table(p)?,
        None => zeros::KNOWN_ZEROS.to_vec(),
    };
    let tol = cfg.params.zero_threshold.unwrap_or(DEFAULT_ZERO_TOLERANCE);
    let oracle = EtaOracle::default();
    let rows: Vec<Vec<Cell>> = entries
        .par_iter()
        .map(|z| {
            let v = oracle.eta(StripPoint::new(0.5, z.t)?, cfg.precision)?;
            let abs = v.value.norm();
            Ok(row![
                i64::from(z.ordinal),
                z.t,
                v.value.re,
                v.value.im,
                abs,
                v.abs_error_bound,
                abs < tol
            ])
        })
        .collect::<Result<_>>()?;
    let mut d = Dataset::new(
        schema("verify-zeros"),
        &[
            "ordinal",
            "t",
            "re",
            "im",
            "abs",
            "abs_error_bound",
            "is_zero",
        ],
    );
    d.rows = rows;
    let misses = d.rows.iter().filter(|r| r[6] == Cell::Bool(false)).count();
    d.note("tolerance", json_float(tol));
    d.note("entries", d.rows.len());
    d.note("not_zero", misses);
    Ok(Report {
        data: d,
        violation: misses > 0,
    })
}

pub fn cmd_approx_deviation(kind: KindArg, step: f64) -> Result<Report> {
    let kinds: &[ApproxKind] = match kind {
        KindArg::Upper => &[ApproxKind::Upper],
        KindArg::Lower => &[ApproxKind::Lower],
        KindArg::Both => &[ApproxKind::Upper, ApproxKind::Lower],
    };
    let mut d = Dataset::new(
        schema("approx-deviation"),
        &[
            "kind",
            "max_deviation",
            "sigma_at_max",
            "grid_points",
            "direction_violations",
            "deviation_at_0",
            "deviation_at_half",
        ],
    );
    let mut total = 0usize;
    for &k in kinds {
        let r = approx_deviation_scan(k, step)?;
        total += r.direction_violations.len();
        let name = if k == ApproxKind::Upper {
            "upper"
        } else {
            "lower"
        };
        d.push(row![
            name,
            r.max_deviation,
            r.sigma_at_max,
            r.grid_points as u64,
            r.direction_violations.len() as u64,
            r.boundary_deviation.0,
            r.boundary_deviation.1
        ]);
    }
    d.note("violations", total);
    Ok(Report {
        data: d,
        violation: total > 0,
    })
}
