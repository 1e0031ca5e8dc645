//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use etaorbit::conjecture::{grid_axis, scan_conjecture, scan_monotonicity, ScanGrid};
use etaorbit::functional::{
    approx_deviation_scan, critical_line_identity_check, sz_relation_check,
    two_power_alpha_derivative, ApproxKind,
};
use etaorbit::gamma::gamma;
use etaorbit::orbit::{
    find_m, nesting_numerator, sandwich_unchecked, scan_n_o, DEFAULT_SCAN_CEILING, DEFAULT_WINDOW,
};
use etaorbit::ratio::{argmin_partial_sum, detect_zero_sums, DualSums};
use etaorbit::{big_p, eta, Complex64, StripPoint, CONJECTURE_T_MIN, TWO_PI_OVER_LN2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

type Check = Result<(bool, String), String>;

fn sp(sigma: f64, t: f64) -> StripPoint {
    StripPoint::new(sigma, t).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn run(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok((ok, d)) => (ok && elapsed <= budget, d),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} {id:>2} {title}: {detail} [{:.2}s, budget {}s]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn oracle_values() -> Check {
    let cases = [
        ((0.404, 147.0), Complex64::new(1.816326, 0.457761)),
        ((0.596, 147.0), Complex64::new(1.124161, 0.568465)),
    ];
    let mut worst = 0.0f64;
    for ((sigma, t), expected) in cases {
        let v = eta(sp(sigma, t), 1e-10).map_err(err)?.value;
        worst = worst
            .max((v.re - expected.re).abs())
            .max((v.im - expected.im).abs());
    }
    Ok((worst <= 5e-6, format!("max component error {worst:.2e}")))
}

fn known_zeros() -> Check {
    let a = eta(sp(0.5, 14.13472514), 1e-10).map_err(err)?.value.norm();
    let b = eta(sp(0.5, 37.586178), 1e-10).map_err(err)?.value.norm();
    Ok((a < 1e-6 && b < 1e-5, format!("|eta| = {a:.2e}, {b:.2e}")))
}

fn transition_index() -> Check {
    let s = sp(0.50567, 37.58631);
    let scan = scan_n_o(s, DEFAULT_WINDOW, DEFAULT_SCAN_CEILING).map_err(err)?;
    let first_positive = scan.last_failure + 1;
    let mut positive_through = true;
    for n in first_positive..=2398 {
        positive_through &= nesting_numerator(n, s).map_err(err)? > 0.0;
    }
    Ok((
        first_positive == 1398 && positive_through,
        format!("first positive n = {first_positive}, positive through 2398: {positive_through}"),
    ))
}

fn sandwich() -> Check {
    let mut parts = Vec::new();
    let mut violations = 0;
    for (sigma, t) in [(0.5, 20.0), (0.404, 147.0), (0.25, 40.0)] {
        let s = sp(sigma, t);
        let m = find_m(s, 0.5, DEFAULT_WINDOW).map_err(err)?.m;
        let bounds = sandwich_unchecked(s, 0.5, m + 1, m + 5000).map_err(err)?;
        violations += bounds.iter().filter(|b| !b.holds()).count();
        parts.push(format!("m({sigma}+{t}i) = {m}"));
    }
    Ok((
        violations == 0,
        format!("{}; violations {violations}", parts.join(", ")),
    ))
}

fn critical_line() -> Check {
    let mut worst = 0.0f64;
    for t in [1.0, 5.0, 14.134725, TWO_PI_OVER_LN2, 50.0, 100.0] {
        worst = worst.max(critical_line_identity_check(t).map_err(err)?);
    }
    Ok((worst < 1e-9, format!("max ||P| - 1| = {worst:.2e}")))
}

fn gamma_identity() -> Check {
    let mut worst = 0.0f64;
    for i in 0..100 {
        let t = 0.1 + (50.0 - 0.1) * i as f64 / 99.0;
        let g = gamma(Complex64::new(0.5, t)).map_err(err)?.norm();
        let expected = (PI / (PI * t).cosh()).sqrt();
        worst = worst.max((g / expected - 1.0).abs());
    }
    Ok((worst < 1e-10, format!("max relative deviation {worst:.2e}")))
}

fn approximations() -> Check {
    let up = approx_deviation_scan(ApproxKind::Upper, 1e-4).map_err(err)?;
    let lo = approx_deviation_scan(ApproxKind::Lower, 1e-4).map_err(err)?;
    let close = |x: f64, target: f64| (x / target - 1.0).abs() <= 0.05;
    let wrong = up.direction_violations.len() + lo.direction_violations.len();
    Ok((
        close(up.max_deviation, 1.75e-4) && close(lo.max_deviation, 5.75e-3) && wrong == 0,
        format!(
            "upper {:.4e}, lower {:.4e}, direction violations {wrong}",
            up.max_deviation, lo.max_deviation
        ),
    ))
}

fn conjecture_grid() -> ScanGrid {
    ScanGrid {
        alpha_from: 0.0,
        alpha_to: 0.45,
        alpha_step: 0.05,
        t_from: CONJECTURE_T_MIN,
        t_to: 120.0,
        t_step: 0.25,
    }
}

fn conjecture() -> Check {
    let scan = scan_conjecture(&conjecture_grid()).map_err(err)?;
    Ok((
        scan.violations.is_empty(),
        format!(
            "{} points, {} skipped, {} violations",
            scan.records.len(),
            scan.skipped.len(),
            scan.violations.len()
        ),
    ))
}

fn monotonicity() -> Check {
    let alphas = grid_axis(0.0, 0.49, 0.01);
    let mut inversions = 0;
    for t in [CONJECTURE_T_MIN, 20.0, 60.0, 120.0] {
        let r = scan_monotonicity(t, &alphas).map_err(err)?;
        inversions += r.values.windows(2).filter(|w| w[1].1 >= w[0].1).count();
    }
    Ok((
        inversions == 0,
        format!(
            "{} alphas x 4 t-values, {inversions} inversions",
            alphas.len()
        ),
    ))
}

fn zero_sums() -> Check {
    let a = sp(0.4412, 147.0517);
    let b = sp(0.50567, 37.58631);
    let (na, va) = argmin_partial_sum(a, 1, 200);
    let (nb, vb) = argmin_partial_sum(b, 1400, 1600);
    let mut unique = true;
    let mut counts = Vec::new();
    for s in [a, b] {
        for threshold in [1e-9, 1e-4] {
            let scan = detect_zero_sums(s, 100_000, threshold).map_err(err)?;
            let flagged = scan.flagged().count();
            unique &= flagged <= 1;
            counts.push(flagged);
        }
    }
    Ok((
        na == 35 && va < 1e-2 && nb == 1516 && vb < 1e-2 && unique,
        format!(
            "argmins n={na} ({va:.2e}), n={nb} ({vb:.2e}); flagged events above n_o {counts:?}"
        ),
    ))
}

fn ratio_convergence() -> Check {
    let s = sp(0.404, 147.0);
    let p = big_p(s).map_err(err)?.modulus();
    let (calib_from, calib_to, n_max) = (10_000u64, 11_000u64, 1_000_000u64);
    let mut k = 0.0f64;
    let mut worst = 0.0f64;
    let mut last = 0.0;
    for (n, lo, up) in DualSums::new(s).map_err(err)?.take(n_max as usize) {
        if n < calib_from {
            continue;
        }
        let scaled = ((up / lo).norm() - p).abs() * (n as f64).powf(s.sigma());
        if n <= calib_to {
            k = k.max(1.25 * scaled);
        } else {
            worst = worst.max(scaled);
        }
        last = (up / lo).norm();
    }
    Ok((
        (last - 0.67252).abs() < 1e-3 && worst <= k,
        format!("|P_1e6| = {last:.6}, |P| = {p:.6}; envelope K = {k:.4}, max scaled deviation {worst:.4}"),
    ))
}

fn sz_identity() -> Check {
    let mut rng = StdRng::seed_from_u64(30);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let alpha = rng.random_range(0.0..0.5);
        let t = rng.random_range(CONJECTURE_T_MIN..120.0);
        worst = worst.max(sz_relation_check(alpha, t).map_err(err)?);
    }
    Ok((worst < 1e-8, format!("max deviation {worst:.2e}")))
}

fn derivative_signs() -> Check {
    let mut rng = StdRng::seed_from_u64(31);
    let mut nonnegative = 0;
    for _ in 0..100 {
        let alpha = rng.random_range(0.01..0.49);
        let t = rng.random_range(CONJECTURE_T_MIN..120.0);
        nonnegative += usize::from(two_power_alpha_derivative(alpha, t).map_err(err)? >= 0.0);
    }
    let at_half = two_power_alpha_derivative(0.5, TWO_PI_OVER_LN2).map_err(err)?;
    Ok((
        nonnegative == 0 && at_half.abs() < 1e-4,
        format!("{nonnegative} non-negative of 100; derivative at (1/2, 2pi/ln2) = {at_half:.2e}"),
    ))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.path().join(format!("scan-{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_etaorbit"))
            .args([
                "scan",
                "--which",
                "conjecture",
                "--alpha-to",
                "0.45",
                "--alpha-step",
                "0.05",
            ])
            .args(["--threads", threads, "--out"])
            .arg(&out)
            .env_remove(etaorbit_cli::CONFIG_ENV)
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(err)?;
        if !status.success() {
            return Err(format!("scan with {threads} threads exited with {status}"));
        }
        outputs.push(std::fs::read(&out).map_err(err)?);
    }
    Ok((
        outputs[0] == outputs[1],
        format!(
            "{} bytes each, identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    ))
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "oracle values", s(1), oracle_values),
        run(2, "known zeros", s(1), known_zeros),
        run(3, "transition index", s(1), transition_index),
        run(4, "remainder sandwich", s(30), sandwich),
        run(5, "critical-line identity", s(1), critical_line),
        run(6, "gamma identity", s(1), gamma_identity),
        run(7, "approximation deviations", s(5), approximations),
        run(8, "conjecture scan", s(300), conjecture),
        run(9, "monotonicity", s(10), monotonicity),
        run(10, "zero-sum events", s(20), zero_sums),
        run(11, "ratio convergence", s(30), ratio_convergence),
        run(12, "eta/zeta ratio identity", s(10), sz_identity),
        run(13, "two-power derivative signs", s(5), derivative_signs),
        run(14, "scan determinism", s(600), determinism),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
