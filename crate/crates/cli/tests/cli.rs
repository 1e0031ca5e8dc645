use clap::Parser;
use etaorbit::{partial_sum, StripPoint};
use etaorbit_cli::format::Cell;
use etaorbit_cli::{execute, render, resolve, Cli, Report};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn report(args: &[&str]) -> Report {
    let cli = Cli::try_parse_from(std::iter::once("etaorbit").chain(args.iter().copied())).unwrap();
    let cfg = resolve(&cli).unwrap();
    execute(&cli.command, &cfg).unwrap()
}

fn rendered(args: &[&str]) -> String {
    let cli = Cli::try_parse_from(std::iter::once("etaorbit").chain(args.iter().copied())).unwrap();
    let cfg = resolve(&cli).unwrap();
    render(&execute(&cli.command, &cfg).unwrap(), &cli.command, &cfg)
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etaorbit"))
        .args(args)
        .env_remove(etaorbit_cli::CONFIG_ENV)
        .output()
        .unwrap()
}

fn f(r: &Report, row: usize, col: &str) -> f64 {
    r.data.rows[row][r.data.column(col).unwrap()]
        .as_f64()
        .unwrap()
}

fn summary(r: &Report, key: &str) -> Value {
    r.data.summary[key].clone()
}

#[test]
fn eta_ln2() {
    let r = report(&["eta", "--sigma", "1", "--t", "0"]);
    assert!((f(&r, 0, "re") - std::f64::consts::LN_2).abs() < 1e-14);
    assert_eq!(f(&r, 0, "im"), 0.0);
}

#[test]
fn eta_reference_value() {
    let out = rendered(&["eta", "--sigma", "0.404", "--t", "147"]);
    let row: Vec<f64> = out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .take(4)
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(
        (row[2] - 1.816326).abs() < 5e-7 && (row[3] - 0.457761).abs() < 5e-7,
        "{out}"
    );
}

#[test]
fn eta_first_zero_flagged() {
    let r = report(&["eta", "--sigma", "0.5", "--t", "14.13472514"]);
    assert!(f(&r, 0, "abs") < 1e-6);
    assert_eq!(r.data.rows[0].last(), Some(&Cell::Bool(true)));
    let r = report(&["eta", "--sigma", "0.5", "--t", "14"]);
    assert_eq!(r.data.rows[0].last(), Some(&Cell::Bool(false)));
}

#[test]
fn zeta_pole_and_value() {
    let out = bin(&["zeta", "--sigma", "1", "--t", "0"]);
    assert_eq!(out.status.code(), Some(64));
    let r = report(&["zeta", "--sigma", "2", "--t", "0"]);
    assert!((f(&r, 0, "re") - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-9);
}

#[test]
fn path_single_row() {
    assert_eq!(
        rendered(&["path-export", "--sigma", "0.3", "--t", "5", "--n-max", "1"]),
        "n,re,im\n1,1.0,0.0\n"
    );
}

#[test]
fn path_endpoint_and_stride() {
    let r = report(&[
        "path-export",
        "--sigma",
        "0.5",
        "--t",
        "38",
        "--n-max",
        "313",
        "--stride",
        "50",
    ]);
    let ns: Vec<f64> = (0..r.data.rows.len()).map(|i| f(&r, i, "n")).collect();
    assert_eq!(ns, vec![50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 313.0]);
    let s = StripPoint::new(0.5, 38.0).unwrap();
    let end = partial_sum(313, s);
    assert_eq!((f(&r, 6, "re"), f(&r, 6, "im")), (end.re, end.im));
}

#[test]
fn dual_paths_have_parallel_segments() {
    let a = report(&[
        "path-export",
        "--sigma",
        "0.3",
        "--t",
        "25",
        "--n-max",
        "200",
    ]);
    let b = report(&[
        "path-export",
        "--sigma",
        "0.3",
        "--t",
        "25",
        "--n-max",
        "200",
        "--mirror",
    ]);
    let pi = std::f64::consts::PI;
    for i in 1..200 {
        let da = (f(&a, i, "im") - f(&a, i - 1, "im")).atan2(f(&a, i, "re") - f(&a, i - 1, "re"));
        let db = (f(&b, i, "im") - f(&b, i - 1, "im")).atan2(f(&b, i, "re") - f(&b, i - 1, "re"));
        let d = (da - db).rem_euclid(pi);
        assert!(d.min(pi - d) < 1e-9, "segment {}", i + 1);
    }
}

#[test]
fn path_limits() {
    assert_eq!(
        bin(&[
            "path-export",
            "--sigma",
            "0.5",
            "--t",
            "1",
            "--n-max",
            "20000000"
        ])
        .status
        .code(),
        Some(64)
    );
}

#[test]
fn orbit_transition() {
    let r = report(&["orbit", "--sigma", "0.50567", "--t", "37.58631"]);
    assert_eq!(summary(&r, "transition"), 1398);
    let i = r
        .data
        .rows
        .iter()
        .position(|row| row[0] == Cell::Int(1398))
        .unwrap();
    assert!(f(&r, i - 1, "nesting_numerator") <= 0.0 && f(&r, i, "nesting_numerator") > 0.0);
}

#[test]
fn orbit_degenerate_and_spot_check() {
    let r = report(&["orbit", "--sigma", "0.5", "--t", "0"]);
    assert_eq!(summary(&r, "n_o"), 0);
    let r = report(&["orbit", "--sigma", "0.5", "--t", "20", "--epsilon", "0.5"]);
    assert_eq!(summary(&r, "m"), 801);
    assert_eq!(summary(&r, "sandwich_violations"), 0);
    assert!(!r.violation);
}

#[test]
fn sandwich_with_asymptotics() {
    let r = report(&[
        "sandwich",
        "--sigma",
        "0.5",
        "--t",
        "20",
        "--with-asymptotics",
        "--n-from",
        "1000000",
        "--n-to",
        "1000000",
    ]);
    assert!((f(&r, 0, "dr2_dc2_ratio") - 1.0).abs() < 1e-2);
    assert!((f(&r, 0, "scaled_ratio") - 1.0).abs() < 2e-2);
    let r = report(&["sandwich", "--sigma", "0.25", "--t", "40"]);
    assert_eq!(r.data.rows.len(), 5000);
    assert_eq!(summary(&r, "violations"), 0);
    assert_eq!(
        bin(&["sandwich", "--sigma", "0.25", "--t", "40", "--n-from", "10"])
            .status
            .code(),
        Some(64)
    );
}

#[test]
fn ratio_critical_line_is_unimodular() {
    let r = report(&["ratio", "--sigma", "0.5", "--t", "30", "--n-max", "10000"]);
    assert!((summary(&r, "limit")["abs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn ratio_limit_modulus() {
    let r = report(&[
        "ratio", "--sigma", "0.404", "--t", "147", "--n-max", "1000000",
    ]);
    assert!((summary(&r, "limit")["abs"].as_f64().unwrap() - 0.67252).abs() < 1e-3);
    assert!((summary(&r, "p")["abs"].as_f64().unwrap() - 0.67252).abs() < 1e-5);
}

#[test]
fn ratio_companion_zero_event() {
    let r = report(&[
        "ratio", "--sigma", "0.49433", "--t", "37.58631", "--n-max", "100000",
    ]);
    let events = summary(&r, "zero_events");
    let hits: Vec<_> = events
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["point"] == "companion")
        .collect();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0]["n"], 1516);
}

#[test]
fn scan_alpha_zero_is_one() {
    let r = report(&["scan", "--t-from", "10", "--t-to", "11", "--alpha", "0"]);
    assert_eq!(r.data.rows.len(), 5);
    for i in 0..5 {
        assert_eq!(f(&r, i, "ratio"), 1.0);
    }
}

#[test]
fn scan_row_count_and_exit() {
    let out = bin(&[
        "scan",
        "--alpha-to",
        "0.2",
        "--alpha-step",
        "0.1",
        "--t-to",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 91);
    assert!(!text.contains('\r'));
}

fn scan_to(dir: &Path, cache: &Path, name: &str, extra: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let mut args = vec![
        "scan",
        "--alpha-to",
        "0.3",
        "--alpha-step",
        "0.1",
        "--t-to",
        "40",
        "--out",
    ];
    let out_s = out.to_str().unwrap();
    args.push(out_s);
    args.extend(["--cache-dir", cache.to_str().unwrap()]);
    args.extend(extra);
    let o = bin(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn scan_cache_hit_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let first = scan_to(dir.path(), &cache, "a.json", &["--format", "json"]);
    let entries: Vec<_> = std::fs::read_dir(&cache).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let second = scan_to(dir.path(), &cache, "b.json", &["--format", "json"]);
    assert_eq!(first, second);
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["schema"], "etaorbit/scan-conjecture/v1");
    assert_eq!(v["config"]["command"], "scan");
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let clean = scan_to(dir.path(), &cache, "a.csv", &[]);
    let entry = std::fs::read_dir(&cache)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let text = std::fs::read_to_string(&entry).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    for row in v["rows"].as_array_mut().unwrap() {
        row[2] = Value::from("0.5");
    }
    std::fs::write(&entry, v.to_string()).unwrap();
    let again = scan_to(dir.path(), &cache, "b.csv", &[]);
    assert_eq!(clean, again);
}

#[test]
fn scan_other_kinds() {
    let r = report(&[
        "scan",
        "--which",
        "monotonicity",
        "--t-from",
        "20",
        "--t-to",
        "21",
    ]);
    assert_eq!(summary(&r, "violations"), 0);
    assert_eq!(r.data.rows.len(), 5 * 50);
    let r = report(&[
        "scan", "--which", "extrema", "--alpha", "0.25", "--t-from", "10", "--t-to", "60",
        "--t-step", "0.01",
    ]);
    assert_eq!(summary(&r, "windows_with_one_minimum"), 5);
}

#[test]
fn verify_default_table() {
    let r = report(&["verify-zeros"]);
    assert_eq!(r.data.rows.len(), 2);
    for i in 0..2 {
        assert!(f(&r, i, "abs") < 1e-6);
    }
    assert!(!r.violation);
}

#[test]
fn verify_user_tables() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("z.csv");
    std::fs::write(&table, "ordinal,t\n1,10\n").unwrap();
    let out = bin(&["verify-zeros", "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.ends_with(",false"));
    assert!(row.split(',').nth(4).unwrap().parse::<f64>().unwrap() > 1e-3);

    std::fs::write(&table, "").unwrap();
    let out = bin(&["verify-zeros", "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn approx_deviation_values() {
    let r = report(&["approx-deviation"]);
    assert!((f(&r, 0, "max_deviation") / 1.75e-4 - 1.0).abs() < 0.05);
    assert!((f(&r, 1, "max_deviation") / 5.75e-3 - 1.0).abs() < 0.05);
    assert!(!r.violation);
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "sigma = 0.3\nt = 5\nn-max = 3\n").unwrap();
    let run = |extra: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_etaorbit"))
            .arg("path-export")
            .args(extra)
            .env(etaorbit_cli::CONFIG_ENV, &cfg)
            .output()
            .unwrap();
        String::from_utf8(o.stdout).unwrap()
    };
    assert_eq!(run(&[]).lines().count(), 4);
    assert_eq!(run(&["--n-max", "1"]).lines().count(), 2);
    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    assert_eq!(run(&[]), "");
}

#[test]
fn exit_codes() {
    assert_eq!(
        bin(&[
            "eta",
            "--sigma",
            "0.5",
            "--t",
            "500",
            "--precision",
            "1e-13"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        bin(&[
            "eta",
            "--sigma",
            "0.5",
            "--t",
            "5",
            "--out",
            "/proc/nonexistent/x.csv"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(bin(&["eta", "--t", "5"]).status.code(), Some(64));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn threads_do_not_change_output() {
    let a = rendered(&[
        "scan",
        "--which",
        "extrema",
        "--alpha-from",
        "0.1",
        "--alpha-to",
        "0.3",
        "--t-from",
        "10",
        "--t-to",
        "30",
        "--t-step",
        "0.01",
        "--threads",
        "1",
        "--format",
        "json",
    ]);
    let b = rendered(&[
        "scan",
        "--which",
        "extrema",
        "--alpha-from",
        "0.1",
        "--alpha-to",
        "0.3",
        "--t-from",
        "10",
        "--t-to",
        "30",
        "--t-step",
        "0.01",
        "--threads",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(a, b);
}
