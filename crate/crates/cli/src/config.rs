//! Flags, the `key=value` config file, and resolved run settings.

use crate::error::{CliError, Result};
use clap::{Args, ValueEnum};
use etaorbit::conjecture::ScanGrid;
use etaorbit::oracle::DEFAULT_TARGET_ERROR;
use etaorbit::orbit::{DEFAULT_SCAN_CEILING, DEFAULT_WINDOW};
use etaorbit::StripPoint;
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "ETAORBIT_CONFIG";

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

/// Every option shared by the subcommands. Unset values fall back to the
/// config file, then to the defaults in [`RunConfig`].
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Params {
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub n_max: Option<u64>,
    #[arg(long, global = true)]
    pub n_from: Option<u64>,
    #[arg(long, global = true)]
    pub n_to: Option<u64>,
    #[arg(long, global = true)]
    pub stride: Option<u64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub window: Option<u64>,
    #[arg(long, global = true)]
    pub ceiling: Option<u64>,
    #[arg(long, global = true, alias = "grid-alpha-from")]
    pub alpha_from: Option<f64>,
    #[arg(long, global = true, alias = "grid-alpha-to")]
    pub alpha_to: Option<f64>,
    #[arg(long, global = true, alias = "grid-alpha-step")]
    pub alpha_step: Option<f64>,
    #[arg(long, global = true, alias = "grid-t-from")]
    pub t_from: Option<f64>,
    #[arg(long, global = true, alias = "grid-t-to")]
    pub t_to: Option<f64>,
    #[arg(long, global = true, alias = "grid-t-step")]
    pub t_step: Option<f64>,
    /// Target absolute error for oracle evaluations.
    #[arg(long, global = true)]
    pub precision: Option<f64>,
    #[arg(long, global = true)]
    pub zero_threshold: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

fn fill<T: FromStr>(
    slot: &mut Option<T>,
    raw: Option<&(usize, String)>,
    key: &str,
    path: &Path,
) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let (None, Some((line, v))) = (slot.as_ref(), raw) {
        let parsed = v.parse().map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            line: *line,
            msg: format!("bad value for {key}: {e}"),
        })?;
        *slot = Some(parsed);
    }
    Ok(())
}

macro_rules! keyed_fields {
    ($m:ident, $self:ident, $path:ident; $($field:ident => $key:literal),* $(,)?) => {{
        const KEYS: &[&str] = &[$($key),*];
        for (k, (line, _)) in &$m {
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::Config { path: $path.to_path_buf(), line: *line, msg: format!("unknown key {k}") });
            }
        }
        $( fill(&mut $self.$field, $m.get($key), $key, $path)?; )*
    }};
}

impl Params {
    /// Fills unset fields from `key=value` text. Keys are the long flag names;
    /// `_` and `-` are interchangeable.
    pub fn fill_from_config(&mut self, text: &str, path: &Path) -> Result<()> {
        let mut map = std::collections::BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: "expected key=value".into(),
                });
            };
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            map.insert(key, (i + 1, v.trim().to_string()));
        }
        keyed_fields!(map, self, path;
            sigma => "sigma", t => "t", alpha => "alpha",
            n_max => "n-max", n_from => "n-from", n_to => "n-to", stride => "stride",
            epsilon => "epsilon", window => "window", ceiling => "ceiling",
            alpha_from => "alpha-from", alpha_to => "alpha-to", alpha_step => "alpha-step",
            t_from => "t-from", t_to => "t-to", t_step => "t-step",
            precision => "precision", zero_threshold => "zero-threshold",
            format => "format", out => "out", cache_dir => "cache-dir", threads => "threads",
        );
        Ok(())
    }

    pub fn load_config(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.fill_from_config(&text, path)
    }
}

/// Resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    /// Default [`DEFAULT_TARGET_ERROR`].
    pub precision: f64,
    /// Default ½.
    pub epsilon: f64,
    /// Stable-run window, default 1000.
    pub window: u64,
    /// Scan ceiling, default 10^7.
    pub ceiling: u64,
    /// Default: α ∈ [0, 0.49] step 0.01, t ∈ [2π+1, 120] step 0.25. A bare
    /// `--alpha` pins the α-axis to one value.
    pub grid: ScanGrid,
    /// Default CSV.
    pub format: Format,
    /// Default stdout.
    pub out: Option<PathBuf>,
    /// Default: no caching.
    pub cache_dir: Option<PathBuf>,
    /// Default: rayon's choice.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn resolve(params: Params) -> Result<Self> {
        let mut grid = ScanGrid::default();
        if let Some(a) = params.alpha {
            grid.alpha_from = a;
            grid.alpha_to = a;
        }
        let p = &params;
        grid.alpha_from = p.alpha_from.unwrap_or(grid.alpha_from);
        grid.alpha_to = p.alpha_to.unwrap_or(grid.alpha_to);
        grid.alpha_step = p.alpha_step.unwrap_or(grid.alpha_step);
        grid.t_from = p.t_from.unwrap_or(grid.t_from);
        grid.t_to = p.t_to.unwrap_or(grid.t_to);
        grid.t_step = p.t_step.unwrap_or(grid.t_step);
        let cfg = RunConfig {
            precision: p.precision.unwrap_or(DEFAULT_TARGET_ERROR),
            epsilon: p.epsilon.unwrap_or(DEFAULT_EPSILON),
            window: p.window.unwrap_or(DEFAULT_WINDOW),
            ceiling: p.ceiling.unwrap_or(DEFAULT_SCAN_CEILING),
            grid,
            format: p.format.unwrap_or_default(),
            out: p.out.clone(),
            cache_dir: p.cache_dir.clone(),
            threads: p.threads,
            params,
        };
        if cfg.threads == Some(0) {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        if cfg.window == 0 {
            return Err(CliError::Usage("--window must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn point(&self) -> Result<StripPoint> {
        let sigma = self
            .params
            .sigma
            .ok_or_else(|| CliError::Usage("--sigma is required".into()))?;
        let t = self
            .params
            .t
            .ok_or_else(|| CliError::Usage("--t is required".into()))?;
        Ok(StripPoint::new(sigma, t)?)
    }

    /// Settings that influence results, for the JSON `config` block.
    /// Output location, cache and thread count are left out so that
    /// output files do not depend on them.
    pub fn to_json(&self, command: &str) -> Map<String, Value> {
        let p = &self.params;
        let opt = |x: Option<f64>| x.map_or(Value::Null, crate::format::json_float);
        let opt_u = |x: Option<u64>| x.map_or(Value::Null, Value::from);
        let mut m = Map::new();
        m.insert("command".into(), command.into());
        m.insert("sigma".into(), opt(p.sigma));
        m.insert("t".into(), opt(p.t));
        m.insert("alpha".into(), opt(p.alpha));
        m.insert("n_max".into(), opt_u(p.n_max));
        m.insert("n_from".into(), opt_u(p.n_from));
        m.insert("n_to".into(), opt_u(p.n_to));
        m.insert("stride".into(), opt_u(p.stride));
        m.insert("zero_threshold".into(), opt(p.zero_threshold));
        m.insert(
            "precision".into(),
            crate::format::json_float(self.precision),
        );
        m.insert("epsilon".into(), crate::format::json_float(self.epsilon));
        m.insert("window".into(), self.window.into());
        m.insert("ceiling".into(), self.ceiling.into());
        let g = &self.grid;
        let grid: Map<String, Value> = [
            ("alpha_from", g.alpha_from),
            ("alpha_to", g.alpha_to),
            ("alpha_step", g.alpha_step),
            ("t_from", g.t_from),
            ("t_to", g.t_to),
            ("t_step", g.t_step),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), crate::format::json_float(v)))
        .collect();
        m.insert("grid".into(), Value::Object(grid));
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_fills_only_unset() {
        let mut p = Params {
            sigma: Some(0.3),
            ..Params::default()
        };
        p.fill_from_config(
            "# comment\nsigma = 0.1\nt=20\nn_max = 50\nformat=json\n",
            Path::new("c"),
        )
        .unwrap();
        assert_eq!(p.sigma, Some(0.3));
        assert_eq!(p.t, Some(20.0));
        assert_eq!(p.n_max, Some(50));
        assert_eq!(p.format, Some(Format::Json));
    }

    #[test]
    fn config_rejects_unknown_and_malformed() {
        let mut p = Params::default();
        assert!(p.fill_from_config("bogus=1", Path::new("c")).is_err());
        assert!(p.fill_from_config("sigma", Path::new("c")).is_err());
        let err = p
            .fill_from_config("\nwindow=abc", Path::new("c"))
            .unwrap_err();
        assert!(matches!(err, CliError::Config { line: 2, .. }));
    }

    #[test]
    fn alpha_pins_grid() {
        let cfg = RunConfig::resolve(Params {
            alpha: Some(0.0),
            ..Params::default()
        })
        .unwrap();
        assert_eq!(cfg.grid.alphas(), vec![0.0]);
        assert_eq!(cfg.precision, DEFAULT_TARGET_ERROR);
    }
}
