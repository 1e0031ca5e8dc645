//! Command-line front end for `etaorbit`: one subcommand per dataset, CSV or
//! JSON output, a `key=value` config file and a cache for grid scans.

pub mod cache;
pub mod commands;
pub mod config;
mod error;
pub mod format;
pub mod zeros;

pub use commands::Report;
pub use config::{Format, Params, RunConfig, CONFIG_ENV};
pub use error::{exit, CliError, Result};

use clap::{Parser, Subcommand};
use commands::{KindArg, ScanKind};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "etaorbit",
    version,
    about = "Partial sums, remainders and ratios of the Dirichlet eta function"
)]
pub struct Cli {
    /// Config file with `key=value` lines; flags take precedence.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: Params,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// η(s) with a certified error bound.
    Eta,
    /// ζ(s) = η(s)/(1 - 2^(1-s)).
    Zeta,
    /// Partial-sum path `n,re,im`.
    PathExport {
        /// Export the path of 1 - s̄ instead of s.
        #[arg(long)]
        mirror: bool,
    },
    /// Transition indices n_o, j, m and the numerator trace around n_o.
    Orbit,
    /// Remainder bounds for n in (m, m + 5000] unless a range is given.
    Sandwich {
        #[arg(long)]
        with_asymptotics: bool,
    },
    /// Limit of P_n(s), P(s), zero-sum events and envelope statistics.
    Ratio,
    /// Grid scans of the eta ratio.
    Scan {
        #[arg(long, value_enum, default_value = "conjecture")]
        which: ScanKind,
    },
    /// |η(½+it)| at tabulated zero ordinates.
    VerifyZeros {
        /// `ordinal,t` lines; defaults to the built-in table.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Maximum deviation of the elementary two-power approximations.
    ApproxDeviation {
        #[arg(long, value_enum, default_value = "both")]
        kind: KindArg,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eta => "eta",
            Command::Zeta => "zeta",
            Command::PathExport { .. } => "path-export",
            Command::Orbit => "orbit",
            Command::Sandwich { .. } => "sandwich",
            Command::Ratio => "ratio",
            Command::Scan { .. } => "scan",
            Command::VerifyZeros { .. } => "verify-zeros",
            Command::ApproxDeviation { .. } => "approx-deviation",
        }
    }
}

/// Merges the config file into the flags and resolves defaults.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut params = cli.params.clone();
    if let Some(path) = &cli.config {
        params.load_config(path)?;
    }
    RunConfig::resolve(params)
}

/// Runs a command on a thread pool of the configured size.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Report> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    pool.build()?.install(|| match command {
        Command::Eta => commands::cmd_eta(cfg),
        Command::Zeta => commands::cmd_zeta(cfg),
        Command::PathExport { mirror } => commands::cmd_path_export(cfg, *mirror),
        Command::Orbit => commands::cmd_orbit(cfg),
        Command::Sandwich { with_asymptotics } => commands::cmd_sandwich(cfg, *with_asymptotics),
        Command::Ratio => commands::cmd_ratio(cfg),
        Command::Scan { which } => commands::cmd_scan(cfg, *which),
        Command::VerifyZeros { table } => commands::cmd_verify_zeros(cfg, table.as_deref()),
        Command::ApproxDeviation { kind, step } => commands::cmd_approx_deviation(*kind, *step),
    })
}

/// Renders a report in the configured format.
pub fn render(report: &Report, command: &Command, cfg: &RunConfig) -> String {
    match cfg.format {
        Format::Csv => report.data.to_csv(),
        Format::Json => report.data.to_json(&cfg.to_json(command.name())),
    }
}

/// Writes the rendered report to `--out` (atomically) or stdout. In CSV mode
/// the summary goes to stderr as `key=value` lines.
pub fn emit(report: &Report, command: &Command, cfg: &RunConfig) -> Result<()> {
    let text = render(report, command, cfg);
    match &cfg.out {
        Some(path) => cache::write_atomic(path, text.as_bytes())?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(CliError::Output)?,
    }
    if cfg.format == Format::Csv && !report.data.summary.is_empty() {
        let _ = std::io::stderr()
            .lock()
            .write_all(report.data.summary_lines().as_bytes());
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            };
        }
    };
    let outcome = resolve(&cli).and_then(|cfg| {
        let report = execute(&cli.command, &cfg)?;
        emit(&report, &cli.command, &cfg)?;
        Ok(report)
    });
    match outcome {
        Ok(r) if r.violation => exit::VIOLATION,
        Ok(_) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
