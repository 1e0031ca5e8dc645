//! Table of critical-line zero ordinates.

use crate::error::{CliError, Result};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEntry {
    pub ordinal: u32,
    pub t: f64,
}

/// The first and sixth nontrivial zeros, to the digits usually quoted.
pub const KNOWN_ZEROS: [ZeroEntry; 2] = [
    ZeroEntry {
        ordinal: 1,
        t: 14.13472514,
    },
    ZeroEntry {
        ordinal: 6,
        t: 37.586178,
    },
];

/// Parses `ordinal,t` (or whitespace-separated) lines. Blank lines, `#`
/// comments and an `ordinal,t` header are ignored; ordinates must increase.
pub fn parse_table(text: &str, path: &Path) -> Result<Vec<ZeroEntry>> {
    let bad = |line: usize, msg: String| CliError::Config {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut out: Vec<ZeroEntry> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.replace(' ', "") == "ordinal,t" {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let [ord, t] = fields[..] else {
            return Err(bad(i + 1, "expected `ordinal,t`".into()));
        };
        let ordinal = ord
            .parse()
            .map_err(|e| bad(i + 1, format!("ordinal: {e}")))?;
        let t: f64 = t.parse().map_err(|e| bad(i + 1, format!("t: {e}")))?;
        if !t.is_finite() {
            return Err(bad(i + 1, "t must be finite".into()));
        }
        if out.last().is_some_and(|p| p.t >= t) {
            return Err(bad(i + 1, "ordinates must be strictly increasing".into()));
        }
        out.push(ZeroEntry { ordinal, t });
    }
    Ok(out)
}

pub fn load_table(path: &Path) -> Result<Vec<ZeroEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text, path)
}
