//! Content-addressed cache for scan datasets.

use crate::error::{CliError, Result};
use crate::format::{Cell, Dataset};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::hash::BuildHasher;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Tolerance for the spot check on a cache hit.
pub const VERIFY_TOLERANCE: f64 = 1e-12;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    schema: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    summary: serde_json::Map<String, serde_json::Value>,
}

/// SHA-256 over the canonical key text, hex encoded.
pub fn digest(key: &str) -> String {
    hex::encode(Sha256::digest(key.as_bytes()))
}

pub fn entry_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{}.json", digest(key)))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let res = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if let Err(e) = res {
        let _ = std::fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

/// Reads an entry; a missing, unreadable or mismatched file is a miss.
pub fn load(dir: &Path, key: &str) -> Option<Dataset> {
    let text = std::fs::read_to_string(entry_path(dir, key)).ok()?;
    let e: Entry = serde_json::from_str(&text).ok()?;
    if e.key != key {
        return None;
    }
    Some(Dataset {
        schema: e.schema,
        rows: e
            .rows
            .iter()
            .map(|r| r.iter().map(|c| Cell::parse(c)).collect())
            .collect(),
        header: e.header,
        summary: e.summary,
    })
}

pub fn store(dir: &Path, key: &str, data: &Dataset) -> Result<()> {
    let e = Entry {
        key: key.to_string(),
        schema: data.schema.clone(),
        header: data.header.clone(),
        rows: data
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::render).collect())
            .collect(),
        summary: data.summary.clone(),
    };
    write_atomic(&entry_path(dir, key), serde_json::to_string(&e)?.as_bytes())
}

/// Picks a random row index of `data`.
pub fn random_row(data: &Dataset) -> Option<usize> {
    if data.rows.is_empty() {
        return None;
    }
    let h = std::collections::hash_map::RandomState::new().hash_one(data.rows.len());
    Some((h % data.rows.len() as u64) as usize)
}

/// `true` when every numeric cell of `expected` is within
/// [`VERIFY_TOLERANCE`] of `cached` and every other cell is equal.
pub fn cells_agree(cached: &[Cell], expected: &[Cell]) -> bool {
    cached.len() >= expected.len()
        && cached
            .iter()
            .zip(expected)
            .all(|(c, e)| match (c.as_f64(), e.as_f64()) {
                (Some(a), Some(b)) => {
                    (a - b).abs() <= VERIFY_TOLERANCE || (a.is_nan() && b.is_nan())
                }
                _ => c == e,
            })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::row;

    #[test]
    fn round_trip_and_key_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let mut d = Dataset::new("s/v1", &["t", "alpha", "ratio"]);
        d.push(row![10.0, 0.0, 1.0]);
        d.note("violations", 0);
        store(dir.path(), "k", &d).unwrap();
        assert_eq!(load(dir.path(), "k").unwrap(), d);
        assert!(load(dir.path(), "other").is_none());
    }

    #[test]
    #[allow(clippy::useless_vec)]
    fn agreement() {
        assert!(cells_agree(&row![1.0, true], &row![1.0 + 1e-13]));
        assert!(!cells_agree(&row![1.0], &row![1.0 + 1e-9]));
        assert!(!cells_agree(&row![true], &row![false]));
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(digest("").len(), 64);
        assert_eq!(&digest("abc")[..8], "ba7816bf");
    }
}
