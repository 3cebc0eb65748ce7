//! Deterministic artifact writers: CSV at 17 significant digits, pretty
//! JSON, and SHA-256 checksums over the written bytes.

use crate::error::CliError;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// One written artifact: relative file name, checksum, size.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize, PartialEq, Eq)]
pub struct FileRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes bytes and returns the checksummed record (file name relative to
/// the output directory).
pub fn write_artifact(dir: &Path, name: &str, bytes: &[u8]) -> Result<FileRecord, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok(FileRecord {
        file: name.to_string(),
        sha256: sha256_hex(bytes),
        bytes: bytes.len() as u64,
    })
}

/// CSV with a header row; every value is rendered as `{:.16e}` (17
/// significant digits), which round-trips f64 exactly.
pub fn csv_bytes(headers: &[&str], rows: &[Vec<f64>]) -> Vec<u8> {
    let mut text = String::new();
    text.push_str(&headers.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), headers.len());
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text.into_bytes()
}

/// Pretty JSON with a trailing newline. Struct fields keep declaration
/// order and maps must be sorted containers, so the bytes are stable.
pub fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serializes");
    text.push('\n');
    text.into_bytes()
}
