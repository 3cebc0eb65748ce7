//! Run manifest: one JSON document per run referencing every result file
//! with its checksum, the resolved configuration, and bookkeeping counts.
//! Wall time is informational and is the only field allowed to differ
//! between reruns of the same (config, seed).

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{self, FileRecord};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand that produced the run.
    pub command: String,
    /// Fully resolved configuration (flags and environment applied).
    pub config: RunConfig,
    /// Versions of the producing binary and its computational core.
    pub versions: BTreeMap<String, String>,
    /// Informational only; excluded from determinism comparisons.
    pub wall_time_ms: u64,
    /// Monte Carlo trajectories dropped per artifact (empty when none).
    pub failure_counts: BTreeMap<String, usize>,
    /// Every result file of this run, with SHA-256 checksums.
    pub files: Vec<FileRecord>,
    /// Subcommand-specific summary (also persisted separately when the
    /// subcommand defines a report artifact).
    pub report: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("chaoswork".into(), env!("CARGO_PKG_VERSION").into());
        versions.insert(
            "chaoswork-core".into(),
            chaoswork_core::CORE_VERSION.to_string(),
        );
        Self {
            command: command.to_string(),
            config: config.clone(),
            versions,
            wall_time_ms: 0,
            failure_counts: BTreeMap::new(),
            files: Vec::new(),
            report: serde_json::Value::Null,
        }
    }

    /// Serializes and writes `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let bytes = output::json_bytes(&value);
        output::write_artifact(dir, MANIFEST_NAME, &bytes)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse {
            reason: format!("{}: {e}", path.display()),
        })
    }

    /// Recomputes the checksum of every referenced file; any mismatch or
    /// missing file is an error.
    pub fn verify(&self, dir: &Path) -> Result<(), CliError> {
        for record in &self.files {
            let path = dir.join(&record.file);
            let bytes = std::fs::read(&path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let sum = output::sha256_hex(&bytes);
            if sum != record.sha256 || bytes.len() as u64 != record.bytes {
                return Err(CliError::Subcommand {
                    context: "manifest verification",
                    reason: format!(
                        "{} changed on disk (recorded {}, found {sum})",
                        record.file, record.sha256
                    ),
                });
            }
        }
        Ok(())
    }
}
