//! CLI error type with a structured JSON rendering for scripted callers.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("config parse error: {reason}")]
    Parse { reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Compute(#[from] chaoswork_core::Error),
    #[error("plot: {0}")]
    Plot(String),
    #[error("{context}: {reason}")]
    Subcommand { context: &'static str, reason: String },
}

impl CliError {
    /// Machine-readable report printed to stderr on failure.
    pub fn to_report(&self) -> serde_json::Value {
        match self {
            CliError::Config { field, reason } => serde_json::json!({
                "error": {"kind": "config", "field": field, "reason": reason}
            }),
            CliError::Parse { reason } => serde_json::json!({
                "error": {"kind": "parse", "reason": reason}
            }),
            CliError::Io { path, source } => serde_json::json!({
                "error": {"kind": "io", "path": path.display().to_string(),
                           "reason": source.to_string()}
            }),
            CliError::Compute(e) => serde_json::json!({
                "error": {"kind": "compute", "reason": e.to_string()}
            }),
            CliError::Plot(reason) => serde_json::json!({
                "error": {"kind": "plot", "reason": reason}
            }),
            CliError::Subcommand { context, reason } => serde_json::json!({
                "error": {"kind": "run", "context": context, "reason": reason}
            }),
        }
    }
}
