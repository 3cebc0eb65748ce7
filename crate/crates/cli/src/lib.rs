//! Command-line driver for the work-statistics estimators.
//!
//! The library half hosts everything the binary does — configuration
//! loading, subcommand execution, artifact/manifest writing, and SVG
//! rendering — so integration tests can call the same code paths the
//! binary exercises.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod plot;
pub mod runner;

pub use config::RunConfig;
pub use error::CliError;
pub use manifest::{RunManifest, MANIFEST_NAME};
pub use runner::{run, CommandKind};
