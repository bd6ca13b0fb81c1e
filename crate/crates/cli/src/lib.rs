//! Scenario runner for the proper-tube action checks: TOML configs in,
//! per-scenario CSV tables out.

pub mod config;
pub mod runner;

pub use config::{Checks, FlippedPatch, ScenarioConfig};
pub use runner::{
    run_scenario, run_suite, CheckKind, RunOptions, ScenarioOutcome, SuiteOutcome, TermRow,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("computation failed: {0}")]
    Compute(#[from] tubeaction_core::Error),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything that happens after a
    /// config has been accepted.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Formats with 17 significant digits.
pub fn full_precision(v: f64) -> String {
    format!("{v:.16e}")
}
