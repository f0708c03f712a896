//! Batch driver for the certification suites: load a TOML configuration,
//! run the selected module suite, and emit a machine-readable JSON report.
//! The exit code is 0 exactly when every check passes.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, RunConfig};
pub use report::{Check, SuiteReport};

/// Configuration used when `--config` is not given: a single light-like
/// mode with two occupation levels.
pub const DEFAULT_CONFIG: &str = include_str!("../default.toml");

pub const SUITES: &[&str] = &["krein", "gns", "fock", "gupta-bleuler", "twopoint", "all"];

/// Load a config from an optional path, falling back to the embedded
/// default.
pub fn load_config(path: Option<&std::path::Path>) -> Result<RunConfig, ConfigError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| ConfigError::Unreadable(format!("{}: {e}", p.display())))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    RunConfig::from_toml(&text)
}

/// Run a suite by name and assemble the report.
pub fn run(config: &RunConfig, suite: &str, seed: u64, refine: usize) -> Option<SuiteReport> {
    suites::run_suite(config, suite, seed, refine)
        .map(|(checks, tables)| SuiteReport::new(suite, seed, refine, checks, tables))
}
