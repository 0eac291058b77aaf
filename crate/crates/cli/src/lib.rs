//! Config-driven batch front end for `inspection-core`.
//!
//! A run reads a TOML configuration, validates every block, runs one command
//! and only then writes its reports (delimited tables, the effective config
//! and a manifest) into the output directory.

pub mod commands;
pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

pub use commands::{dispatch, CliError, Command, VariantChoice};
pub use config::{load_config, parse_config, ConfigError, Format, RawConfig, RunConfig};
pub use report::{write_report, Report, Table};

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub runs: Option<u64>,
}

/// Parses `text`, applies `overrides` and validates the result.
pub fn configure(text: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut raw = parse_config(text)?;
    if let Some(sim) = raw.simulation.as_mut() {
        sim.seed = overrides.seed.or(sim.seed);
        sim.runs = overrides.runs.or(sim.runs);
    }
    if let Some(out) = &overrides.out {
        raw.output.directory = Some(out.clone());
    }
    RunConfig::from_raw(raw)
}

/// Runs `command` on the config document and writes its reports. Nothing is
/// written unless the command succeeds.
pub fn run(command: Command, text: &str, overrides: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let config = configure(text, overrides).map_err(CliError::Config)?;
    let dir = config.directory.clone().ok_or_else(|| {
        CliError::Config(ConfigError::Fields(vec![config::FieldError {
            path: "output.directory".into(),
            message: "is required (or pass --out)".into(),
        }]))
    })?;
    let report = dispatch(command, &config)?;
    write(&dir, &report, &config)
}

fn write(dir: &Path, report: &Report, config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let seed = config.simulation.as_ref().map(|s| s.seed);
    write_report(dir, report, &config.formats, seed, &config.effective_toml(), &config.hash())
        .map_err(|source| CliError::Io { context: format!("writing reports to {}", dir.display()), source })
}
