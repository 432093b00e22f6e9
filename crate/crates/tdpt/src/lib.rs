//! Experiment runner for tdpt-core: configuration, file formats, the simulate / tdpt /
//! reconstruct stages and their per-frequency parallel execution.

pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod pipeline;

use std::path::Path;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use parallel::Runner;

/// Environment variable overriding the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "TDPT_OUTPUT_DIR";

/// Loads a config file or a figure preset, applies overrides and validates the result.
pub fn resolve_config(
    config: Option<&Path>,
    figure: Option<u32>,
    seed: Option<u64>,
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (config, figure) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "--config and --paper-figure are mutually exclusive".into(),
            ))
        }
        (Some(p), None) => ExperimentConfig::from_file(p)?,
        (None, Some(f)) => ExperimentConfig::paper_figure(f)?,
        (None, None) => {
            return Err(CliError::Config(
                "either --config or --paper-figure is required".into(),
            ))
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        cfg.output_dir = dir.into();
    }
    cfg.validate()?;
    Ok(cfg)
}
