//! Config-driven experiment runner behind the `tfim` binary.

pub mod config;
pub mod experiments;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::json;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use experiments::{execute, ExperimentOutput, RunContext};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "TFIM_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("oracle validation failed: {0}")]
    OracleMismatch(String),
}

impl CliError {
    /// Process exit code: 2 for bad configs, 3 when an ensemble exceeds its
    /// failure budget, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(crate::Error::TooManyFailures { .. }) => 3,
            _ => 1,
        }
    }
}

/// Worker count: explicit value, then the config, then `TFIM_WORKERS`, then
/// the number of available cores.
pub fn resolve_workers(flag: Option<usize>, config: Option<usize>) -> usize {
    flag.or(config)
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

/// What a finished run wrote.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub output: PathBuf,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub summary: serde_json::Value,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub quiet: bool,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let cfg = ExperimentConfig::load(path)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Runs an experiment and writes its tables and `manifest.json`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    config_path: Option<&Path>,
    opts: &RunOptions,
) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let output = opts.output.clone().unwrap_or_else(|| cfg.output.clone());
    std::fs::create_dir_all(&output).map_err(|e| CliError::Io(format!("{}: {e}", output.display())))?;
    let ctx = RunContext {
        workers: resolve_workers(opts.workers, cfg.workers),
        progress: !opts.quiet,
        output: output.clone(),
    };
    let result = execute(cfg, &ctx)?;
    let mut files = Vec::new();
    for table in &result.tables {
        let path = output.join(format!("{}.{}", table.name, cfg.format.extension()));
        table.write(&path, cfg.format)?;
        files.push(path);
    }
    for w in &result.warnings {
        log::warn!("{w}");
    }
    let manifest = json!({
        "experiment": cfg.experiment.name(),
        "config_path": config_path.map(|p| p.display().to_string()),
        "config": cfg,
        "seed": cfg.model.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "workers": ctx.workers,
        "started_unix": started,
        "wall_seconds": clock.elapsed().as_secs_f64(),
        "files": files.iter().map(|f| f.file_name().unwrap_or_default().to_string_lossy()).collect::<Vec<_>>(),
        "warnings": result.warnings,
        "summary": result.summary,
    });
    let manifest_path = output.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&manifest_path, text).map_err(|e| CliError::Io(format!("{}: {e}", manifest_path.display())))?;
    files.push(manifest_path);
    if let Some(reports) = &result.oracle {
        let failed: Vec<String> = reports
            .iter()
            .flat_map(|r| r.checks.iter().filter(|c| !c.passed()).map(move |c| format!("L={} {}", r.length, c.name)))
            .collect();
        if !failed.is_empty() {
            return Err(CliError::OracleMismatch(failed.join(", ")));
        }
    }
    Ok(RunSummary {
        output,
        files,
        warnings: result.warnings,
        summary: result.summary,
    })
}
