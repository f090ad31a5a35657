//! Batch front-end: reads one JSON problem definition, runs a task and
//! writes reproducible CSV, SVG and JSON artifacts.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod run;
pub mod verify;

pub use config::{Overrides, ProblemConfig, Task};
pub use error::{CliError, Result};
pub use run::{run, Outcome};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "CORONA_SPECTRA_THREADS";

/// Reads the config at `path`, applies overrides and runs `task`.
pub fn run_file(task: Task, path: &std::path::Path, overrides: &Overrides) -> Result<Outcome> {
    let raw = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let text = std::str::from_utf8(&raw).map_err(|e| CliError::Validation(format!("config is not UTF-8: {e}")))?;
    let mut cfg = ProblemConfig::from_json(text)?;
    cfg.apply(overrides);
    run(task, &cfg, &raw)
}

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    // A pool that already exists (tests, embedding) is left as is.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
