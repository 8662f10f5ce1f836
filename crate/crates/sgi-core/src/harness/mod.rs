//! Experiment harness: configuration, run orchestration, deterministic
//! outputs, checkpointing, and worker-pool handling for the front end.

pub mod checkpoint;
pub mod config;
pub mod runs;

pub use config::ExperimentConfig;
pub use runs::{
    observables_csv, run_full_3d, run_simplified_1d, run_sweep, write_fieldmap, FieldmapSpec,
    RunOutcome, SweepMode, SweepRow,
};

use crate::error::{Result, SgiError};

/// Environment variable consulted when no explicit worker count is given.
pub const WORKERS_ENV: &str = "SGI_WORKERS";

/// Decide how many worker threads to use: explicit flag, then the
/// `SGI_WORKERS` environment variable, then every available core.
pub fn resolve_workers(explicit: Option<usize>) -> Result<usize> {
    let validate = |n: usize, origin: &str| -> Result<usize> {
        if n == 0 {
            return Err(SgiError::Config(format!(
                "worker count from {origin} must be at least 1"
            )));
        }
        Ok(n)
    };
    if let Some(n) = explicit {
        return validate(n, "--workers");
    }
    if let Ok(text) = std::env::var(WORKERS_ENV) {
        let n = text.trim().parse::<usize>().map_err(|_| {
            SgiError::Config(format!("{WORKERS_ENV}={text:?} is not a worker count"))
        })?;
        return validate(n, WORKERS_ENV);
    }
    Ok(std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1))
}

/// Install the global worker pool. Call once at process start; a pool that
/// is already installed with the same size is accepted silently.
pub fn install_worker_pool(workers: usize) -> Result<()> {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
    {
        Ok(()) => Ok(()),
        Err(_) if rayon::current_num_threads() == workers => Ok(()),
        Err(e) => Err(SgiError::Config(format!(
            "worker pool: {e} (current size {})",
            rayon::current_num_threads()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_worker_count_wins() {
        assert_eq!(resolve_workers(Some(3)).unwrap(), 3);
        assert!(resolve_workers(Some(0)).is_err());
    }
}
