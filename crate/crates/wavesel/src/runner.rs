//! Parallel Monte Carlo runner.
//!
//! Replicates are independent (one random stream per replicate index) and
//! collected in index order, so results are identical for any thread count.

use rayon::prelude::*;
use wavesel_core::sim::{aggregate, run_replicate, MonteCarloResult, ReplicateOutcome, ScenarioConfig};

use crate::error::{CliError, CliResult};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "WAVESEL_THREADS";

/// Thread count from [`THREADS_ENV`]; `None` lets rayon decide.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Input(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

pub fn build_pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Input(format!("cannot start worker threads: {e}")))
}

pub fn run_cell(config: &ScenarioConfig) -> CliResult<MonteCarloResult> {
    config.validate()?;
    let outcomes: Vec<ReplicateOutcome> =
        (0..config.replications as u64).into_par_iter().map(|i| run_replicate(config, i)).collect();
    Ok(aggregate(config, &outcomes))
}

/// Runs every cell on `pool`, cells in order, replicates in parallel.
pub fn run_cells(pool: &rayon::ThreadPool, cells: &[ScenarioConfig]) -> CliResult<Vec<MonteCarloResult>> {
    pool.install(|| cells.iter().map(run_cell).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavesel_core::glm::{Family, Link};
    use wavesel_core::sim::{run_scenario, Dependence};

    #[test]
    fn parallel_matches_sequential() {
        let cells = [
            ScenarioConfig::s1("f3", 64, Dependence::Moderate).with_replications(16),
            ScenarioConfig::s4(Family::Gamma, Link::Log, 64, Dependence::Weak).with_replications(16),
        ];
        for threads in [1, 3] {
            let pool = build_pool(Some(threads)).unwrap();
            let parallel = run_cells(&pool, &cells).unwrap();
            for (cell, got) in cells.iter().zip(&parallel) {
                assert_eq!(&run_scenario(cell).unwrap(), got);
            }
        }
    }
}
