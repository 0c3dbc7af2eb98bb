//! Parallel replication runner. Replications are fitted on a dedicated
//! rayon pool and collected in index order before aggregation, so the
//! report does not depend on the worker count.

use rayon::prelude::*;
use tailcr_core::{aggregate, replication_estimates, MonteCarloReport, ScenarioConfig};

use crate::error::{CliError, CliResult};

pub fn run_parallel(config: &ScenarioConfig, workers: usize) -> CliResult<MonteCarloReport> {
    config.validate()?;
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let estimates = pool.install(|| {
        (0..config.n_rep as u64)
            .into_par_iter()
            .map(|r| replication_estimates(config, r))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(aggregate(config, &estimates))
}
