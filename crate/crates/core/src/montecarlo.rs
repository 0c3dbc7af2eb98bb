//! Replication engine for the simulation study: draw censored
//! competing-risks datasets, evaluate estimators over a `k_n` grid and
//! aggregate median bias and MSE.
//!
//! Every replication owns a [`ReplicationStream`] derived from
//! `(master_seed, replication index)`, and aggregation walks replications in
//! index order, so results do not depend on how replications are scheduled.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimators::{EstimatorId, TailContext, TailFit};
use crate::sampling::{
    make_observed, sample_censoring, sample_competing_risks, validate_specs, CensoringSpec,
    ReplicationStream, SubDistributionSpec, TailLaw,
};
use crate::survival::CompetingRisksSample;

pub const DEFAULT_MASTER_SEED: u64 = 20_150_611;

/// One design point of the simulation study.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ScenarioConfig {
    pub name: String,
    pub specs: Vec<SubDistributionSpec>,
    /// `None` means no censoring.
    pub censoring: Option<CensoringSpec>,
    pub n: usize,
    pub n_rep: usize,
    pub kn_grid: Vec<usize>,
    pub estimators: Vec<EstimatorId>,
    pub target_cause: u32,
    pub master_seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        validate_specs(&self.specs)?;
        if let Some(c) = &self.censoring {
            c.validate()?;
        }
        if self.n < 2 {
            return Err(Error::Config("n must be at least 2"));
        }
        if self.n_rep == 0 {
            return Err(Error::Config("n_rep must be at least 1"));
        }
        if self.kn_grid.is_empty() {
            return Err(Error::Config("kn_grid is empty"));
        }
        if self.kn_grid.iter().any(|&k| k == 0 || k >= self.n) {
            return Err(Error::Config("kn_grid values must lie in [1, n - 1]"));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected"));
        }
        if self.target_cause == 0 || self.target_cause as usize > self.specs.len() {
            return Err(Error::Config("target_cause out of range"));
        }
        Ok(())
    }

    /// Population index of the target cause.
    pub fn true_gamma(&self) -> f64 {
        self.specs[self.target_cause as usize - 1].law.gamma()
    }

    /// Number of (k_n, estimator) cells per replication.
    pub fn cell_count(&self) -> usize {
        self.kn_grid.len() * self.estimators.len()
    }

    /// `(k_n, estimator)` for every cell, k_n-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, EstimatorId)> + '_ {
        self.kn_grid
            .iter()
            .flat_map(move |&kn| self.estimators.iter().map(move |&e| (kn, e)))
    }
}

/// `10, 20, ...` up to `0.96 n` (`10..=480` for `n = 500`).
pub fn default_kn_grid(n: usize) -> Vec<usize> {
    let max = n * 24 / 25;
    (1..)
        .map(|i| 10 * i)
        .take_while(|&k| k <= max && k < n)
        .collect()
}

/// Draws replication `r` and fits every cell. An estimator failure leaves
/// its cell `None`; only invalid configurations are errors.
pub fn simulate_replication(config: &ScenarioConfig, r: u64) -> Result<Vec<Option<TailFit>>> {
    let mut rng = ReplicationStream::new(config.master_seed, r);
    let lifetimes = sample_competing_risks(&config.specs, config.n, &mut rng)?;
    let censorings = match &config.censoring {
        Some(spec) => sample_censoring(spec, config.n, &mut rng)?,
        None => vec![f64::INFINITY; config.n],
    };
    let mut sample = make_observed(&lifetimes, &censorings)?;
    if sample.num_causes() < config.specs.len() as u32 {
        // keep K fixed even if a rare cause was never drawn
        sample =
            CompetingRisksSample::new(sample.observations().to_vec(), config.specs.len() as u32)?;
    }
    let ctx = TailContext::new(&sample);
    Ok(config
        .cells()
        .map(|(kn, est)| ctx.fit(est, config.target_cause, kn).ok())
        .collect())
}

/// One report line.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub kn: usize,
    pub estimator: EstimatorId,
    /// Median over successful replications of `gamma_hat - gamma_k`.
    pub median_bias: Option<f64>,
    pub mse: Option<f64>,
    pub mean: Option<f64>,
    /// Sample standard deviation (`n - 1` denominator); needs two successes.
    pub sd: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub true_gamma: f64,
    pub n_rep: usize,
    pub rows: Vec<ReportRow>,
}

impl MonteCarloReport {
    pub fn row(&self, kn: usize, estimator: EstimatorId) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.kn == kn && r.estimator == estimator)
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    })
}

/// Aggregates per-replication estimates. `estimates[r][cell]` follows
/// [`ScenarioConfig::cells`] order.
pub fn aggregate(config: &ScenarioConfig, estimates: &[Vec<Option<f64>>]) -> MonteCarloReport {
    let truth = config.true_gamma();
    let rows = config
        .cells()
        .enumerate()
        .map(|(cell, (kn, estimator))| {
            let mut errors: Vec<f64> = estimates
                .iter()
                .filter_map(|rep| rep[cell])
                .map(|g| g - truth)
                .collect();
            let m = errors.len();
            let failures = estimates.len() - m;
            if m == 0 {
                return ReportRow {
                    kn,
                    estimator,
                    median_bias: None,
                    mse: None,
                    mean: None,
                    sd: None,
                    failures,
                };
            }
            let mf = m as f64;
            let mse = errors.iter().map(|e| e * e).sum::<f64>() / mf;
            let mean_err = errors.iter().sum::<f64>() / mf;
            let sd = if m > 1 {
                let ss = errors
                    .iter()
                    .map(|e| (e - mean_err) * (e - mean_err))
                    .sum::<f64>();
                Some(libm::sqrt(ss / (mf - 1.0)))
            } else {
                None
            };
            ReportRow {
                kn,
                estimator,
                median_bias: median(&mut errors),
                mse: Some(mse),
                mean: Some(truth + mean_err),
                sd,
                failures,
            }
        })
        .collect();
    MonteCarloReport {
        true_gamma: truth,
        n_rep: estimates.len(),
        rows,
    }
}

/// Gamma estimates of every cell of replication `r`.
pub fn replication_estimates(config: &ScenarioConfig, r: u64) -> Result<Vec<Option<f64>>> {
    Ok(simulate_replication(config, r)?
        .into_iter()
        .map(|f| f.map(|f| f.gamma_hat))
        .collect())
}

/// Runs all replications sequentially.
pub fn run_scenario(config: &ScenarioConfig) -> Result<MonteCarloReport> {
    config.validate()?;
    let estimates = (0..config.n_rep as u64)
        .map(|r| replication_estimates(config, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(config, &estimates))
}

/// `(gamma_1, gamma_2, gamma_C)` and Burr `(tau_1, tau_2, tau_C)` of the
/// three simulation configurations.
const CONFIGS: [([f64; 3], [f64; 3]); 3] = [
    ([0.1, 0.25, 0.3], [12.0, 6.0, 5.0]),
    ([0.1, 0.25, 0.2], [12.0, 6.0, 5.0]),
    ([0.25, 0.1, 0.45], [6.0, 12.0, 5.0]),
];

const C1_VALUES: [(f64, &str); 4] = [(1.0, "c10"), (0.9, "c09"), (0.7, "c07"), (0.5, "c05")];

/// The 24 design points of the simulation study: Fréchet and Burr families,
/// three `(gamma_1, gamma_2, gamma_C)` configurations, `c_1` in
/// `{1, 0.9, 0.7, 0.5}`, `n = 500`, 2000 replications, target cause 1.
///
/// Names follow `<family>-cfg<1|2|3>-c<10|09|07|05>`. With `c_1 = 1` the
/// second cause is absent.
pub fn paper_presets() -> Vec<ScenarioConfig> {
    let mut out = Vec::with_capacity(24);
    for family in ["frechet", "burr"] {
        for (ci, (gammas, taus)) in CONFIGS.iter().enumerate() {
            let law = |i: usize| match family {
                "frechet" => TailLaw::Frechet { gamma: gammas[i] },
                _ => TailLaw::Burr {
                    gamma: gammas[i],
                    tau: taus[i],
                    beta: 1.0,
                },
            };
            for (c1, tag) in C1_VALUES {
                let mut specs = vec![SubDistributionSpec::new(law(0), c1)];
                if c1 < 1.0 {
                    specs.push(SubDistributionSpec::new(law(1), 1.0 - c1));
                }
                out.push(ScenarioConfig {
                    name: format!("{family}-cfg{}-{tag}", ci + 1),
                    specs,
                    censoring: Some(law(2)),
                    n: 500,
                    n_rep: 2000,
                    kn_grid: default_kn_grid(500),
                    estimators: EstimatorId::ALL.to_vec(),
                    target_cause: 1,
                    master_seed: DEFAULT_MASTER_SEED,
                });
            }
        }
    }
    out
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    paper_presets().into_iter().find(|p| p.name == name)
}
