//! Cause-specific extreme value index estimation for heavy-tailed lifetimes
//! observed under right censoring and competing risks.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and the multi-threaded replication runner live in the `tailcr` crate.

#![no_std]
// NaN must fail the `!(x > 0.0)` style domain checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod asymptotics;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod sampling;
pub mod step;
pub mod survival;

pub use asymptotics::{
    bias_m, confidence_interval, estimate_c, estimate_gamma_c, estimate_nuisance, normal_quantile,
    quantile_interval, sigma_squared, CltDescriptor, Interval, LimitParams,
};
pub use error::{Error, Result};
pub use estimators::{
    gamma_aj, gamma_bdfg, gamma_km, moment_alpha, weissman_quantile, EstimatorId, TailContext,
    TailFit, ThresholdChoice,
};
pub use montecarlo::{
    aggregate, default_kn_grid, paper_presets, preset, replication_estimates, run_scenario,
    simulate_replication, MonteCarloReport, ReportRow, ScenarioConfig, DEFAULT_MASTER_SEED,
};
pub use sampling::{
    burr_survival_inverse, frechet_quantile, make_observed, open_uniform, sample_censoring,
    sample_competing_risks, CensoringSpec, Lifetime, ReplicationStream, SubDistributionSpec,
    TailLaw,
};
pub use step::StepFunction;
pub use survival::{
    aalen_johansen_incidence, km_survival, subsurvival, CompetingRisksSample, EventSelector,
    Observation,
};
