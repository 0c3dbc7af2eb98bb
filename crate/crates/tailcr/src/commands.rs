//! `fit`, `quantile` and `simulate` as library calls; the binary only
//! parses flags and prints.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use tailcr_core::{
    confidence_interval, estimate_c, estimate_gamma_c, quantile_interval, CompetingRisksSample,
    Error, Interval, LimitParams, ScenarioConfig, TailContext, TailFit, ThresholdChoice,
};

use crate::error::{CliError, CliResult};
use crate::report::{Manifest, ReportFile};
use crate::runner::run_parallel;

/// Inputs to the limit law. Unset `gamma_c` and `c` are estimated from the
/// data at the fit threshold.
#[derive(Debug, Clone, Copy)]
pub struct InferenceOptions {
    pub gamma_c: Option<f64>,
    pub c: Option<f64>,
    pub lambda: f64,
    pub rho: f64,
    pub level: f64,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            gamma_c: None,
            c: None,
            lambda: 0.0,
            rho: 0.0,
            level: 0.95,
        }
    }
}

impl InferenceOptions {
    fn check(&self) -> CliResult<()> {
        let usage = |m: &str| Err(CliError::Usage(m.into()));
        if matches!(self.gamma_c, Some(g) if g.is_nan() || g <= 0.0) {
            return usage("--gamma-c must be positive");
        }
        if matches!(self.c, Some(c) if !(0.0..=1.0).contains(&c)) {
            return usage("--c must lie in [0, 1]");
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return usage("--lambda must be finite and nonnegative");
        }
        if !(self.rho.is_finite() && self.rho <= 0.0) {
            return usage("--rho must be finite and nonpositive");
        }
        if !(0.0..1.0).contains(&self.level) {
            return usage("--level must lie in [0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    #[serde(flatten)]
    pub fit: TailFit,
    /// Observations of any kind strictly above the threshold.
    pub n_exceed_total: usize,
    /// `None` when no censored observation exceeds the threshold; the
    /// limit law then uses `gamma_C = inf`.
    pub gamma_c: Option<f64>,
    pub c: f64,
    pub rho: f64,
    pub lambda: f64,
    pub sigma_squared: Option<f64>,
    pub level: f64,
    pub interval: Option<Interval>,
    /// Why `interval` is absent.
    pub interval_note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantileReport {
    #[serde(flatten)]
    pub base: FitReport,
    pub p: f64,
    pub quantile: f64,
    pub quantile_interval: Option<Interval>,
}

struct Inference {
    report: FitReport,
    params: Option<LimitParams>,
}

fn infer(
    sample: &CompetingRisksSample,
    cause: u32,
    threshold: ThresholdChoice,
    opts: &InferenceOptions,
) -> CliResult<Inference> {
    opts.check()?;
    let ctx = TailContext::new(sample);
    let fit = ctx.gamma_aj(cause, threshold)?;
    let t = fit.threshold;
    let gamma_c = match opts.gamma_c {
        Some(g) => Some(g),
        None => match estimate_gamma_c(&ctx, t) {
            Ok(g) => Some(g),
            Err(Error::NoExceedance { .. }) => None,
            Err(e) => return Err(e.into()),
        },
    };
    let c = match opts.c {
        Some(c) => c,
        None => estimate_c(&ctx, cause, t)?,
    };
    let params = LimitParams::new(fit.gamma_hat, gamma_c.unwrap_or(f64::INFINITY), c)
        .with_bias(opts.rho, opts.lambda);
    let (sigma_squared, interval, note, params) = match params
        .sigma_squared()
        .and_then(|s| Ok((s, confidence_interval(&fit, &params, opts.level)?)))
    {
        Ok((s, ci)) => (Some(s), Some(ci), None, Some(params)),
        Err(e) => (None, None, Some(e.to_string()), None),
    };
    let n_exceed_total = sample.observations().iter().filter(|o| o.z > t).count();
    Ok(Inference {
        report: FitReport {
            fit,
            n_exceed_total,
            gamma_c,
            c,
            rho: opts.rho,
            lambda: opts.lambda,
            sigma_squared,
            level: opts.level,
            interval,
            interval_note: note,
        },
        params,
    })
}

pub fn fit(
    sample: &CompetingRisksSample,
    cause: u32,
    threshold: ThresholdChoice,
    opts: &InferenceOptions,
) -> CliResult<FitReport> {
    Ok(infer(sample, cause, threshold, opts)?.report)
}

pub fn quantile(
    sample: &CompetingRisksSample,
    cause: u32,
    k_n: usize,
    p: f64,
    opts: &InferenceOptions,
) -> CliResult<QuantileReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::Usage("--p must lie in (0, 1)".into()));
    }
    let inf = infer(sample, cause, ThresholdChoice::TopOrder(k_n), opts)?;
    let fit = &inf.report.fit;
    let q = fit.weissman_quantile(p)?;
    let quantile_interval = match &inf.params {
        Some(params) => Some(quantile_interval(q, fit, params, p, opts.level)?),
        None => None,
    };
    Ok(QuantileReport {
        base: inf.report,
        p,
        quantile: q,
        quantile_interval,
    })
}

fn fmt_interval(
    out: &mut String,
    label: &str,
    level: f64,
    ci: Option<&Interval>,
    note: Option<&str>,
) {
    match (ci, note) {
        (Some(ci), _) => writeln!(out, "{label:<16} {level} [{}, {}]", ci.lower, ci.upper),
        (None, Some(n)) => writeln!(out, "{label:<16} unavailable ({n})"),
        (None, None) => writeln!(out, "{label:<16} unavailable"),
    }
    .unwrap();
}

impl FitReport {
    pub fn to_text(&self) -> String {
        let f = &self.fit;
        let mut out = String::new();
        let gamma_c = self
            .gamma_c
            .map_or("inf (no censored exceedance)".to_string(), |g| {
                g.to_string()
            });
        let sigma = self
            .sigma_squared
            .map_or("unavailable".to_string(), |s| s.to_string());
        for (k, v) in [
            ("cause", f.cause.to_string()),
            ("n", f.n.to_string()),
            ("threshold", f.threshold.to_string()),
            ("exceedances", self.n_exceed_total.to_string()),
            ("cause exceed.", f.n_exceed_cause.to_string()),
            ("gamma_hat", f.gamma_hat.to_string()),
            ("tail_mass", f.tail_mass.to_string()),
            ("censor_surv", f.censor_survival.to_string()),
            ("v_n_hat", f.v_n_hat.to_string()),
            ("gamma_c", gamma_c),
            ("c", self.c.to_string()),
            ("sigma^2", sigma),
        ] {
            writeln!(out, "{k:<16} {v}").unwrap();
        }
        fmt_interval(
            &mut out,
            "gamma CI",
            self.level,
            self.interval.as_ref(),
            self.interval_note.as_deref(),
        );
        out
    }
}

impl QuantileReport {
    pub fn to_text(&self) -> String {
        let mut out = self.base.to_text();
        writeln!(out, "{:<16} {}", "p", self.p).unwrap();
        writeln!(out, "{:<16} {}", "quantile", self.quantile).unwrap();
        fmt_interval(
            &mut out,
            "quantile CI",
            self.base.level,
            self.quantile_interval.as_ref(),
            self.base.interval_note.as_deref(),
        );
        out
    }
}

/// Runs the scenario and writes the report to `out` through a temporary
/// file in the same directory, renamed into place only once complete.
pub fn simulate(config: &ScenarioConfig, workers: usize, out: &Path) -> CliResult<ReportFile> {
    let report = run_parallel(config, workers)?;
    let file = ReportFile {
        report,
        manifest: Manifest::for_config(config),
    };
    let text = file.render();
    let dir = match out.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(text.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(out).map_err(|e| CliError::io(out, e.error))?;
    Ok(file)
}
