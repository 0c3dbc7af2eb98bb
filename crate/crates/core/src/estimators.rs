//! Hill-type estimators of a cause-specific extreme value index and the
//! Weissman extreme quantile.
//!
//! Three estimators are provided:
//!
//! * [`EstimatorId::Aj`]: log-excesses over the threshold integrated against
//!   the Aalen-Johansen estimate of the cause-k incidence. This is the
//!   estimator that accounts for competing causes.
//! * [`EstimatorId::Bdfg`]: the classical Hill estimator divided by the
//!   proportion of uncensored cause-k observations among the top `k_n`.
//! * [`EstimatorId::Km`]: a Kaplan-Meier weighted Hill estimator that treats
//!   failures from other causes as independent censorings.
//!
//! All three coincide with the classical Hill estimator when there is a
//! single cause and no censoring, and `Aj` and `Km` coincide for a single
//! cause under any censoring pattern.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::survival::{product_limit_path, CompetingRisksSample, Observation};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThresholdChoice {
    /// A fixed threshold `t_n > 0`.
    Deterministic(f64),
    /// The random threshold `Z_(n - k_n)`, `1 <= k_n <= n - 1`.
    TopOrder(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EstimatorId {
    Aj,
    Bdfg,
    Km,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 3] = [EstimatorId::Aj, EstimatorId::Bdfg, EstimatorId::Km];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::Aj => "aj",
            EstimatorId::Bdfg => "bdfg",
            EstimatorId::Km => "km",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "aj" => Some(EstimatorId::Aj),
            "bdfg" => Some(EstimatorId::Bdfg),
            "km" => Some(EstimatorId::Km),
            _ => None,
        }
    }
}

impl core::fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Output of a tail index fit.
///
/// `tail_mass` and `censor_survival` are the estimates of `F^(k)`-tail and
/// censoring survival at the threshold used by the estimator: the
/// Aalen-Johansen and censoring Kaplan-Meier values for `Aj` and `Bdfg`, the
/// cause-as-only-event Kaplan-Meier values for `Km`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailFit {
    pub estimator: EstimatorId,
    pub cause: u32,
    pub gamma_hat: f64,
    pub threshold: f64,
    pub n: usize,
    /// Uncensored cause-k observations strictly above the threshold.
    pub n_exceed_cause: usize,
    pub tail_mass: f64,
    pub censor_survival: f64,
    /// `n * tail_mass * censor_survival`, the plug-in effective tail size.
    pub v_n_hat: f64,
}

impl TailFit {
    /// Weissman extrapolation `t_n (tail_mass / p)^gamma_hat` for a
    /// probability `0 < p < tail_mass`.
    pub fn weissman_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain("probability must lie in (0, 1)"));
        }
        if p >= self.tail_mass {
            return Err(Error::ExtrapolationOrder {
                p,
                tail_mass: self.tail_mass,
            });
        }
        Ok(extrapolate_quantile(
            self.threshold,
            self.tail_mass,
            self.gamma_hat,
            p,
        ))
    }
}

/// Raw Weissman formula `threshold * (tail_mass / p)^gamma` with no range
/// checks.
pub fn extrapolate_quantile(threshold: f64, tail_mass: f64, gamma: f64, p: f64) -> f64 {
    threshold * libm::pow(tail_mass / p, gamma)
}

/// A sample sorted once, with the censoring Kaplan-Meier weights
/// precomputed, from which any number of fits can be drawn.
#[derive(Debug, Clone)]
pub struct TailContext {
    sorted: Vec<Observation>,
    num_causes: u32,
    /// `G_n(Z_(j)-)` for each sorted position.
    g_left: Vec<f64>,
    /// Sequential censoring product-limit path.
    g_path: Vec<f64>,
}

impl TailContext {
    pub fn new(sample: &CompetingRisksSample) -> Self {
        let sorted = sample.sorted();
        let g_path = product_limit_path(&sorted, |o| !o.delta());
        let mut g_left = Vec::with_capacity(sorted.len());
        let mut before = 1.0;
        for j in 0..sorted.len() {
            if j > 0 && sorted[j].z != sorted[j - 1].z {
                before = g_path[j - 1];
            }
            g_left.push(before);
        }
        Self {
            sorted,
            num_causes: sample.num_causes(),
            g_left,
            g_path,
        }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn num_causes(&self) -> u32 {
        self.num_causes
    }

    pub fn sorted(&self) -> &[Observation] {
        &self.sorted
    }

    fn check_cause(&self, k: u32) -> Result<()> {
        if k == 0 || k > self.num_causes {
            Err(Error::Domain("cause index out of range"))
        } else {
            Ok(())
        }
    }

    fn check_top_order(&self, k_n: usize) -> Result<()> {
        if k_n == 0 || k_n >= self.len() {
            Err(Error::Domain("k_n must satisfy 1 <= k_n <= n - 1"))
        } else {
            Ok(())
        }
    }

    /// The threshold value: `t_n` itself, or `Z_(n - k_n)`.
    pub fn resolve_threshold(&self, thr: ThresholdChoice) -> Result<f64> {
        match thr {
            ThresholdChoice::Deterministic(t) => {
                if t.is_finite() && t > 0.0 {
                    Ok(t)
                } else {
                    Err(Error::Domain("threshold must be positive and finite"))
                }
            }
            ThresholdChoice::TopOrder(k_n) => {
                self.check_top_order(k_n)?;
                Ok(self.sorted[self.len() - k_n - 1].z)
            }
        }
    }

    /// First sorted position with `z > t`.
    fn first_above(&self, t: f64) -> usize {
        self.sorted.partition_point(|o| o.z <= t)
    }

    /// `G_n(t)`, right-continuous.
    pub fn censor_survival_at(&self, t: f64) -> f64 {
        match self.first_above(t) {
            0 => 1.0,
            j => self.g_path[j - 1],
        }
    }

    /// Aalen-Johansen tail mass `F_n^(k)-bar(t) = sum_{Z_i > t} delta_i 1{cause_i = k} / (n G_n(Z_i-))`.
    pub fn aj_tail_mass(&self, k: u32, t: f64) -> Result<f64> {
        self.check_cause(k)?;
        let mut acc = 0.0;
        for j in self.first_above(t)..self.len() {
            if self.sorted[j].is_cause(k) {
                let w = self.g_left[j];
                if w <= 0.0 {
                    return Err(Error::DegenerateWeight {
                        z: self.sorted[j].z,
                    });
                }
                acc += 1.0 / w;
            }
        }
        Ok(acc / self.len() as f64)
    }

    /// Sum of `log^alpha(Z_i / t) / G_n(Z_i-)` and of `1 / G_n(Z_i-)` over
    /// uncensored cause-k exceedances, with their count.
    fn aj_sums(&self, k: u32, t: f64, alpha: f64) -> Result<(f64, f64, usize)> {
        self.check_cause(k)?;
        let (mut num, mut den, mut count) = (0.0, 0.0, 0usize);
        for j in self.first_above(t)..self.len() {
            let obs = &self.sorted[j];
            if !obs.is_cause(k) {
                continue;
            }
            let w = self.g_left[j];
            if w <= 0.0 {
                return Err(Error::DegenerateWeight { z: obs.z });
            }
            let l = libm::log(obs.z / t);
            let term = if alpha == 1.0 { l } else { libm::pow(l, alpha) };
            num += term / w;
            den += 1.0 / w;
            count += 1;
        }
        if count == 0 {
            return Err(Error::NoExceedance {
                cause: k,
                threshold: t,
            });
        }
        Ok((num, den, count))
    }

    /// Aalen-Johansen weighted Hill estimator of `gamma_k`.
    pub fn gamma_aj(&self, k: u32, thr: ThresholdChoice) -> Result<TailFit> {
        let t = self.resolve_threshold(thr)?;
        let (num, den, count) = self.aj_sums(k, t, 1.0)?;
        let n = self.len();
        let tail_mass = den / n as f64;
        let censor_survival = self.censor_survival_at(t);
        Ok(TailFit {
            estimator: EstimatorId::Aj,
            cause: k,
            gamma_hat: num / den,
            threshold: t,
            n,
            n_exceed_cause: count,
            tail_mass,
            censor_survival,
            v_n_hat: n as f64 * tail_mass * censor_survival,
        })
    }

    /// Generalized log-moment `M_n^(alpha)`; `alpha = 1` is `gamma_aj`.
    pub fn moment_alpha(&self, k: u32, thr: ThresholdChoice, alpha: f64) -> Result<f64> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Domain("alpha must be finite and nonnegative"));
        }
        let t = self.resolve_threshold(thr)?;
        let (num, den, _) = self.aj_sums(k, t, alpha)?;
        Ok(num / den)
    }

    /// Hill estimator over `Z_(n - k_n)` divided by the proportion of
    /// uncensored cause-k observations among the top `k_n`.
    pub fn gamma_bdfg(&self, k: u32, k_n: usize) -> Result<TailFit> {
        self.check_cause(k)?;
        self.check_top_order(k_n)?;
        let n = self.len();
        let t = self.sorted[n - k_n - 1].z;
        let top = &self.sorted[n - k_n..];
        let hill = top.iter().map(|o| libm::log(o.z / t)).sum::<f64>() / k_n as f64;
        let hits = top.iter().filter(|o| o.is_cause(k)).count();
        if hits == 0 {
            return Err(Error::NoExceedance {
                cause: k,
                threshold: t,
            });
        }
        let p_hat = hits as f64 / k_n as f64;
        let count = top.iter().filter(|o| o.is_cause(k) && o.z > t).count();
        let tail_mass = self.aj_tail_mass(k, t)?;
        let censor_survival = self.censor_survival_at(t);
        Ok(TailFit {
            estimator: EstimatorId::Bdfg,
            cause: k,
            gamma_hat: hill / p_hat,
            threshold: t,
            n,
            n_exceed_cause: count,
            tail_mass,
            censor_survival,
            v_n_hat: n as f64 * tail_mass * censor_survival,
        })
    }

    /// Kaplan-Meier weighted Hill estimator with other causes treated as
    /// censorings.
    pub fn gamma_km(&self, k: u32, k_n: usize) -> Result<TailFit> {
        self.check_cause(k)?;
        self.check_top_order(k_n)?;
        let t = self.sorted[self.len() - k_n - 1].z;
        let w = self.km_weighted_hill(|o| o.is_cause(k), t)?;
        Ok(TailFit {
            estimator: EstimatorId::Km,
            cause: k,
            gamma_hat: w.gamma,
            threshold: t,
            n: self.len(),
            n_exceed_cause: w.count,
            tail_mass: w.tail_mass,
            censor_survival: w.censor_survival,
            v_n_hat: self.len() as f64 * w.tail_mass * w.censor_survival,
        })
    }

    /// Single-risk Kaplan-Meier weighted Hill estimator at threshold `t` for
    /// the events picked by `is_event`; everything else is a censoring.
    ///
    /// The tail mass is `S(Z_(n)) - S(t)`-style: `F(inf) - F(t)` with
    /// `F = 1 - S` the product-limit distribution of the events, and each
    /// exceedance is weighted by the complementary product-limit survival
    /// at the preceding order statistic.
    pub(crate) fn km_weighted_hill<F>(&self, is_event: F, t: f64) -> Result<KmHill>
    where
        F: Fn(&Observation) -> bool,
    {
        let n = self.len();
        let s_path = product_limit_path(&self.sorted, &is_event);
        let c_path = product_limit_path(&self.sorted, |o| !is_event(o));
        let first = self.first_above(t);
        let s_at_t = if first == 0 { 1.0 } else { s_path[first - 1] };
        let tail_mass = s_at_t - s_path[n - 1];
        let mut num = 0.0;
        let mut count = 0usize;
        for j in first..n {
            let obs = &self.sorted[j];
            if !is_event(obs) {
                continue;
            }
            let w = if j == 0 { 1.0 } else { c_path[j - 1] };
            if w <= 0.0 {
                return Err(Error::DegenerateWeight { z: obs.z });
            }
            num += libm::log(obs.z / t) / w;
            count += 1;
        }
        if count == 0 || tail_mass <= 0.0 {
            return Err(Error::NoExceedance {
                cause: 0,
                threshold: t,
            });
        }
        let censor_survival = if first == 0 { 1.0 } else { c_path[first - 1] };
        Ok(KmHill {
            gamma: num / (n as f64 * tail_mass),
            tail_mass,
            censor_survival,
            count,
        })
    }

    /// Dispatches to the estimator named by `id` with threshold `Z_(n - k_n)`.
    pub fn fit(&self, id: EstimatorId, k: u32, k_n: usize) -> Result<TailFit> {
        match id {
            EstimatorId::Aj => self.gamma_aj(k, ThresholdChoice::TopOrder(k_n)),
            EstimatorId::Bdfg => self.gamma_bdfg(k, k_n),
            EstimatorId::Km => self.gamma_km(k, k_n).map_err(|e| match e {
                Error::NoExceedance { threshold, .. } => Error::NoExceedance {
                    cause: k,
                    threshold,
                },
                other => other,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct KmHill {
    pub gamma: f64,
    pub tail_mass: f64,
    pub censor_survival: f64,
    pub count: usize,
}

/// Aalen-Johansen weighted Hill estimate of `gamma_k`.
pub fn gamma_aj(sample: &CompetingRisksSample, k: u32, thr: ThresholdChoice) -> Result<TailFit> {
    TailContext::new(sample).gamma_aj(k, thr)
}

/// Constant-weight Hill estimate.
pub fn gamma_bdfg(sample: &CompetingRisksSample, k: u32, k_n: usize) -> Result<TailFit> {
    TailContext::new(sample).gamma_bdfg(k, k_n)
}

/// Kaplan-Meier weighted Hill estimate ignoring cause dependence.
pub fn gamma_km(sample: &CompetingRisksSample, k: u32, k_n: usize) -> Result<TailFit> {
    TailContext::new(sample).fit(EstimatorId::Km, k, k_n)
}

pub fn moment_alpha(
    sample: &CompetingRisksSample,
    k: u32,
    thr: ThresholdChoice,
    alpha: f64,
) -> Result<f64> {
    TailContext::new(sample).moment_alpha(k, thr, alpha)
}

/// Weissman estimate of the cause-k quantile of order `p`, built on the
/// `gamma_aj` fit at `thr`.
pub fn weissman_quantile(
    sample: &CompetingRisksSample,
    k: u32,
    thr: ThresholdChoice,
    p: f64,
) -> Result<f64> {
    gamma_aj(sample, k, thr)?.weissman_quantile(p)
}
