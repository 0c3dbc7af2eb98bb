//! Ordered-sample bookkeeping and product-limit estimators.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::step::StepFunction;

/// One subject: observed time `z = min(X, C)` and, when the lifetime was
/// observed (`delta = 1`), the cause of failure.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Observation {
    pub z: f64,
    /// `Some(k)` with `k >= 1` iff the observation is uncensored.
    pub cause: Option<u32>,
}

impl Observation {
    pub fn event(z: f64, cause: u32) -> Self {
        Self {
            z,
            cause: Some(cause),
        }
    }

    pub fn censored(z: f64) -> Self {
        Self { z, cause: None }
    }

    pub fn delta(&self) -> bool {
        self.cause.is_some()
    }

    pub fn is_cause(&self, k: u32) -> bool {
        self.cause == Some(k)
    }
}

/// Which observations count as events for a product-limit estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventSelector {
    /// `1 - delta`: the Kaplan-Meier estimator of the censoring survival.
    Censoring,
    /// `delta`: the Kaplan-Meier estimator of the all-cause lifetime survival.
    AnyFailure,
    /// `delta * 1{cause = k}`: other causes are treated as censorings.
    Cause(u32),
    /// `1 - delta * 1{cause = k}`: the complement of `Cause(k)`.
    NotCause(u32),
}

impl EventSelector {
    pub fn is_event(&self, obs: &Observation) -> bool {
        match *self {
            EventSelector::Censoring => !obs.delta(),
            EventSelector::AnyFailure => obs.delta(),
            EventSelector::Cause(k) => obs.is_cause(k),
            EventSelector::NotCause(k) => !obs.is_cause(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompetingRisksSample {
    observations: Vec<Observation>,
    num_causes: u32,
}

impl CompetingRisksSample {
    pub fn new(observations: Vec<Observation>, num_causes: u32) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::Domain("sample is empty"));
        }
        if num_causes == 0 {
            return Err(Error::Domain("number of causes must be at least 1"));
        }
        for (index, obs) in observations.iter().enumerate() {
            if !(obs.z.is_finite() && obs.z > 0.0) {
                return Err(Error::InvalidObservation {
                    index,
                    reason: "observed time must be positive and finite",
                });
            }
            if let Some(k) = obs.cause {
                if k == 0 || k > num_causes {
                    return Err(Error::InvalidObservation {
                        index,
                        reason: "cause out of range",
                    });
                }
            }
        }
        Ok(Self {
            observations,
            num_causes,
        })
    }

    /// Like [`new`](Self::new) with `K` set to the largest cause present
    /// (at least 1).
    pub fn from_observations(observations: Vec<Observation>) -> Result<Self> {
        let k = observations
            .iter()
            .filter_map(|o| o.cause)
            .max()
            .unwrap_or(1)
            .max(1);
        Self::new(observations, k)
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn num_causes(&self) -> u32 {
        self.num_causes
    }

    /// Indices of the observations in canonical order: increasing `z`; at
    /// equal `z` uncensored before censored, then by input index.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.observations.len()).collect();
        idx.sort_by(|&a, &b| {
            let (oa, ob) = (&self.observations[a], &self.observations[b]);
            oa.z.total_cmp(&ob.z)
                .then_with(|| ob.delta().cmp(&oa.delta()))
                .then_with(|| a.cmp(&b))
        });
        idx
    }

    /// Observations in canonical order.
    pub fn sorted(&self) -> Vec<Observation> {
        self.canonical_order()
            .into_iter()
            .map(|i| self.observations[i])
            .collect()
    }

    /// The sample with every observed time multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Domain("scale factor must be positive"));
        }
        let obs = self
            .observations
            .iter()
            .map(|o| Observation {
                z: o.z * factor,
                cause: o.cause,
            })
            .collect();
        Self::new(obs, self.num_causes)
    }

    /// Order statistic `Z_(i)`, 1-based.
    pub fn order_statistic(&self, i: usize) -> Option<f64> {
        if i == 0 || i > self.len() {
            return None;
        }
        let mut z: Vec<f64> = self.observations.iter().map(|o| o.z).collect();
        z.sort_by(f64::total_cmp);
        Some(z[i - 1])
    }
}

/// Sequential product-limit survival along an already sorted sample:
/// entry `j` is `prod_{i <= j} (1 - d_i / (n - i))` (0-based `i`).
pub(crate) fn product_limit_path<F>(sorted: &[Observation], is_event: F) -> Vec<f64>
where
    F: Fn(&Observation) -> bool,
{
    let n = sorted.len();
    let mut s = 1.0;
    sorted
        .iter()
        .enumerate()
        .map(|(j, obs)| {
            if is_event(obs) {
                let at_risk = (n - j) as f64;
                s *= 1.0 - 1.0 / at_risk;
            }
            s
        })
        .collect()
}

/// Kaplan-Meier survival estimate with the events picked by `selector`.
/// The returned function starts at 1 and holds its last value after the
/// largest observation.
pub fn km_survival(sample: &CompetingRisksSample, selector: EventSelector) -> Result<StepFunction> {
    km_survival_with(sample, |o| selector.is_event(o))
}

/// [`km_survival`] with an arbitrary event rule.
pub fn km_survival_with<F>(sample: &CompetingRisksSample, is_event: F) -> Result<StepFunction>
where
    F: Fn(&Observation) -> bool,
{
    if sample.is_empty() {
        return Err(Error::Domain("sample is empty"));
    }
    let sorted = sample.sorted();
    let path = product_limit_path(&sorted, is_event);
    Ok(StepFunction::from_sorted_steps(
        1.0,
        sorted.iter().map(|o| o.z).zip(path),
    ))
}

/// Aalen-Johansen cumulative incidence of cause `k`:
/// `F_n^(k)(t) = sum_{Z_i <= t} delta_i 1{cause_i = k} / (n G_n(Z_i-))`,
/// where `g_bar` is the censoring Kaplan-Meier estimate of the same sample.
pub fn aalen_johansen_incidence(
    sample: &CompetingRisksSample,
    k: u32,
    g_bar: &StepFunction,
) -> Result<StepFunction> {
    if k == 0 || k > sample.num_causes() {
        return Err(Error::Domain("cause index out of range"));
    }
    let n = sample.len() as f64;
    let sorted = sample.sorted();
    let mut acc = 0.0;
    let mut steps = Vec::new();
    for obs in sorted.iter().filter(|o| o.is_cause(k)) {
        let w = g_bar.eval_left(obs.z);
        if w <= 0.0 {
            return Err(Error::DegenerateWeight { z: obs.z });
        }
        acc += 1.0 / (n * w);
        steps.push((obs.z, acc));
    }
    Ok(StepFunction::from_sorted_steps(0.0, steps))
}

/// `f(inf) - f(t)` for a nondecreasing step function such as an incidence.
pub fn subsurvival(f: &StepFunction, t: f64) -> f64 {
    let d = f.terminal_value() - f.eval(t);
    if d > 0.0 {
        d
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn hand_sample() -> CompetingRisksSample {
        CompetingRisksSample::new(
            vec![
                Observation::event(1.0, 1),
                Observation::censored(2.0),
                Observation::event(3.0, 2),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn censoring_km_hand_example() {
        let g = km_survival(&hand_sample(), EventSelector::Censoring).unwrap();
        assert_eq!(g.eval(1.5), 1.0);
        assert_eq!(g.eval(2.0), 0.5);
        assert_eq!(g.eval(10.0), 0.5);
        assert_eq!(g.eval_left(2.0), 1.0);
        assert_eq!(g.eval_left(3.0), 0.5);
    }

    #[test]
    fn censoring_km_without_censoring_is_one() {
        let s = CompetingRisksSample::new(
            vec![
                Observation::event(3.0, 1),
                Observation::event(1.0, 1),
                Observation::event(2.0, 2),
            ],
            2,
        )
        .unwrap();
        let g = km_survival(&s, EventSelector::Censoring).unwrap();
        assert!(g.breakpoints().is_empty());
        assert_eq!(g.eval(5.0), 1.0);
    }

    #[test]
    fn all_censored_gives_empirical_survival() {
        let obs: Vec<_> = [4.0, 1.0, 3.0, 2.0, 5.0]
            .iter()
            .map(|&z| Observation::censored(z))
            .collect();
        let s = CompetingRisksSample::new(obs, 1).unwrap();
        let g = km_survival(&s, EventSelector::Censoring).unwrap();
        for i in 1..=5 {
            assert_relative_eq!(g.eval(i as f64), 1.0 - i as f64 / 5.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn aalen_johansen_hand_example() {
        let s = hand_sample();
        let g = km_survival(&s, EventSelector::Censoring).unwrap();
        let f1 = aalen_johansen_incidence(&s, 1, &g).unwrap();
        assert_relative_eq!(f1.eval(1.0), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(f1.terminal_value(), 1.0 / 3.0, epsilon = 1e-15);
        let f2 = aalen_johansen_incidence(&s, 2, &g).unwrap();
        assert_eq!(f2.eval(2.9), 0.0);
        assert_relative_eq!(f2.eval(3.0), 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(subsurvival(&f2, 1.0), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(subsurvival(&f2, 3.0), 0.0);
        assert_eq!(subsurvival(&f2, 50.0), 0.0);
    }

    #[test]
    fn aalen_johansen_without_censoring_is_empirical() {
        let obs = vec![
            Observation::event(5.0, 1),
            Observation::event(1.0, 2),
            Observation::event(2.0, 1),
            Observation::event(4.0, 2),
            Observation::event(3.0, 1),
        ];
        let s = CompetingRisksSample::new(obs, 2).unwrap();
        let g = km_survival(&s, EventSelector::Censoring).unwrap();
        let f1 = aalen_johansen_incidence(&s, 1, &g).unwrap();
        assert_relative_eq!(f1.eval(2.5), 0.2, epsilon = 1e-15);
        assert_relative_eq!(f1.eval(5.0), 0.6, epsilon = 1e-15);
        // tail beyond the median point: cause-1 exceedances of 3 are {5}
        assert_relative_eq!(subsurvival(&f1, 3.0), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn aalen_johansen_rejects_bad_cause() {
        let s = hand_sample();
        let g = km_survival(&s, EventSelector::Censoring).unwrap();
        assert!(matches!(
            aalen_johansen_incidence(&s, 3, &g),
            Err(Error::Domain(_))
        ));
        assert!(aalen_johansen_incidence(&s, 0, &g).is_err());
    }

    #[test]
    fn degenerate_weight_is_reported() {
        let s = hand_sample();
        // a censoring survival that is already 0 before t = 3
        let g = StepFunction::new(vec![2.0], vec![0.0], 1.0).unwrap();
        assert!(matches!(
            aalen_johansen_incidence(&s, 2, &g),
            Err(Error::DegenerateWeight { .. })
        ));
    }

    #[test]
    fn sample_validation() {
        assert!(CompetingRisksSample::new(vec![], 1).is_err());
        assert!(CompetingRisksSample::new(vec![Observation::censored(0.0)], 1).is_err());
        assert!(CompetingRisksSample::new(vec![Observation::event(1.0, 2)], 1).is_err());
        assert!(CompetingRisksSample::new(vec![Observation::event(1.0, 0)], 1).is_err());
        assert!(CompetingRisksSample::new(vec![Observation::event(f64::NAN, 1)], 1).is_err());
    }

    #[test]
    fn ties_put_events_before_censorings() {
        let s = CompetingRisksSample::new(
            vec![
                Observation::censored(2.0),
                Observation::event(2.0, 1),
                Observation::event(1.0, 1),
            ],
            1,
        )
        .unwrap();
        assert_eq!(s.canonical_order(), vec![2, 1, 0]);
        // censoring at 2 happens with one subject at risk after the event
        let g = km_survival(&s, EventSelector::Censoring).unwrap();
        assert_eq!(g.eval(2.0), 0.0);
        assert_eq!(g.eval_left(2.0), 1.0);
    }

    #[test]
    fn order_statistics() {
        let s = hand_sample();
        assert_eq!(s.order_statistic(1), Some(1.0));
        assert_eq!(s.order_statistic(3), Some(3.0));
        assert_eq!(s.order_statistic(0), None);
        assert_eq!(s.order_statistic(4), None);
    }
}
