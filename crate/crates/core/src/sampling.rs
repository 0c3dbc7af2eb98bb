//! Fréchet and Burr laws, competing-risks mixture sampling and the
//! observed-data constructor used by the simulation designs.
//!
//! A cause-k sub-survival is `c_k S_k(t)` where `S_k` is a proper Fréchet
//! (`S(t) = 1 - exp(-t^(-1/gamma))`) or Burr
//! (`S(t) = (1 + t^tau / beta)^(-1/(gamma tau))`, `t >= 0`) survival.
//! Drawing the cause with probability `c_k` and then `X` from `S_k` gives
//! exactly these sub-distributions.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::survival::{CompetingRisksSample, Observation};

/// A proper heavy-tailed law on `(0, inf)` with extreme value index `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)
)]
pub enum TailLaw {
    Frechet { gamma: f64 },
    Burr { gamma: f64, tau: f64, beta: f64 },
}

/// The censoring law is a single proper [`TailLaw`].
pub type CensoringSpec = TailLaw;

impl TailLaw {
    pub fn gamma(&self) -> f64 {
        match *self {
            TailLaw::Frechet { gamma } | TailLaw::Burr { gamma, .. } => gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        match *self {
            TailLaw::Frechet { gamma } if ok(gamma) => Ok(()),
            TailLaw::Burr { gamma, tau, beta } if ok(gamma) && ok(tau) && ok(beta) => Ok(()),
            _ => Err(Error::Config(
                "distribution parameters must be positive and finite",
            )),
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match *self {
            TailLaw::Frechet { gamma } => -libm::expm1(-libm::pow(t, -1.0 / gamma)),
            TailLaw::Burr { gamma, tau, beta } => {
                libm::pow(1.0 + libm::pow(t, tau) / beta, -1.0 / (gamma * tau))
            }
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            TailLaw::Frechet { gamma } => libm::exp(-libm::pow(t, -1.0 / gamma)),
            TailLaw::Burr { .. } => 1.0 - self.survival(t),
        }
    }

    /// The `t` with `survival(t) = s`, `0 < s < 1`.
    pub fn inverse_survival(&self, s: f64) -> Result<f64> {
        match *self {
            TailLaw::Frechet { gamma } => {
                if !(s > 0.0 && s < 1.0) {
                    return Err(Error::Domain("probability must lie in (0, 1)"));
                }
                // -log(1 - s) without cancellation for small s
                Ok(libm::pow(-libm::log1p(-s), -gamma))
            }
            TailLaw::Burr { gamma, tau, beta } => burr_survival_inverse(s, gamma, tau, beta),
        }
    }

    /// Draws one value by inversion from a uniform on `(0, 1)`.
    fn draw(&self, u: f64) -> f64 {
        match *self {
            TailLaw::Frechet { gamma } => libm::pow(-libm::log(u), -gamma),
            TailLaw::Burr { gamma, tau, beta } => {
                libm::pow(beta * (libm::pow(u, -gamma * tau) - 1.0), 1.0 / tau)
            }
        }
    }
}

/// One cause-specific component of the lifetime law.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubDistributionSpec {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub law: TailLaw,
    /// Mixture weight `c_k = P(cause = k)`, in `(0, 1]`.
    pub weight: f64,
}

impl SubDistributionSpec {
    pub fn new(law: TailLaw, weight: f64) -> Self {
        Self { law, weight }
    }

    /// `F^(k)-bar(t) = c_k S_k(t)`.
    pub fn subsurvival(&self, t: f64) -> f64 {
        self.weight * self.law.survival(t)
    }

    /// The `x` with `F^(k)-bar(x) = p`, for `0 < p < c_k`.
    pub fn subsurvival_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < self.weight) {
            return Err(Error::Domain("p must lie in (0, c_k)"));
        }
        self.law.inverse_survival(p / self.weight)
    }
}

pub fn validate_specs(specs: &[SubDistributionSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Config("at least one cause is required"));
    }
    let mut sum = 0.0;
    for s in specs {
        s.law.validate()?;
        if !(s.weight > 0.0 && s.weight <= 1.0) {
            return Err(Error::Config("mixture weights must lie in (0, 1]"));
        }
        sum += s.weight;
    }
    if libm::fabs(sum - 1.0) > 1e-12 {
        return Err(Error::Config("mixture weights must sum to 1"));
    }
    Ok(())
}

/// Overall lifetime survival `sum_k c_k S_k(t)`.
pub fn mixture_survival(specs: &[SubDistributionSpec], t: f64) -> f64 {
    specs.iter().map(|s| s.subsurvival(t)).sum()
}

/// Fréchet quantile `(-log u)^(-gamma)`: the `t` with `exp(-t^(-1/gamma)) = u`.
pub fn frechet_quantile(u: f64, gamma: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain("probability must lie in (0, 1)"));
    }
    if !(gamma > 0.0) {
        return Err(Error::Domain("gamma must be positive"));
    }
    Ok(libm::pow(-libm::log(u), -gamma))
}

/// Burr survival inverse `(beta (s^(-gamma tau) - 1))^(1/tau)`.
pub fn burr_survival_inverse(s: f64, gamma: f64, tau: f64, beta: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain("probability must lie in (0, 1)"));
    }
    if !(gamma > 0.0 && tau > 0.0 && beta > 0.0) {
        return Err(Error::Domain("Burr parameters must be positive"));
    }
    // s^(-a) - 1 = expm1(-a log s)
    Ok(libm::pow(
        beta * libm::expm1(-gamma * tau * libm::log(s)),
        1.0 / tau,
    ))
}

/// A reproducible random stream for one replication: ChaCha8 keyed by the
/// master seed, with the replication index as the stream number.
#[derive(Debug, Clone)]
pub struct ReplicationStream(ChaCha8Rng);

impl ReplicationStream {
    pub fn new(master_seed: u64, replication: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(replication);
        Self(rng)
    }
}

impl RngCore for ReplicationStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Uniform on the open interval `(0, 1)`: midpoints of a 2^-52 grid.
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// A latent lifetime with its cause.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifetime {
    pub x: f64,
    pub cause: u32,
}

/// Draws `n` lifetimes: cause `k` with probability `c_k`, then `X` from `S_k`.
pub fn sample_competing_risks<R: RngCore + ?Sized>(
    specs: &[SubDistributionSpec],
    n: usize,
    rng: &mut R,
) -> Result<Vec<Lifetime>> {
    validate_specs(specs)?;
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1"));
    }
    let last = specs.len() - 1;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u = open_uniform(rng);
        let mut acc = 0.0;
        let mut idx = last;
        for (i, s) in specs.iter().enumerate().take(last) {
            acc += s.weight;
            if u < acc {
                idx = i;
                break;
            }
        }
        let x = specs[idx].law.draw(open_uniform(rng));
        out.push(Lifetime {
            x,
            cause: idx as u32 + 1,
        });
    }
    Ok(out)
}

/// Draws `n` censoring times.
pub fn sample_censoring<R: RngCore + ?Sized>(
    spec: &CensoringSpec,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1"));
    }
    Ok((0..n).map(|_| spec.draw(open_uniform(rng))).collect())
}

/// `Z = min(X, C)`, `delta = 1{X <= C}`, cause kept iff `delta = 1`. The
/// number of causes is the largest latent cause. Censoring times may be
/// `+inf` (no censoring).
pub fn make_observed(lifetimes: &[Lifetime], censorings: &[f64]) -> Result<CompetingRisksSample> {
    if lifetimes.len() != censorings.len() {
        return Err(Error::Domain(
            "lifetimes and censoring times differ in length",
        ));
    }
    let num_causes = lifetimes.iter().map(|l| l.cause).max().unwrap_or(1);
    let obs = lifetimes
        .iter()
        .zip(censorings)
        .map(|(l, &c)| {
            if l.x <= c {
                Observation::event(l.x, l.cause)
            } else {
                Observation::censored(c)
            }
        })
        .collect();
    CompetingRisksSample::new(obs, num_causes)
}
