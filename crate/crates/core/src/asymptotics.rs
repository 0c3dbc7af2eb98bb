//! Limit-law bias and variance of the Aalen-Johansen Hill estimator,
//! nuisance plug-ins and confidence intervals.

use crate::error::{Error, Result};
use crate::estimators::{TailContext, TailFit, ThresholdChoice};
use crate::survival::CompetingRisksSample;

/// Parameters of the limit law of `sqrt(v_n) (gamma_hat - gamma_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitParams {
    pub gamma_k: f64,
    pub gamma_c: f64,
    /// `lim F^(k)-bar / F-bar`, in `[0, 1]`.
    pub c: f64,
    /// Second-order parameter, `<= 0`.
    pub rho_k: f64,
    /// `lim sqrt(v_n) g(t_n)`, `>= 0`. Never estimated from data.
    pub lambda: f64,
}

impl LimitParams {
    /// Bias-neglecting parameters (`rho_k = 0`, `lambda = 0`).
    pub fn new(gamma_k: f64, gamma_c: f64, c: f64) -> Self {
        Self {
            gamma_k,
            gamma_c,
            c,
            rho_k: 0.0,
            lambda: 0.0,
        }
    }

    pub fn with_bias(mut self, rho_k: f64, lambda: f64) -> Self {
        self.rho_k = rho_k;
        self.lambda = lambda;
        self
    }

    /// `r = gamma_k / gamma_C`.
    pub fn r(&self) -> f64 {
        self.gamma_k / self.gamma_c
    }

    pub fn sigma_squared(&self) -> Result<f64> {
        sigma_squared(self.gamma_k, self.gamma_c, self.c)
    }

    pub fn mean_shift(&self) -> Result<f64> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Domain("lambda must be nonnegative"));
        }
        Ok(self.lambda * bias_m(self.gamma_k, self.rho_k)?)
    }

    /// Limit law of the index estimator at effective tail size `v_n`.
    pub fn clt(&self, v_n: f64) -> Result<CltDescriptor> {
        if !(v_n > 0.0) {
            return Err(Error::Domain("v_n must be positive"));
        }
        Ok(CltDescriptor {
            mean_shift: self.mean_shift()?,
            variance: self.sigma_squared()?,
            rate: libm::sqrt(v_n),
        })
    }

    /// Limit law of the relative quantile error, rate `sqrt(v_n) / log(d_n)`.
    pub fn quantile_clt(&self, v_n: f64, d_n: f64) -> Result<CltDescriptor> {
        if !(d_n > 1.0) {
            return Err(Error::Domain("d_n must exceed 1"));
        }
        let mut d = self.clt(v_n)?;
        d.rate /= libm::log(d_n);
        Ok(d)
    }
}

/// `rate * (estimate - target) -> N(mean_shift, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltDescriptor {
    pub mean_shift: f64,
    pub variance: f64,
    pub rate: f64,
}

/// Closed interval `[lower, upper]`; `upper` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Asymptotic variance `gamma_k^2 (1 + r^2 - 2 c r) / (1 - r)^3`,
/// `r = gamma_k / gamma_c`.
pub fn sigma_squared(gamma_k: f64, gamma_c: f64, c: f64) -> Result<f64> {
    if !(gamma_k > 0.0 && gamma_k.is_finite()) {
        return Err(Error::Domain("gamma_k must be positive"));
    }
    if !(gamma_c > 0.0) {
        return Err(Error::Domain("gamma_c must be positive"));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain("c must lie in [0, 1]"));
    }
    if gamma_k >= gamma_c {
        return Err(Error::StrongCensoring { gamma_k, gamma_c });
    }
    let r = gamma_k / gamma_c;
    let one_minus_r = 1.0 - r;
    // 1 + r^2 - 2cr = (1 - r)^2 + 2r(1 - c), split to avoid cancellation near r = 1
    let excess = 2.0 * r * (1.0 - c) / (one_minus_r * one_minus_r);
    Ok(gamma_k * gamma_k / one_minus_r * (1.0 + excess))
}

/// Asymptotic bias constant: `gamma_k^2 / (1 - gamma_k rho_k)`, which is
/// `gamma_k^2` at `rho_k = 0`.
pub fn bias_m(gamma_k: f64, rho_k: f64) -> Result<f64> {
    if !(gamma_k > 0.0 && gamma_k.is_finite()) {
        return Err(Error::Domain("gamma_k must be positive"));
    }
    if !(rho_k <= 0.0) {
        return Err(Error::Domain("rho_k must be nonpositive"));
    }
    let g2 = gamma_k * gamma_k;
    if rho_k == 0.0 {
        Ok(g2)
    } else {
        Ok(g2 / (1.0 - gamma_k * rho_k))
    }
}

/// Plug-in estimates of `gamma_k`, `gamma_C` and `c` at a threshold;
/// `rho_k` and `lambda` are left at 0. See [`estimate_gamma_c`] and
/// [`estimate_c`].
pub fn estimate_nuisance(
    sample: &CompetingRisksSample,
    k: u32,
    thr: ThresholdChoice,
) -> Result<LimitParams> {
    let ctx = TailContext::new(sample);
    let fit = ctx.gamma_aj(k, thr)?;
    let gamma_c = estimate_gamma_c(&ctx, fit.threshold)?;
    let c = estimate_c(&ctx, k, fit.threshold)?;
    Ok(LimitParams::new(fit.gamma_hat, gamma_c, c))
}

/// Censoring index: the Kaplan-Meier weighted Hill estimator at `t` with
/// the roles of lifetime and censoring swapped (censorings are the events,
/// weights come from the all-cause lifetime Kaplan-Meier estimate).
///
/// Fails with `NoExceedance` (cause 0) when no censored observation lies
/// above `t`.
pub fn estimate_gamma_c(ctx: &TailContext, t: f64) -> Result<f64> {
    Ok(ctx.km_weighted_hill(|o| !o.delta(), t)?.gamma)
}

/// `F_n^(k)-bar(t) / sum_j F_n^(j)-bar(t)` from the Aalen-Johansen tails.
pub fn estimate_c(ctx: &TailContext, k: u32, t: f64) -> Result<f64> {
    let own = ctx.aj_tail_mass(k, t)?;
    let mut total = 0.0;
    for j in 1..=ctx.num_causes() {
        total += ctx.aj_tail_mass(j, t)?;
    }
    if !(total > 0.0) {
        return Err(Error::NoExceedance {
            cause: k,
            threshold: t,
        });
    }
    Ok((own / total).clamp(0.0, 1.0))
}

fn check_level(level: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::Domain("confidence level must lie in [0, 1)"));
    }
    Ok(normal_quantile((1.0 + level) / 2.0))
}

/// `gamma_hat - lambda m / sqrt(v) -+ z sigma / sqrt(v)`, clipped below at 0.
pub fn confidence_interval(fit: &TailFit, params: &LimitParams, level: f64) -> Result<Interval> {
    let z = check_level(level)?;
    let clt = params.clt(fit.v_n_hat)?;
    let center = fit.gamma_hat - clt.mean_shift / clt.rate;
    let half = z * libm::sqrt(clt.variance) / clt.rate;
    Ok(Interval {
        lower: (center - half).max(0.0),
        upper: (center + half).max(0.0),
    })
}

/// Interval for the true quantile from the relative-error limit law:
/// `q_hat / (1 + (lambda m +- z sigma) log(d_n) / sqrt(v))`.
pub fn quantile_interval(
    q_hat: f64,
    fit: &TailFit,
    params: &LimitParams,
    p: f64,
    level: f64,
) -> Result<Interval> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain("probability must lie in (0, 1)"));
    }
    if p >= fit.tail_mass {
        return Err(Error::ExtrapolationOrder {
            p,
            tail_mass: fit.tail_mass,
        });
    }
    let z = check_level(level)?;
    let clt = params.quantile_clt(fit.v_n_hat, fit.tail_mass / p)?;
    let sigma = libm::sqrt(clt.variance);
    let lo_den = 1.0 + (clt.mean_shift + z * sigma) / clt.rate;
    let hi_den = 1.0 + (clt.mean_shift - z * sigma) / clt.rate;
    let upper = if hi_den > 0.0 {
        q_hat / hi_den
    } else {
        f64::INFINITY
    };
    Ok(Interval {
        lower: q_hat / lo_den,
        upper,
    })
}

// Wichura's AS 241 (PPND16) coefficients, highest degree first.
#[allow(clippy::excessive_precision)]
const CENTRAL_NUM: [f64; 8] = [
    2.5090809287301226727e3,
    3.3430575583588128105e4,
    6.7265770927008700853e4,
    4.5921953931549871457e4,
    1.3731693765509461125e4,
    1.9715909503065514427e3,
    1.3314166789178437745e2,
    3.3871328727963666080,
];
#[allow(clippy::excessive_precision)]
const CENTRAL_DEN: [f64; 8] = [
    5.2264952788528545610e3,
    2.8729085735721942674e4,
    3.9307895800092710610e4,
    2.1213794301586595867e4,
    5.3941960214247511077e3,
    6.8718700749205790830e2,
    4.2313330701600911252e1,
    1.0,
];
#[allow(clippy::excessive_precision)]
const INNER_TAIL_NUM: [f64; 8] = [
    7.7454501427834140764e-4,
    2.2723844989269184583e-2,
    2.4178072517745061177e-1,
    1.2704582524523683826,
    3.6478483247632046050,
    5.7694972214606914055,
    4.6303378461565452959,
    1.4234371107496835773,
];
#[allow(clippy::excessive_precision)]
const INNER_TAIL_DEN: [f64; 8] = [
    1.0507500716444168432e-9,
    5.4759380849953449460e-4,
    1.5198666563616457197e-2,
    1.4810397642748007459e-1,
    6.8976733498510000455e-1,
    1.6763848301838038494,
    2.0531916266377588219,
    1.0,
];
#[allow(clippy::excessive_precision)]
const FAR_TAIL_NUM: [f64; 8] = [
    2.0103343992922881326e-7,
    2.7115555687434875782e-5,
    1.2426609473880784386e-3,
    2.6532189526576123093e-2,
    2.9656057182850489123e-1,
    1.7848265399172913358,
    5.4637849111641143699,
    6.6579046435011037772,
];
#[allow(clippy::excessive_precision)]
const FAR_TAIL_DEN: [f64; 8] = [
    2.0442631033899397856e-15,
    1.4215117583164458887e-7,
    1.8463183175100546818e-5,
    7.8686913114561325910e-4,
    1.4875361290850614852e-2,
    1.3692988092273580531e-1,
    5.9983220655588793769e-1,
    1.0,
];

fn horner(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Standard normal quantile (Wichura's AS 241, about 1e-16 relative
/// accuracy). Returns `-inf`/`+inf` at 0 and 1 and NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if libm::fabs(q) <= 0.425 {
        let r = 0.180625 - q * q;
        return q * horner(&CENTRAL_NUM, r) / horner(&CENTRAL_DEN, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = libm::sqrt(-libm::log(tail));
    let x = if r <= 5.0 {
        let r = r - 1.6;
        horner(&INNER_TAIL_NUM, r) / horner(&INNER_TAIL_DEN, r)
    } else {
        let r = r - 5.0;
        horner(&FAR_TAIL_NUM, r) / horner(&FAR_TAIL_DEN, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}
