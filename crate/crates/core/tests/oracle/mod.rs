//! Brute-force reference implementations, written directly from the
//! defining sums and products without sharing code with the crate.
//! They assume tie-free samples.

#![allow(dead_code)]

/// `(z, cause)` with `cause = 0` for a censored observation.
pub type Obs = (f64, u32);

fn at_risk(data: &[Obs], t: f64) -> f64 {
    data.iter().filter(|o| o.0 >= t).count() as f64
}

/// Product-limit survival at `t` for the events flagged by `event`.
pub fn km(data: &[Obs], event: impl Fn(&Obs) -> bool, t: f64) -> f64 {
    data.iter()
        .filter(|o| o.0 <= t && event(o))
        .map(|o| 1.0 - 1.0 / at_risk(data, o.0))
        .product()
}

/// Left limit of the product-limit survival at `t`.
pub fn km_left(data: &[Obs], event: impl Fn(&Obs) -> bool, t: f64) -> f64 {
    data.iter()
        .filter(|o| o.0 < t && event(o))
        .map(|o| 1.0 - 1.0 / at_risk(data, o.0))
        .product()
}

pub fn censoring_left(data: &[Obs], t: f64) -> f64 {
    km_left(data, |o| o.1 == 0, t)
}

/// Aalen-Johansen incidence of cause `k` at `t`.
pub fn aj_incidence(data: &[Obs], k: u32, t: f64) -> f64 {
    let n = data.len() as f64;
    data.iter()
        .filter(|o| o.1 == k && o.0 <= t)
        .map(|o| 1.0 / (n * censoring_left(data, o.0)))
        .sum()
}

fn sorted_z(data: &[Obs]) -> Vec<f64> {
    let mut z: Vec<f64> = data.iter().map(|o| o.0).collect();
    z.sort_by(|a, b| a.partial_cmp(b).unwrap());
    z
}

pub fn threshold(data: &[Obs], kn: usize) -> f64 {
    sorted_z(data)[data.len() - kn - 1]
}

/// Classical Hill estimator on the top `kn` order statistics.
pub fn hill(z: &[f64], kn: usize) -> f64 {
    let mut z = z.to_vec();
    z.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (0..kn).map(|i| (z[i] / z[kn]).ln()).sum::<f64>() / kn as f64
}

/// Aalen-Johansen weighted Hill estimator at the deterministic threshold `t`.
pub fn gamma_aj(data: &[Obs], k: u32, t: f64) -> f64 {
    let n = data.len() as f64;
    let tail: f64 = data
        .iter()
        .filter(|o| o.1 == k && o.0 > t)
        .map(|o| 1.0 / (n * censoring_left(data, o.0)))
        .sum();
    let s: f64 = data
        .iter()
        .filter(|o| o.1 == k && o.0 > t)
        .map(|o| (o.0 / t).ln() / censoring_left(data, o.0))
        .sum();
    s / (n * tail)
}

/// The Kaplan-Meier weighted estimator that treats causes other than `k`
/// as censoring, on the top `kn` order statistics.
pub fn gamma_km(data: &[Obs], k: u32, kn: usize) -> f64 {
    let n = data.len();
    let z = sorted_z(data);
    let t = z[n - kn - 1];
    let ev = |o: &Obs| o.1 == k;
    let not_ev = |o: &Obs| o.1 != k;
    // F-bar_{n,b}(t) = F_{n,b}(inf) - F_{n,b}(t) with F_{n,b} = 1 - KM
    let s_end = km(data, ev, f64::INFINITY);
    let tail = km(data, ev, t) - s_end;
    let mut sum = 0.0;
    for i in 1..=kn {
        let zi = z[n - i];
        let o = data.iter().find(|o| o.0 == zi).unwrap();
        if o.1 == k {
            let prev = z[n - i - 1];
            sum += (zi / t).ln() / km(data, not_ev, prev);
        }
    }
    sum / (n as f64 * tail)
}

/// Constant-weight Hill estimator.
pub fn gamma_bdfg(data: &[Obs], k: u32, kn: usize) -> f64 {
    let z = sorted_z(data);
    let n = data.len();
    let p = data.iter().filter(|o| o.1 == k && o.0 >= z[n - kn]).count() as f64 / kn as f64;
    hill(&z, kn) / p
}

/// Solves `f(t) = target` for a nonincreasing `f` with `f(0) = 1` by
/// bisection on `(0, inf)`.
pub fn bisect_decreasing(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else if lo == 0.0 && hi > 1e-300 {
            // shrink geometrically towards 0 first
            hi * 0.25
        } else {
            0.5 * (lo + hi)
        };
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Fréchet survival `1 - exp(-t^(-1/g))`.
pub fn frechet_sf(t: f64, g: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else {
        -(-t.powf(-1.0 / g)).exp_m1()
    }
}

/// Burr survival `(1 + t^tau / beta)^(-1/(g tau))`.
pub fn burr_sf(t: f64, g: f64, tau: f64, beta: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else {
        (1.0 + t.powf(tau) / beta).powf(-1.0 / (g * tau))
    }
}
