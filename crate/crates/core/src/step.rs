//! Right-continuous piecewise-constant functions.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A right-continuous step function on the real line.
///
/// `f(t) = initial_value` for `t < breakpoints[0]` and `f(t) = values[i]` on
/// `[breakpoints[i], breakpoints[i + 1])`. Only jump points are stored;
/// evaluation is a binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    initial_value: f64,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, initial_value: f64) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::Domain("breakpoints and values differ in length"));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain("breakpoints must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing"));
        }
        Ok(Self {
            breakpoints,
            values,
            initial_value,
        })
    }

    /// Builds a step function from `(time, value)` pairs sorted by time, in
    /// which the same time may repeat. The last value seen for a time wins and
    /// points that do not change the current value are dropped.
    pub(crate) fn from_sorted_steps<I>(initial_value: f64, steps: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (t, v) in steps {
            match breakpoints.last() {
                Some(&last) if last == t => {
                    *values.last_mut().unwrap() = v;
                }
                _ => {
                    breakpoints.push(t);
                    values.push(v);
                }
            }
        }
        // compress: drop breakpoints whose value equals the value to their left
        let mut out_b = Vec::with_capacity(breakpoints.len());
        let mut out_v = Vec::with_capacity(values.len());
        let mut current = initial_value;
        for (b, v) in breakpoints.into_iter().zip(values) {
            if v != current {
                out_b.push(b);
                out_v.push(v);
                current = v;
            }
        }
        Self {
            breakpoints: out_b,
            values: out_v,
            initial_value,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    /// `f(t)`, right-continuous.
    pub fn eval(&self, t: f64) -> f64 {
        // number of breakpoints <= t
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// `lim_{s -> t-} f(s)`.
    pub fn eval_left(&self, t: f64) -> f64 {
        // number of breakpoints < t
        let idx = self.breakpoints.partition_point(|&b| b < t);
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// `f(+inf)`: the value after the last breakpoint.
    pub fn terminal_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial_value)
    }
}
