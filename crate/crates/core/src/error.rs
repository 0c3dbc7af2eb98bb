use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// No uncensored cause-k observation lies strictly above the threshold.
    #[error("no-exceedance: no uncensored cause-{cause} observation above threshold {threshold}")]
    NoExceedance { cause: u32, threshold: f64 },

    /// A Kaplan-Meier weight needed by the estimator is zero.
    #[error("degenerate-weight: zero Kaplan-Meier weight at z = {z}")]
    DegenerateWeight { z: f64 },

    /// The target probability is not beyond the empirical tail mass.
    #[error("extrapolation-order: p = {p} must be below the tail mass {tail_mass}")]
    ExtrapolationOrder { p: f64, tail_mass: f64 },

    /// gamma_k >= gamma_C, outside the range where the limit law holds.
    #[error("strong-censoring: gamma_k = {gamma_k} is not below gamma_c = {gamma_c}")]
    StrongCensoring { gamma_k: f64, gamma_c: f64 },

    #[error("invalid observation at index {index}: {reason}")]
    InvalidObservation { index: usize, reason: &'static str },

    #[error("config error: {0}")]
    Config(&'static str),
}

impl Error {
    /// Stable short name used by the command line and in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::NoExceedance { .. } => "no-exceedance",
            Error::DegenerateWeight { .. } => "degenerate-weight",
            Error::ExtrapolationOrder { .. } => "extrapolation-order",
            Error::StrongCensoring { .. } => "strong-censoring",
            Error::InvalidObservation { .. } => "invalid-observation",
            Error::Config(_) => "config",
        }
    }
}
