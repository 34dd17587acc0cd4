use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("r = {r} lies outside the profile domain (r > {lower})")]
    Domain { r: f64, lower: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("coefficient `a` vanishes on a set of positive measure in ({lo}, {hi}); use the f-based functional")]
    CoefficientVanishes { lo: f64, hi: f64 },

    #[error("missing profile `{0}`")]
    MissingProfile(&'static str),

    #[error("tail integral diverges: decay exponent {exponent} is not below -2")]
    DivergentTail { exponent: f64 },

    #[error("no counterexample for nu = {nu}: nu >= -1 forces triviality of every solution")]
    NoCounterexample { nu: f64 },

    #[error("interval ({lo}, {hi}) is outside the available data range ({data_lo}, {data_hi})")]
    OutsideData {
        lo: f64,
        hi: f64,
        data_lo: f64,
        data_hi: f64,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InvalidProfile(_) => "invalid_profile",
            Error::CoefficientVanishes { .. } => "coefficient_vanishes",
            Error::MissingProfile(_) => "missing_profile",
            Error::DivergentTail { .. } => "divergent_tail",
            Error::NoCounterexample { .. } => "no_counterexample",
            Error::OutsideData { .. } => "outside_data",
            Error::Hypothesis(_) => "hypothesis",
            Error::NonFinite(_) => "non_finite",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
