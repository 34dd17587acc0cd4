//! Bundled problem families with known answers.

use serde::{Deserialize, Serialize};

use crate::criterion::SeriesPattern;
use crate::error::{invalid, Result};
use crate::problem::ProblemSpec;
use crate::profiles::RadialProfile;
use crate::proofsim::BlowupParams;

/// Named presets selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `b = r^l` at the borderline power.
    PowerWeight,
    /// `b = r^l ln^ν r` at the borderline power with `ν = -1`.
    CriticalLogWeight,
    /// Borderline weight switched on only on `4^i < r < 2·4^i`, `σ = 2^{1/4}`.
    DyadicWindows,
    /// The same weight as a series over `r_i = 4^i`.
    DyadicSeries,
    /// Constant `b` in `R^3`, `λ = 2`, `σ = 4`: divergent criterion.
    BlowupDivergent,
    /// `b = r^{-2}` with the same parameters: convergent criterion.
    BlowupConvergent,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::PowerWeight,
        Preset::CriticalLogWeight,
        Preset::DyadicWindows,
        Preset::DyadicSeries,
        Preset::BlowupDivergent,
        Preset::BlowupConvergent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PowerWeight => "power_weight",
            Preset::CriticalLogWeight => "critical_log_weight",
            Preset::DyadicWindows => "dyadic_windows",
            Preset::DyadicSeries => "dyadic_series",
            Preset::BlowupDivergent => "blowup_divergent",
            Preset::BlowupConvergent => "blowup_convergent",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
            invalid(
                "preset",
                format!("unknown preset {name:?}; known: {}", known.join(", ")),
            )
        })
    }

    /// The problem with default parameters `n = 3`, `k = 1`, `λ = 2`.
    pub fn spec(self) -> ProblemSpec {
        let (n, k, lambda) = (3, 1, 2.0);
        match self {
            Preset::PowerWeight => power_weight(n, k, lambda, borderline_power(n, k, lambda)),
            Preset::CriticalLogWeight => critical_log_weight(n, k, lambda, -1.0),
            Preset::DyadicWindows | Preset::DyadicSeries => dyadic_windows(n, k, lambda, -1.0),
            Preset::BlowupDivergent => blowup_spec(RadialProfile::constant(1.0)),
            Preset::BlowupConvergent => blowup_spec(RadialProfile::power(-2.0)),
        }
    }
}

/// `(n - 2k)λ - n`.
pub fn borderline_power(n: u32, k: u32, lambda: f64) -> f64 {
    (f64::from(n) - 2.0 * f64::from(k)) * lambda - f64::from(n)
}

pub fn power_weight(n: u32, k: u32, lambda: f64, l: f64) -> ProblemSpec {
    ProblemSpec::polyharmonic(n, k, lambda, RadialProfile::power(l))
}

pub fn critical_log_weight(n: u32, k: u32, lambda: f64, nu: f64) -> ProblemSpec {
    let b = RadialProfile::power(borderline_power(n, k, lambda));
    let b = if nu == 0.0 {
        b
    } else {
        b.times(RadialProfile::log_power(nu))
    };
    ProblemSpec::polyharmonic(n, k, lambda, b)
}

pub fn dyadic_windows(n: u32, k: u32, lambda: f64, nu: f64) -> ProblemSpec {
    let inner = RadialProfile::power(borderline_power(n, k, lambda));
    let inner = if nu == 0.0 {
        inner
    } else {
        inner.times(RadialProfile::log_power(nu))
    };
    let b = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, inner);
    ProblemSpec::polyharmonic(n, k, lambda, b).with_sigma(2f64.powf(0.25))
}

/// Series data `(ln r_i, ln b_i, pattern)` for `r_i = 4^i`, `i = 1..=terms`,
/// `b_i = r_i^l ln^ν r_i`.
pub fn dyadic_series(n: u32, k: u32, lambda: f64, nu: f64, terms: usize) -> (Vec<f64>, Vec<f64>, SeriesPattern) {
    let l = borderline_power(n, k, lambda);
    let log_r: Vec<f64> = (1..=terms).map(|i| 2.0 * i as f64 * std::f64::consts::LN_2).collect();
    let log_b = log_r.iter().map(|lr| l * lr + nu * lr.ln()).collect();
    (
        log_r,
        log_b,
        SeriesPattern::PowerLog {
            ratio: 4.0,
            power: l,
            log_power: nu,
        },
    )
}

fn blowup_spec(b: RadialProfile) -> ProblemSpec {
    ProblemSpec::polyharmonic(3, 1, 2.0, b).with_sigma(4.0)
}

/// Recurrence parameters matching a blow-up preset.
pub fn blowup_params(spec: &ProblemSpec, c: f64, max_steps: usize) -> BlowupParams {
    BlowupParams {
        lambda: spec.lambda,
        m: spec.m,
        n: spec.n,
        sigma: spec.sigma,
        c,
        j0: 1.0,
        r0: 1.0,
        max_steps,
        overflow: 1e30,
    }
}
