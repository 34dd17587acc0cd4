//! The `q(r)` functionals and the divergence test for
//! `∫_1^∞ r^{(m-n)λ+n-1} q(r) dr`.

mod classify;
mod series;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::profiles::{EssBound, RadialProfile};
use crate::quadrature::QuadOptions;

pub use classify::{
    classify_divergence, CriterionReport, CriterionSample, Evidence, GrowthEvidence, LadderEntry, LadderOptions,
    SymbolicCertificate, Verdict,
};
pub use series::{series_criterion, series_criterion_log, SeriesPattern, SeriesTerm};

/// Which `q` functional enters the criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `ess inf a^{-λ} b` over the shell.
    EssInf,
    /// `(r^{-n} ∫ a^{λ/(λ-1)} b^{-1/(λ-1)})^{1-λ}` over the shell.
    Hoelder,
    /// `ess inf f` over the shell.
    EssInfF,
    /// `(r^{-n} ∫ f^{-1/(λ-1)})^{1-λ}` over the shell.
    HoelderF,
    /// Discrete series over shells `r_i < |x| < 2 r_i`.
    Series,
}

impl Method {
    pub fn uses_f(self) -> bool {
        matches!(self, Method::EssInfF | Method::HoelderF)
    }
}

/// `a^{-λ} b`.
fn essinf_weight(spec: &ProblemSpec) -> RadialProfile {
    spec.profile_a.clone().pow(-spec.lambda).times(spec.profile_b.clone())
}

/// Integrand of the Hölder average: `a^{λ/(λ-1)} b^{-1/(λ-1)}`, or
/// `f^{-1/(λ-1)}` for the `f` variant.
fn hoelder_weight(spec: &ProblemSpec, use_f: bool) -> Result<RadialProfile> {
    let inv = -1.0 / (spec.lambda - 1.0);
    if use_f {
        Ok(spec.profile_f()?.clone().pow(inv))
    } else {
        Ok(spec
            .profile_a
            .clone()
            .pow(spec.lambda / (spec.lambda - 1.0))
            .times(spec.profile_b.clone().pow(inv)))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "r",
            reason: format!("must be positive and finite, got {r}"),
        })
    }
}

/// Errors when `a` vanishes on a sub-shell of `(lo, hi)` of positive measure.
fn check_a_nonvanishing(spec: &ProblemSpec, lo: f64, hi: f64) -> Result<()> {
    let a = &spec.profile_a;
    let mut edges = vec![lo];
    edges.extend(a.breakpoints(lo, hi));
    edges.push(hi);
    for w in edges.windows(2) {
        if w[1] > w[0] && a.resolve(w[0], w[1]).is_identically_zero() {
            return Err(Error::CoefficientVanishes { lo: w[0], hi: w[1] });
        }
    }
    Ok(())
}

/// Hölder-averaged functional over the shell `(r / ratio, ratio r)`. A
/// divergent inner integral gives exactly 0.
pub fn hoelder_functional(spec: &ProblemSpec, r: f64, ratio: f64, use_f: bool, opts: &QuadOptions) -> Result<EssBound> {
    check_radius(r)?;
    let (lo, hi) = (r / ratio, r * ratio);
    if !use_f {
        check_a_nonvanishing(spec, lo, hi)?;
    }
    let weight = hoelder_weight(spec, use_f)?;
    let integral = weight.annulus_integral(lo, hi, spec.n, opts)?;
    if integral.status.is_divergent() || integral.value.is_infinite() {
        return Ok(EssBound {
            value: 0.0,
            exact: true,
        });
    }
    let average = integral.value / r.powi(spec.n as i32);
    Ok(EssBound {
        value: average.powf(1.0 - spec.lambda),
        exact: integral.status == crate::quadrature::QuadStatus::Converged,
    })
}

/// `q(r)` for the selected method, with an exactness flag.
pub fn q_value(spec: &ProblemSpec, method: Method, r: f64, opts: &QuadOptions) -> Result<EssBound> {
    check_radius(r)?;
    let sigma = spec.sigma;
    match method {
        Method::EssInf => {
            check_a_nonvanishing(spec, r / sigma, r * sigma)?;
            essinf_weight(spec).ess_inf_annulus(r, sigma)
        }
        Method::EssInfF => spec.profile_f()?.ess_inf_annulus(r, sigma),
        Method::Hoelder => hoelder_functional(spec, r, sigma, false, opts),
        Method::HoelderF => hoelder_functional(spec, r, sigma, true, opts),
        Method::Series => Err(Error::InvalidParameter {
            name: "method",
            reason: "the series criterion has no pointwise q(r)".into(),
        }),
    }
}

pub fn q_essinf(spec: &ProblemSpec, r: f64) -> Result<f64> {
    Ok(q_value(spec, Method::EssInf, r, &QuadOptions::default())?.value)
}

pub fn q_hoelder(spec: &ProblemSpec, r: f64) -> Result<f64> {
    Ok(q_value(spec, Method::Hoelder, r, &QuadOptions::default())?.value)
}

pub fn q_f_essinf(spec: &ProblemSpec, r: f64) -> Result<f64> {
    Ok(q_value(spec, Method::EssInfF, r, &QuadOptions::default())?.value)
}

pub fn q_f_hoelder(spec: &ProblemSpec, r: f64) -> Result<f64> {
    Ok(q_value(spec, Method::HoelderF, r, &QuadOptions::default())?.value)
}

/// The constant `C(n, λ, σ)` with `q_hoelder ≥ C q_essinf`: the normalized
/// shell volume `|B_σ \ B_{1/σ}|` raised to `1 - λ`.
pub fn domination_constant(n: u32, lambda: f64, sigma: f64) -> f64 {
    crate::special::shell_volume(n, 1.0 / sigma, sigma).powf(1.0 - lambda)
}
