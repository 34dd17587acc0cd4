use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{q_value, Method, SeriesTerm};
use crate::error::{invalid, Result};
use crate::fit::{fit_line, LineFit};
use crate::problem::ProblemSpec;
use crate::profiles::{Asymptotic, RadialProfile};
use crate::quadrature::{integrate_with_breaks, try_integrate, QuadOptions, QuadStatus};
use crate::sampling::log_points;

/// Exponents closer than this are treated as equal.
pub(crate) const EXPONENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The criterion integral diverges: every solution is trivial.
    ForcedTrivial,
    /// The criterion integral converges; the criterion says nothing.
    NotForced,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderOptions {
    pub r_max: f64,
    /// Geometric ratio between consecutive ladder radii.
    pub ratio: f64,
    pub samples_per_step: usize,
    pub quad: QuadOptions,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            r_max: 1e6,
            ratio: 10.0,
            samples_per_step: 8,
            quad: QuadOptions::default().with_rel_tol(1e-8).with_max_panels(2000),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionSample {
    pub r: f64,
    pub q: f64,
    pub integrand: f64,
    pub partial_integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub r: f64,
    pub partial_integral: f64,
    /// Growth since the previous ladder radius.
    pub increment: f64,
}

/// Exponent bookkeeping for `r^power log^log_power r` integrands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicCertificate {
    /// Behavior of `q(r)` (or of the series terms) at infinity.
    pub q_asymptotic: Asymptotic,
    pub net_power: f64,
    pub net_log_power: f64,
    pub divergent: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEvidence {
    /// Least-squares fit of `ln(increment)` against step index.
    pub fit: Option<LineFit>,
    /// Last three increments nondecreasing within 5%.
    pub increments_nondecreasing: bool,
    pub divergence_detected: bool,
    /// A partial integral was infinite.
    pub infinite_partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Evidence {
    pub symbolic: Option<SymbolicCertificate>,
    pub growth: Option<GrowthEvidence>,
    /// Number of samples whose `q` came from sampling or an unconverged
    /// quadrature.
    pub approximate_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub method: Method,
    /// Left end of the criterion integral.
    pub start: f64,
    pub integrand_exponent: f64,
    pub samples: Vec<CriterionSample>,
    pub ladder: Vec<LadderEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub series_terms: Vec<SeriesTerm>,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Divergence rule for `∫^∞ r^e log^ν r dr` (also for `Σ_i P^{i(e+1)} i^ν`).
pub(crate) fn power_log_diverges(e: f64, nu: f64) -> bool {
    e > -1.0 + EXPONENT_TOL || ((e + 1.0).abs() <= EXPONENT_TOL && nu >= -1.0 - EXPONENT_TOL)
}

/// Asymptotic class of `q` for the method.
fn q_asymptotic(spec: &ProblemSpec, method: Method) -> Asymptotic {
    match method {
        Method::EssInf | Method::Hoelder => spec
            .profile_a
            .asymptotic()
            .pow(-spec.lambda)
            .mul(spec.profile_b.asymptotic()),
        Method::EssInfF | Method::HoelderF => spec
            .profile_f
            .as_ref()
            .map_or(Asymptotic::Unknown, RadialProfile::asymptotic),
        Method::Series => Asymptotic::Unknown,
    }
}

fn symbolic_certificate(spec: &ProblemSpec, method: Method) -> Option<SymbolicCertificate> {
    let asym = q_asymptotic(spec, method);
    let base = spec.integrand_exponent();
    let sigma = spec.sigma;
    match asym {
        Asymptotic::Zero => Some(SymbolicCertificate {
            q_asymptotic: asym,
            net_power: f64::NEG_INFINITY,
            net_log_power: 0.0,
            divergent: false,
            reason: "q vanishes identically beyond a finite radius".into(),
        }),
        Asymptotic::PowerLog { power, log_power } => {
            let e = base + power;
            let divergent = power_log_diverges(e, log_power);
            Some(SymbolicCertificate {
                q_asymptotic: asym,
                net_power: e,
                net_log_power: log_power,
                divergent,
                reason: format!(
                    "integrand ≍ r^{e} log^{log_power} r: {}",
                    if divergent { "divergent" } else { "convergent" }
                ),
            })
        }
        Asymptotic::Windowed {
            width_ratio,
            power,
            log_power,
            period_ratio,
            ..
        } => {
            let e = base + power;
            // q > 0 only where the whole shell (r/σ, σr) sits inside a window.
            if width_ratio <= sigma * sigma * (1.0 + EXPONENT_TOL) {
                return Some(SymbolicCertificate {
                    q_asymptotic: asym,
                    net_power: e,
                    net_log_power: log_power,
                    divergent: false,
                    reason: format!(
                        "window ratio {width_ratio} does not exceed sigma^2 = {}: q vanishes beyond the first window",
                        sigma * sigma
                    ),
                });
            }
            let divergent = power_log_diverges(e, log_power);
            Some(SymbolicCertificate {
                q_asymptotic: asym,
                net_power: e,
                net_log_power: log_power,
                divergent,
                reason: format!(
                    "integrand ≍ r^{e} log^{log_power} r on windows of fixed log-width recurring with ratio {period_ratio}: {}",
                    if divergent { "divergent" } else { "convergent" }
                ),
            })
        }
        Asymptotic::Unknown => None,
    }
}

/// Radii where `q` may jump: annulus edges meeting profile breakpoints.
fn q_breakpoints(spec: &ProblemSpec, method: Method, lo: f64, hi: f64) -> Vec<f64> {
    let s = spec.sigma;
    let mut raw = Vec::new();
    let mut add = |p: &RadialProfile| raw.extend(p.breakpoints(lo / s, hi * s));
    if method.uses_f() {
        if let Some(f) = &spec.profile_f {
            add(f);
        }
    } else {
        add(&spec.profile_a);
        add(&spec.profile_b);
    }
    let mut out: Vec<f64> = raw
        .into_iter()
        .flat_map(|b| [b * s, b / s])
        .filter(|&r| r > lo && r < hi)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

pub(crate) fn growth_evidence(ladder: &[LadderEntry]) -> GrowthEvidence {
    let infinite_partial = ladder.iter().any(|e| e.partial_integral.is_infinite());
    let inc: Vec<f64> = ladder.iter().skip(1).map(|e| e.increment).collect();
    let positive: Vec<(f64, f64)> = inc
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(i, v)| (i as f64, v.ln()))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
    let fit = fit_line(&x, &y);
    let increments_nondecreasing = inc.len() >= 3 && {
        let last = &inc[inc.len() - 3..];
        last.iter().all(|v| *v > 0.0) && last.windows(2).all(|w| w[1] >= 0.95 * w[0])
    };
    GrowthEvidence {
        fit,
        increments_nondecreasing,
        divergence_detected: infinite_partial || increments_nondecreasing,
        infinite_partial,
    }
}

/// Evaluates the criterion integral for the chosen `q` functional and
/// classifies its divergence.
///
/// The verdict follows the symbolic certificate when the coefficients fall
/// in a recognized power/log family. Otherwise the partial-integral ladder
/// decides: sustained growth per step gives `ForcedTrivial`, anything else
/// is `Inconclusive`, since convergence is never inferred numerically.
pub fn classify_divergence(spec: &ProblemSpec, method: Method, opts: &LadderOptions) -> Result<CriterionReport> {
    spec.validate()?;
    if method == Method::Series {
        return Err(invalid("method", "use series_criterion for the series method"));
    }
    if method.uses_f() {
        spec.profile_f()?;
    }
    if !(opts.ratio > 1.0) || opts.samples_per_step == 0 {
        return Err(invalid(
            "ladder",
            "ratio must exceed 1 and samples_per_step must be positive",
        ));
    }
    let lower = if method.uses_f() {
        spec.profile_f()?.domain_lower()
    } else {
        spec.profile_a.domain_lower().max(spec.profile_b.domain_lower())
    };
    let start = (spec.sigma * lower).max(1.0);
    if !(opts.r_max > start * opts.ratio) {
        return Err(invalid(
            "r_max",
            format!("must exceed {} for at least one ladder step", start * opts.ratio),
        ));
    }

    let mut rungs = vec![start];
    while rungs.last().unwrap() * opts.ratio <= opts.r_max * (1.0 + 1e-12) {
        let next = rungs.last().unwrap() * opts.ratio;
        rungs.push(next);
    }
    let mut points = Vec::new();
    for w in rungs.windows(2) {
        let seg = log_points(w[0], w[1], opts.samples_per_step + 1);
        points.extend_from_slice(&seg[..seg.len() - 1]);
    }
    points.push(*rungs.last().unwrap());

    let power = spec.integrand_exponent();
    let quad = opts.quad;
    let integrand = |r: f64| -> Result<f64> {
        let q = q_value(spec, method, r, &quad)?.value;
        Ok(if q == 0.0 { 0.0 } else { r.powf(power) * q })
    };

    let pointwise: Vec<(f64, bool)> = points
        .par_iter()
        .map(|&r| q_value(spec, method, r, &quad).map(|q| (q.value, q.exact)))
        .collect::<Result<_>>()?;

    // Integrals between consecutive sample radii, in log r.
    let pieces: Vec<(f64, QuadStatus)> = points
        .par_windows(2)
        .map(|w| {
            let mut t = vec![w[0].ln()];
            t.extend(q_breakpoints(spec, method, w[0], w[1]).into_iter().map(f64::ln));
            t.push(w[1].ln());
            let q = try_integrate(
                |t: f64| {
                    let r = t.exp();
                    Ok(integrand(r)? * r)
                },
                |g| integrate_with_breaks(g, &t, &quad),
            )?;
            Ok((q.value.max(0.0), q.status))
        })
        .collect::<Result<_>>()?;

    let mut approximate_samples = pointwise.iter().filter(|(_, exact)| !exact).count();
    approximate_samples += pieces.iter().filter(|(_, s)| *s == QuadStatus::Approximate).count();

    let mut samples = Vec::with_capacity(points.len());
    let mut cumulative = 0.0;
    for (i, &r) in points.iter().enumerate() {
        if i > 0 {
            let (v, status) = pieces[i - 1];
            cumulative = if status.is_divergent() {
                f64::INFINITY
            } else {
                cumulative + v
            };
        }
        let q = pointwise[i].0;
        samples.push(CriterionSample {
            r,
            q,
            integrand: if q == 0.0 { 0.0 } else { r.powf(power) * q },
            partial_integral: cumulative,
        });
    }

    let mut ladder = Vec::with_capacity(rungs.len());
    let mut previous = 0.0;
    for (j, &r) in rungs.iter().enumerate() {
        let idx = j * opts.samples_per_step;
        let value = samples[idx].partial_integral;
        ladder.push(LadderEntry {
            r,
            partial_integral: value,
            increment: value - previous,
        });
        previous = value;
    }

    let growth = growth_evidence(&ladder);
    let symbolic = symbolic_certificate(spec, method);
    let verdict = match &symbolic {
        Some(cert) if cert.divergent => Verdict::ForcedTrivial,
        Some(_) => Verdict::NotForced,
        None if growth.divergence_detected => Verdict::ForcedTrivial,
        None => Verdict::Inconclusive,
    };
    Ok(CriterionReport {
        method,
        start,
        integrand_exponent: power,
        samples,
        ladder,
        series_terms: Vec::new(),
        verdict,
        evidence: Evidence {
            symbolic,
            growth: Some(growth),
            approximate_samples,
        },
    })
}
