//! The discrete criterion `Σ r_i^{(m-n)λ+n} b_i = ∞` for coefficients
//! bounded below by `b_i` on the shells `r_i < |x| < 2 r_i`.
//!
//! Radii grow at least geometrically, so inputs are taken as logarithms.

use serde::{Deserialize, Serialize};

use super::classify::{
    growth_evidence, power_log_diverges, CriterionReport, Evidence, LadderEntry, SymbolicCertificate, Verdict,
};
use super::Method;
use crate::error::{invalid, Error, Result};
use crate::profiles::Asymptotic;

/// Generator-supplied description of the series, checked against the data
/// before it is used for a symbolic verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesPattern {
    /// `r_{i+1} = ratio r_i` and `b_i = C r_i^power ln^log_power r_i`.
    PowerLog { ratio: f64, power: f64, log_power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub index: usize,
    pub log_radius: f64,
    /// `ln(r_i^{(m-n)λ+n} b_i)`; `-∞` for a zero term.
    pub log_term: f64,
    pub partial_sum: f64,
    pub log_partial_sum: f64,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn check_pattern(pattern: &SeriesPattern, log_r: &[f64], log_b: &[f64]) -> Result<()> {
    let SeriesPattern::PowerLog {
        ratio,
        power,
        log_power,
    } = *pattern;
    if !(ratio > 1.0) {
        return Err(invalid("pattern", format!("ratio must exceed 1, got {ratio}")));
    }
    let step = ratio.ln();
    for w in log_r.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(w[1].abs()) {
            return Err(Error::Hypothesis(format!(
                "radii do not follow the declared ratio {ratio}: ln r steps by {}",
                w[1] - w[0]
            )));
        }
    }
    let mut constant: Option<f64> = None;
    for (&lr, &lb) in log_r.iter().zip(log_b) {
        if lb == f64::NEG_INFINITY {
            return Err(Error::Hypothesis("zero coefficient inside a power-log pattern".into()));
        }
        if log_power != 0.0 && lr <= 0.0 {
            return Err(Error::Hypothesis("log pattern needs radii above 1".into()));
        }
        let log_factor = if log_power == 0.0 { 0.0 } else { log_power * lr.ln() };
        let c = lb - power * lr - log_factor;
        match constant {
            None => constant = Some(c),
            Some(c0) if (c - c0).abs() > 1e-6 * (1.0 + c0.abs()) => {
                return Err(Error::Hypothesis(format!(
                    "coefficients do not follow the declared pattern (log constant drifts from {c0} to {c})"
                )));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Series criterion on logarithmic inputs: `log_radii[i] = ln r_i`,
/// `log_b[i] = ln b_i` (`-∞` for `b_i = 0`).
#[allow(clippy::too_many_arguments)]
pub fn series_criterion_log(
    log_radii: &[f64],
    log_b: &[f64],
    n: u32,
    m: u32,
    lambda: f64,
    n_terms: usize,
    pattern: Option<SeriesPattern>,
) -> Result<CriterionReport> {
    if log_radii.len() != log_b.len() {
        return Err(invalid(
            "b_list",
            format!("length {} differs from r_list length {}", log_b.len(), log_radii.len()),
        ));
    }
    if n_terms == 0 || n_terms > log_radii.len() {
        return Err(invalid(
            "n_terms",
            format!("must be in 1..={}, got {n_terms}", log_radii.len()),
        ));
    }
    if !(lambda > 1.0) {
        return Err(invalid("lambda", format!("must satisfy lambda > 1, got {lambda}")));
    }
    let log_r = &log_radii[..n_terms];
    let log_b = &log_b[..n_terms];
    if log_r.iter().any(|v| !v.is_finite()) || log_b.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(invalid(
            "r_list",
            "radii must be positive and finite, coefficients finite and nonnegative",
        ));
    }
    let spacing = std::f64::consts::LN_2;
    for (i, w) in log_r.windows(2).enumerate() {
        if w[1] - w[0] < spacing * (1.0 - 1e-12) {
            return Err(invalid(
                "r_list",
                format!(
                    "spacing r_(i+1) >= 2 r_i fails at i = {i}: ratio {}",
                    (w[1] - w[0]).exp()
                ),
            ));
        }
    }

    let exponent = (f64::from(m) - f64::from(n)) * lambda + f64::from(n);
    let mut terms = Vec::with_capacity(n_terms);
    let mut log_sum = f64::NEG_INFINITY;
    for (i, (&lr, &lb)) in log_r.iter().zip(log_b).enumerate() {
        let log_term = if lb == f64::NEG_INFINITY {
            lb
        } else {
            exponent * lr + lb
        };
        log_sum = log_add(log_sum, log_term);
        terms.push(SeriesTerm {
            index: i,
            log_radius: lr,
            log_term,
            partial_sum: log_sum.exp(),
            log_partial_sum: log_sum,
        });
    }

    let blocks = 10.min(n_terms);
    let mut ladder = Vec::with_capacity(blocks);
    let mut previous = 0.0;
    for j in 1..=blocks {
        let idx = (n_terms * j) / blocks - 1;
        let value = terms[idx].partial_sum;
        ladder.push(LadderEntry {
            r: (idx + 1) as f64,
            partial_integral: value,
            increment: value - previous,
        });
        previous = value;
    }
    let growth = growth_evidence(&ladder);

    let symbolic = if log_b.iter().all(|&v| v == f64::NEG_INFINITY) {
        Some(SymbolicCertificate {
            q_asymptotic: Asymptotic::Zero,
            net_power: f64::NEG_INFINITY,
            net_log_power: 0.0,
            divergent: false,
            reason: "all coefficients vanish".into(),
        })
    } else if let Some(p) = pattern {
        check_pattern(&p, log_r, log_b)?;
        let SeriesPattern::PowerLog {
            ratio,
            power,
            log_power,
        } = p;
        let t = exponent + power;
        let divergent = power_log_diverges(t - 1.0, log_power);
        Some(SymbolicCertificate {
            q_asymptotic: Asymptotic::PowerLog { power, log_power },
            net_power: t,
            net_log_power: log_power,
            divergent,
            reason: format!(
                "terms ≍ {ratio}^(i·{t}) · i^{log_power}: {}",
                if divergent { "divergent" } else { "convergent" }
            ),
        })
    } else {
        None
    };
    let verdict = match &symbolic {
        Some(c) if c.divergent => Verdict::ForcedTrivial,
        Some(_) => Verdict::NotForced,
        None if growth.divergence_detected => Verdict::ForcedTrivial,
        None => Verdict::Inconclusive,
    };
    Ok(CriterionReport {
        method: Method::Series,
        start: log_r[0].exp(),
        integrand_exponent: exponent,
        samples: Vec::new(),
        ladder,
        series_terms: terms,
        verdict,
        evidence: Evidence {
            symbolic,
            growth: Some(growth),
            approximate_samples: 0,
        },
    })
}

/// Series criterion on plain radii and coefficients.
#[allow(clippy::too_many_arguments)]
pub fn series_criterion(
    r_list: &[f64],
    b_list: &[f64],
    n: u32,
    m: u32,
    lambda: f64,
    n_terms: usize,
    pattern: Option<SeriesPattern>,
) -> Result<CriterionReport> {
    if r_list.iter().any(|&r| !(r > 0.0)) || b_list.iter().any(|&b| !(b >= 0.0)) {
        return Err(invalid("r_list", "radii must be positive and coefficients nonnegative"));
    }
    let log_r: Vec<f64> = r_list.iter().map(|r| r.ln()).collect();
    let log_b: Vec<f64> = b_list.iter().map(|b| b.ln()).collect();
    series_criterion_log(&log_r, &log_b, n, m, lambda, n_terms, pattern)
}
