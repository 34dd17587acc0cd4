//! The blow-up machinery on concrete data: the ball functional
//! `J(r) = ∫_{B_r} b |u|^λ`, the averaged coefficient `h(r)`, the three
//! step inequalities, doubling sequences and the partition of a geometric
//! grid into doubling and non-doubling steps.

mod averaging;
mod blowup;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::criterion::hoelder_functional;
use crate::error::{invalid, Error, Result};
use crate::problem::ProblemSpec;
use crate::quadrature::{integrate, QuadOptions};
use crate::radial::{radial_integral, RadialFn};
use crate::sampling::{sampled_extremum, Extremum, SamplingPlan};

pub use averaging::{averaging_harness, AveragingStats, AveragingTrial, PiecewiseConstant, PsiGenerator};
pub use blowup::{blowup_iterate, BlowupParams, GrowthTrajectory, TrajectoryRow};

fn j_opts() -> QuadOptions {
    QuadOptions::default().with_rel_tol(1e-11).with_max_panels(8000)
}

/// `J(r) = ω_{n-1} ∫_0^r b |u|^λ ρ^{n-1} dρ`.
pub fn ball_functional(u: &dyn RadialFn, b: &dyn RadialFn, lambda: f64, n: u32, r: f64) -> Result<f64> {
    BallFunctional::new(u, b, lambda, n)?.eval(r)
}

/// `J` with cumulative values cached at knots `10^{i/8}`, so that each
/// evaluation integrates over at most one knot interval.
pub struct BallFunctional<'a> {
    u: &'a dyn RadialFn,
    b: &'a dyn RadialFn,
    lambda: f64,
    n: u32,
    knots: RefCell<Vec<(f64, f64)>>,
}

const KNOTS_PER_DECADE: f64 = 8.0;

impl<'a> BallFunctional<'a> {
    pub fn new(u: &'a dyn RadialFn, b: &'a dyn RadialFn, lambda: f64, n: u32) -> Result<Self> {
        if !(lambda > 1.0) {
            return Err(invalid("lambda", format!("must satisfy lambda > 1, got {lambda}")));
        }
        Ok(Self {
            u,
            b,
            lambda,
            n,
            knots: RefCell::new(vec![(0.0, 0.0)]),
        })
    }

    fn source(&self, r: f64) -> Result<f64> {
        let uv = self.u.value(r)?;
        if uv == 0.0 {
            return Ok(0.0);
        }
        Ok(self.b.value(r)? * uv.abs().powf(self.lambda))
    }

    fn segment(&self, lo: f64, hi: f64) -> Result<f64> {
        let q = radial_integral(|r| self.source(r), lo, hi, self.n, &j_opts())?;
        if q.status.is_divergent() || !q.value.is_finite() {
            return Err(Error::NonFinite(format!("J integral over ({lo}, {hi})")));
        }
        Ok(q.value)
    }

    fn knot(i: i32) -> f64 {
        10f64.powf(f64::from(i) / KNOTS_PER_DECADE)
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(invalid("r", format!("must be finite and nonnegative, got {r}")));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        // Knots start at 1e-3; smaller radii integrate from the origin.
        let first = -3 * KNOTS_PER_DECADE as i32;
        if r <= Self::knot(first) {
            return self.segment(0.0, r);
        }
        let target = ((r.log10() * KNOTS_PER_DECADE).floor() as i32).max(first);
        let mut knots = self.knots.borrow_mut();
        if knots.len() == 1 {
            let v = self.segment(0.0, Self::knot(first))?;
            knots.push((Self::knot(first), v));
        }
        let mut last = first + knots.len() as i32 - 2;
        while last < target {
            let (lo, hi) = (Self::knot(last), Self::knot(last + 1));
            let v = knots.last().expect("seeded").1 + self.segment(lo, hi)?;
            knots.push((hi, v));
            last += 1;
        }
        let (base, value) = knots[(target - first + 1) as usize];
        drop(knots);
        Ok(value + self.segment(base, r)?)
    }
}

/// `h(r)`: the Hölder-averaged coefficient over `(r/√σ, √σ r)`; 0 when the
/// average diverges.
pub fn averaged_coefficient(spec: &ProblemSpec, r: f64, use_f: bool) -> Result<f64> {
    Ok(hoelder_functional(spec, r, spec.sigma.sqrt(), use_f, &QuadOptions::default())?.value)
}

/// `(argmax, max)` of `h` on `[lo, hi]` by sampling.
pub fn sup_averaged_coefficient(
    spec: &ProblemSpec,
    lo: f64,
    hi: f64,
    use_f: bool,
    plan: &SamplingPlan,
) -> Result<(f64, f64)> {
    let failure = RefCell::new(None);
    let best = sampled_extremum(
        |r| match averaged_coefficient(spec, r, use_f) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        Extremum::Max,
        plan,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// One evaluated step inequality `lhs ≥ C · rhs_without_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub r1: f64,
    pub r2: f64,
    pub ball_r1: f64,
    pub ball_r2: f64,
    pub lhs: f64,
    pub rhs_without_c: f64,
    /// `lhs / rhs_without_c`; `None` when the right side vanishes.
    pub fitted_c: Option<f64>,
    pub sup_average: Option<f64>,
    pub sup_at: Option<f64>,
    /// Left side positive, or the inequality holds vacuously.
    pub positive: bool,
}

fn report(r1: f64, r2: f64, j1: f64, j2: f64, lhs: f64, rhs: f64) -> InequalityReport {
    let fitted_c = (rhs > 0.0).then(|| lhs / rhs);
    InequalityReport {
        r1,
        r2,
        ball_r1: j1,
        ball_r2: j2,
        lhs,
        rhs_without_c: rhs,
        fitted_c,
        sup_average: None,
        sup_at: None,
        positive: fitted_c.map_or(lhs >= 0.0, |c| c > 0.0),
    }
}

fn check_pair(spec: &ProblemSpec, r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(invalid("interval", format!("need 0 < r1 < r2 < ∞, got ({r1}, {r2})")));
    }
    let limit = spec.sigma.sqrt() * r1;
    if r2 > limit * (1.0 + 1e-12) {
        return Err(Error::Hypothesis(format!("r2 = {r2} exceeds sqrt(sigma) r1 = {limit}")));
    }
    Ok(())
}

fn step_integral<F: Fn(f64) -> Result<f64>>(f: F, r1: f64, r2: f64) -> Result<f64> {
    let failure = RefCell::new(None);
    let q = integrate(
        |r| match f(r) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        r1,
        r2,
        &QuadOptions::default().with_rel_tol(1e-8),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(q.value)
}

/// Growth of `J` across a short step against
/// `(r2-r1)^{λm} r1^{(1-λ)n} sup h · J(r1)^λ`.
pub fn step_growth_check(j: &BallFunctional, spec: &ProblemSpec, r1: f64, r2: f64) -> Result<InequalityReport> {
    check_pair(spec, r1, r2)?;
    let (j1, j2) = (j.eval(r1)?, j.eval(r2)?);
    let (at, h) = sup_averaged_coefficient(spec, r1, r2, false, &SamplingPlan::default())?;
    let (lambda, m, n) = (spec.lambda, f64::from(spec.m), f64::from(spec.n));
    let bound = (r2 - r1).powf(lambda * m) * r1.powf((1.0 - lambda) * n) * h * j1.powf(lambda);
    let mut out = report(r1, r2, j1, j2, j2 - j1, bound);
    out.sup_average = Some(h);
    out.sup_at = Some(at);
    Ok(out)
}

/// Doubling steps: `J^{(1/λ-1)/m}(r1) - J^{(1/λ-1)/m}(r2)` against
/// `∫ r^{(1/λ-1)n/m} h^{1/(λm)} dr`.
pub fn doubling_step_check(j: &BallFunctional, spec: &ProblemSpec, r1: f64, r2: f64) -> Result<InequalityReport> {
    check_pair(spec, r1, r2)?;
    let (j1, j2) = (j.eval(r1)?, j.eval(r2)?);
    if !(j1 > 0.0) {
        return Err(Error::Hypothesis(format!("J(r1) = {j1} must be positive")));
    }
    if 2.0 * j1 > j2 {
        return Err(Error::Hypothesis(format!(
            "doubling 2 J(r1) <= J(r2) fails: {j1} vs {j2}"
        )));
    }
    let (lambda, m, n) = (spec.lambda, f64::from(spec.m), f64::from(spec.n));
    let e = (1.0 / lambda - 1.0) / m;
    let lhs = j1.powf(e) - j2.powf(e);
    let rhs = step_integral(
        |r| Ok(r.powf(e * n) * averaged_coefficient(spec, r, false)?.powf(1.0 / (lambda * m))),
        r1,
        r2,
    )?;
    Ok(report(r1, r2, j1, j2, lhs, rhs))
}

/// Non-doubling steps `r2 = √σ r1`: `J^{1-λ}(r1) - J^{1-λ}(r2)` against
/// `∫ r^{(m-n)λ+n-1} h dr`.
pub fn slow_step_check(j: &BallFunctional, spec: &ProblemSpec, r1: f64, r2: f64) -> Result<InequalityReport> {
    check_pair(spec, r1, r2)?;
    let full = spec.sigma.sqrt() * r1;
    if (r2 - full).abs() > 1e-9 * full {
        return Err(Error::Hypothesis(format!(
            "r2 = {r2} must equal sqrt(sigma) r1 = {full}"
        )));
    }
    let (j1, j2) = (j.eval(r1)?, j.eval(r2)?);
    if !(j1 > 0.0) {
        return Err(Error::Hypothesis(format!("J(r1) = {j1} must be positive")));
    }
    if j2 > 2.0 * j1 {
        return Err(Error::Hypothesis(format!(
            "non-doubling J(r2) <= 2 J(r1) fails: {j1} vs {j2}"
        )));
    }
    let lambda = spec.lambda;
    let lhs = j1.powf(1.0 - lambda) - j2.powf(1.0 - lambda);
    let exponent = spec.integrand_exponent();
    let rhs = step_integral(|r| Ok(r.powf(exponent) * averaged_coefficient(spec, r, false)?), r1, r2)?;
    Ok(report(r1, r2, j1, j2, lhs, rhs))
}

/// Relative tolerance in `r` for doubling points.
pub const DOUBLING_TOL: f64 = 1e-10;

/// `ρ_0 = r1 < ρ_1 < … = r2` with `J(ρ_{i+1}) = 2 J(ρ_i)` until
/// `4 J(ρ_i) ≥ J(r2)`, when the sequence closes at `r2`.
pub fn doubling_sequence<F: Fn(f64) -> Result<f64>>(j: F, r1: f64, r2: f64) -> Result<Vec<f64>> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(invalid("interval", format!("need 0 < r1 < r2 < ∞, got ({r1}, {r2})")));
    }
    let (j1, j2) = (j(r1)?, j(r2)?);
    if !(j1 > 0.0) {
        return Err(Error::Hypothesis(format!("J(r1) = {j1} must be positive")));
    }
    if 2.0 * j1 > j2 {
        return Err(Error::Hypothesis(format!("2 J(r1) <= J(r2) fails: {j1} vs {j2}")));
    }
    let mut seq = vec![r1];
    let mut current = (r1, j1);
    while 4.0 * current.1 < j2 {
        let target = 2.0 * current.1;
        // J(lo) < target <= J(hi).
        let (mut lo, mut hi) = (current.0, r2);
        let mut j_hi = j2;
        while hi - lo > DOUBLING_TOL * hi {
            let mid = 0.5 * (lo + hi);
            let v = j(mid)?;
            if v >= target {
                hi = mid;
                j_hi = v;
            } else {
                lo = mid;
            }
        }
        if seq.len() > 10_000 {
            return Err(Error::NonFinite("doubling sequence does not terminate".into()));
        }
        seq.push(hi);
        current = (hi, j_hi);
    }
    seq.push(r2);
    Ok(seq)
}

/// Step label on a geometric grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepClass {
    /// `J(r_{i+1}) ≥ 2 J(r_i)`.
    Doubling,
    /// `J(r_{i+1}) < 2 J(r_i)`.
    Slow,
}

impl StepClass {
    pub fn of(j_here: f64, j_next: f64) -> Self {
        if j_next >= 2.0 * j_here {
            Self::Doubling
        } else {
            Self::Slow
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Doubling => "doubling",
            Self::Slow => "slow",
        }
    }
}

/// Labels for the consecutive steps of `values[i] = J(r_i)`.
pub fn step_partition(values: &[f64]) -> Vec<StepClass> {
    values.windows(2).map(|w| StepClass::of(w[0], w[1])).collect()
}
