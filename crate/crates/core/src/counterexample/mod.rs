//! Sharp nontrivial solutions of `(-1)^k Δ^k u ≥ b |u|^λ` for `n > 2k` with
//! `b ≍ r^{(n-2k)λ-n} ln^ν r`, `ν < -1`.
//!
//! Starting from `w_0 = (2+r)^{-n} ln^{q_0}(2+r)` with
//! `q_0 = -(ν+λ)/(λ-1)`, each `w_i` solves `-Δw_i = w_{i-1}` through the
//! radial Green's operator. Then `u = ε w_k` satisfies the inequality with
//! equality for `b = ε^{1-λ} w_0 / w_k^λ`.

mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::profiles::RadialProfile;
use crate::special::power_log_tail;
use crate::stencil::cell_integrals;
use crate::tabulated::{HeadModel, LogGrid, TabulatedRadialFunction, TailModel};

pub use verify::{
    asymptotic_bracket, bracket_against, log_exponent_fit, verify_poisson, Bracket, LogExponentFit, PoissonCheck,
};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 1.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid("lambda", format!("must satisfy lambda > 1, got {lambda}")))
    }
}

/// Log power `-(ν+λ)/(λ-1)` of the seed function.
pub fn seed_log_power(nu: f64, lambda: f64) -> f64 {
    -(nu + lambda) / (lambda - 1.0) + 0.0
}

/// The seed `w_0(r) = (2+r)^{-n} ln^{q_0}(2+r)`.
pub fn seed_profile(n: u32, nu: f64, lambda: f64) -> Result<RadialProfile> {
    check_lambda(lambda)?;
    let q0 = seed_log_power(nu, lambda);
    let base = RadialProfile::shifted_power(-f64::from(n), 2.0);
    Ok(if q0 == 0.0 {
        base
    } else {
        base.times(RadialProfile::shifted_log_power(q0, 2.0))
    })
}

/// Leading behavior `r^{2i-n} ln^{q} r` of `w_i` at infinity.
pub fn chain_exponents(i: u32, n: u32, nu: f64, lambda: f64) -> (f64, f64) {
    let power = 2.0 * f64::from(i) - f64::from(n);
    let q0 = seed_log_power(nu, lambda);
    if i == 0 {
        (power, q0)
    } else {
        (power, q0 + 1.0)
    }
}

/// Tail exponents of `G w` for `w ~ r^p ln^q r` in dimension `n`.
pub fn propagate_tail(p: f64, q: f64, n: u32) -> (f64, f64) {
    let dim = f64::from(n);
    let s = dim + p;
    if s.abs() < 1e-12 {
        (2.0 - dim, q + 1.0)
    } else if s > 0.0 {
        (p + 2.0, q)
    } else {
        (2.0 - dim, 0.0)
    }
}

/// Tabulates `w_0` with its exact tail exponents and an even head.
pub fn tabulate_seed(n: u32, nu: f64, lambda: f64, grid: LogGrid) -> Result<TabulatedRadialFunction> {
    let profile = seed_profile(n, nu, lambda)?;
    let (p, q) = chain_exponents(0, n, nu, lambda);
    Ok(TabulatedRadialFunction::from_fn(grid, &profile)?
        .with_matched_tail(p, q)
        .with_even_head())
}

/// Tabulates a profile whose behavior at infinity is a power-log law.
pub fn tabulate_profile(profile: &RadialProfile, grid: LogGrid) -> Result<TabulatedRadialFunction> {
    let table = TabulatedRadialFunction::from_fn(grid, profile)?.with_even_head();
    match profile.asymptotic() {
        crate::profiles::Asymptotic::Zero => Ok(table.with_tail(TailModel {
            power: -f64::from(u16::MAX),
            log_power: 0.0,
            coefficient: 0.0,
        })),
        crate::profiles::Asymptotic::PowerLog { power, log_power } => Ok(table.with_matched_tail(power, log_power)),
        other => Err(invalid(
            "w_prev",
            format!("needs a power-log tail at infinity, found {other:?}"),
        )),
    }
}

/// `A(r_lo) = ∫_0^{r_lo} ρ^{n-1} w dρ` from the head model.
fn head_integral(w: &TabulatedRadialFunction, n: u32) -> f64 {
    let lo = w.grid.r_lo;
    let dim = f64::from(n);
    match w.head {
        HeadModel::Even { c0, c2 } => c0 * lo.powf(dim) / dim + c2 * lo.powf(dim + 2.0) / (dim + 2.0),
        HeadModel::None => w.values[0] * lo.powf(dim) / dim,
    }
}

/// `w(r) = (r^{2-n} ∫_0^r ρ^{n-1} w_prev + ∫_r^∞ ρ w_prev) / (n-2)`, the
/// decaying radial solution of `-Δw = w_prev`.
pub fn greens_step(prev: &TabulatedRadialFunction, n: u32) -> Result<TabulatedRadialFunction> {
    if n < 3 {
        return Err(invalid("n", format!("the radial kernel needs n >= 3, got {n}")));
    }
    let tail = prev
        .tail
        .ok_or_else(|| invalid("w_prev", "needs a tail model for the integral to infinity"))?;
    let grid = prev.grid;
    let dim = f64::from(n);
    let radii = grid.radii();
    let h = grid.step();

    let tail_integral = if tail.coefficient == 0.0 {
        0.0
    } else if tail.power + 2.0 >= 0.0 {
        return Err(Error::DivergentTail { exponent: tail.power });
    } else {
        tail.coefficient * power_log_tail(tail.power + 1.0, tail.log_power, grid.r_hi)
    };

    let g_inner: Vec<f64> = radii.iter().zip(&prev.values).map(|(r, w)| r.powf(dim) * w).collect();
    let g_outer: Vec<f64> = radii.iter().zip(&prev.values).map(|(r, w)| r * r * w).collect();
    let inner_cells = cell_integrals(&g_inner, h);
    let outer_cells = cell_integrals(&g_outer, h);

    let len = radii.len();
    let mut inner = vec![0.0; len];
    inner[0] = head_integral(prev, n);
    for j in 1..len {
        inner[j] = inner[j - 1] + inner_cells[j - 1];
    }
    let mut outer = vec![0.0; len];
    outer[len - 1] = tail_integral;
    for j in (0..len - 1).rev() {
        outer[j] = outer[j + 1] + outer_cells[j];
    }
    let values: Vec<f64> = (0..len)
        .map(|j| (radii[j].powf(2.0 - dim) * inner[j] + outer[j]) / (dim - 2.0))
        .collect();

    let table = TabulatedRadialFunction::new(grid, values)?.with_even_head();
    if tail.coefficient == 0.0 && prev.values.iter().all(|&v| v == 0.0) {
        return Ok(table.with_tail(tail));
    }
    let (p, q) = propagate_tail(tail.power, tail.log_power, n);
    Ok(table.with_matched_tail(p, q))
}

/// Applies [`greens_step`] to a closed-form profile tabulated on `grid`.
pub fn greens_step_profile(prev: &RadialProfile, n: u32, grid: LogGrid) -> Result<TabulatedRadialFunction> {
    greens_step(&tabulate_profile(prev, grid)?, n)
}

fn unit_epsilon() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleParams {
    pub n: u32,
    pub k: u32,
    pub nu: f64,
    pub lambda: f64,
    #[serde(default = "unit_epsilon")]
    pub epsilon: f64,
}

impl CounterexampleParams {
    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        if self.nu.is_nan() || self.nu >= -1.0 {
            return Err(Error::NoCounterexample { nu: self.nu });
        }
        if self.k == 0 {
            return Err(invalid("k", "polyharmonic order must be at least 1"));
        }
        if self.n <= 2 * self.k {
            return Err(Error::Hypothesis(format!(
                "the construction needs n > 2k, got n = {} and k = {}",
                self.n, self.k
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Power of `r` in the sharp coefficient bound.
    pub fn coefficient_power(&self) -> f64 {
        (f64::from(self.n) - 2.0 * f64::from(self.k)) * self.lambda - f64::from(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleOptions {
    pub grid: LogGrid,
    pub poisson_tol: f64,
    pub max_refinements: usize,
    /// Interval on which the Poisson identities are checked.
    pub residual_interval: (f64, f64),
    /// Interval near infinity for brackets and the implied-b fit.
    pub asymptotic_interval: (f64, f64),
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self {
            grid: LogGrid::default(),
            poisson_tol: 1e-6,
            max_refinements: 3,
            residual_interval: (0.1, 1e4),
            asymptotic_interval: (1e2, 1e4),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCertificate {
    pub level: u32,
    /// `None` for the seed, which is closed form.
    pub poisson: Option<PoissonCheck>,
    pub tail_power: f64,
    pub tail_log_power: f64,
    pub bracket: Bracket,
    pub positive: bool,
    pub decreasing_tail: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub nodes: usize,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpliedCoefficient {
    pub power: f64,
    pub log_power: f64,
    /// Bounds of `implied_b / (r^power ln^log_power r)` on the interval.
    pub bracket: Bracket,
    pub fit: LogExponentFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub params: CounterexampleParams,
    pub grid: LogGrid,
    pub poisson_tol: f64,
    pub residuals_within_tol: bool,
    pub levels: Vec<LevelCertificate>,
    pub implied_b: ImpliedCoefficient,
    pub refinement_history: Vec<RefinementStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub u: TabulatedRadialFunction,
    pub implied_b: TabulatedRadialFunction,
    /// `w_0, …, w_k` on the final grid.
    pub chain: Vec<TabulatedRadialFunction>,
    pub certificate: CounterexampleCertificate,
}

fn build_chain(params: &CounterexampleParams, grid: LogGrid) -> Result<Vec<TabulatedRadialFunction>> {
    let mut chain = vec![tabulate_seed(params.n, params.nu, params.lambda, grid)?];
    for _ in 0..params.k {
        let next = greens_step(chain.last().expect("nonempty chain"), params.n)?;
        chain.push(next);
    }
    Ok(chain)
}

fn chain_residuals(
    chain: &[TabulatedRadialFunction],
    params: &CounterexampleParams,
    opts: &CounterexampleOptions,
) -> Result<Vec<PoissonCheck>> {
    let seed = seed_profile(params.n, params.nu, params.lambda)?;
    let (lo, hi) = opts.residual_interval;
    (1..chain.len())
        .map(|i| {
            if i == 1 {
                verify_poisson(&chain[1], &seed, params.n, (lo, hi), opts.poisson_tol)
            } else {
                verify_poisson(&chain[i], &chain[i - 1], params.n, (lo, hi), opts.poisson_tol)
            }
        })
        .collect()
}

/// Builds `u = ε w_k` and `b = ε^{1-λ} w_0 / w_k^λ`, refining the grid until
/// every Poisson residual is within tolerance or the refinement budget is
/// spent.
pub fn build_counterexample(params: CounterexampleParams, opts: &CounterexampleOptions) -> Result<Counterexample> {
    params.validate()?;
    opts.grid.validate()?;
    let mut grid = opts.grid;
    let mut history = Vec::new();
    let (chain, checks) = loop {
        let chain = build_chain(&params, grid)?;
        let checks = chain_residuals(&chain, &params, opts)?;
        history.push(RefinementStep {
            nodes: grid.nodes,
            residuals: checks.iter().map(|c| c.sup_residual).collect(),
        });
        let done = checks.iter().all(|c| c.passed);
        if done || history.len() > opts.max_refinements {
            break (chain, checks);
        }
        grid = grid.refined();
    };

    let (alo, ahi) = opts.asymptotic_interval;
    let mut levels = Vec::with_capacity(chain.len());
    for (i, w) in chain.iter().enumerate() {
        let level = i as u32;
        let (p, q) = chain_exponents(level, params.n, params.nu, params.lambda);
        let bracket = asymptotic_bracket(w, level, params.n, params.nu, params.lambda, (alo, ahi))?;
        let tail_start = grid.index_range(alo, grid.r_hi);
        levels.push(LevelCertificate {
            level,
            poisson: if i == 0 { None } else { Some(checks[i - 1].clone()) },
            tail_power: p,
            tail_log_power: q,
            bracket,
            positive: w.values.iter().all(|&v| v > 0.0),
            decreasing_tail: w.values[tail_start].windows(2).all(|v| v[1] < v[0]),
        });
    }

    let wk = chain.last().expect("nonempty chain");
    let u = wk.scaled(params.epsilon);
    let seed = seed_profile(params.n, params.nu, params.lambda)?;
    let factor = params.epsilon.powf(1.0 - params.lambda);
    let b_values = grid
        .radii()
        .iter()
        .zip(&wk.values)
        .map(|(&r, &w)| Ok(factor * seed.eval(r)? / w.powf(params.lambda)))
        .collect::<Result<Vec<f64>>>()?;
    let b_power = params.coefficient_power();
    let implied_b = TabulatedRadialFunction::new(grid, b_values)?
        .with_matched_tail(b_power, params.nu)
        .with_even_head();
    let b_bracket = bracket_against(&implied_b, b_power, params.nu, (alo, ahi))?;
    let fit = log_exponent_fit(&implied_b, b_power, (alo, ahi))?;

    let certificate = CounterexampleCertificate {
        params,
        grid,
        poisson_tol: opts.poisson_tol,
        residuals_within_tol: checks.iter().all(|c| c.passed),
        levels,
        implied_b: ImpliedCoefficient {
            power: b_power,
            log_power: params.nu,
            bracket: b_bracket,
            fit,
        },
        refinement_history: history,
    };
    Ok(Counterexample {
        u,
        implied_b,
        chain,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn seed_closed_forms() {
        let w = seed_profile(3, -2.0, 2.0).unwrap();
        assert_eq!(w.eval(0.0).unwrap(), 0.125);
        let w = seed_profile(3, -3.0, 2.0).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(w.eval(e - 2.0).unwrap(), e.powi(-3), max_relative = 1e-14);
        assert!(seed_profile(3, -2.0, 1.0).is_err());
    }

    #[test]
    fn tail_exponents_follow_the_chain() {
        for (n, k, lambda, nu) in [(3u32, 1u32, 2.0, -2.0), (5, 2, 1.5, -3.0), (7, 3, 3.0, -1.5)] {
            let (mut p, mut q) = chain_exponents(0, n, nu, lambda);
            for i in 1..=k {
                (p, q) = propagate_tail(p, q, n);
                let (ep, eq) = chain_exponents(i, n, nu, lambda);
                assert_relative_eq!(p, ep);
                assert_relative_eq!(q, eq, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn green_step_of_cubic_decay() {
        // ∫_0^∞ ρ (2+ρ)^{-3} dρ = 1/4.
        let prev = RadialProfile::shifted_power(-3.0, 2.0);
        let w1 = greens_step_profile(&prev, 3, LogGrid::default()).unwrap();
        assert_relative_eq!(w1.eval(0.0).unwrap(), 0.25, max_relative = 1e-7);
        // Closed form for r > 0: (1/r)∫_0^r ρ²(2+ρ)^{-3} + ∫_r^∞ ρ(2+ρ)^{-3}.
        let exact = |r: f64| {
            let t = 2.0 + r;
            let inner = (t.ln() - 2.0f64.ln()) + 4.0 / t - 2.0 / (t * t) - 2.0 + 0.5;
            inner / r + 1.0 / t - 1.0 / (t * t)
        };
        for r in [0.01, 1.0, 30.0] {
            assert_relative_eq!(w1.eval(r).unwrap(), exact(r), max_relative = 1e-8);
        }
        // The unshifted tail model beyond r_hi offsets the outer integral by
        // about 3e-10.
        assert!((w1.eval(5e3).unwrap() - exact(5e3)).abs() < 5e-10);
    }

    #[test]
    fn green_step_is_linear() {
        let grid = LogGrid::new(1e-3, 1e4, 1024).unwrap();
        let w = tabulate_seed(4, -2.5, 2.0, grid).unwrap();
        let a = greens_step(&w, 4).unwrap();
        let b = greens_step(&w.scaled(3.5), 4).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_relative_eq!(3.5 * x, *y, max_relative = 1e-13);
        }
        let zero = greens_step(&w.scaled(0.0), 4).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slow_decay_is_refused() {
        let grid = LogGrid::new(1e-3, 1e4, 512).unwrap();
        let slow = greens_step_profile(&RadialProfile::shifted_power(-2.0, 1.0), 3, grid);
        assert!(matches!(slow, Err(Error::DivergentTail { .. })));
        assert!(greens_step_profile(&RadialProfile::shifted_power(-3.0, 1.0), 2, grid).is_err());
    }

    #[test]
    fn parameter_errors() {
        let p = |n, k, nu| CounterexampleParams {
            n,
            k,
            nu,
            lambda: 2.0,
            epsilon: 1.0,
        };
        let opts = CounterexampleOptions::default();
        assert!(matches!(
            build_counterexample(p(3, 1, -1.0), &opts),
            Err(Error::NoCounterexample { .. })
        ));
        assert!(matches!(
            build_counterexample(p(4, 2, -2.0), &opts),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn three_dimensional_chain() {
        let params = CounterexampleParams {
            n: 3,
            k: 1,
            nu: -2.0,
            lambda: 2.0,
            epsilon: 1.0,
        };
        let ce = build_counterexample(params, &CounterexampleOptions::default()).unwrap();
        let cert = &ce.certificate;
        assert!(cert.residuals_within_tol, "{:?}", cert.refinement_history);
        assert!(cert.levels.iter().all(|l| l.positive && l.decreasing_tail));
        let top = &cert.levels[1].bracket;
        assert!(top.c1 > 0.0 && top.c2 / top.c1 < 2.0, "{top:?}");
        assert!(cert.implied_b.bracket.c1 > 0.0);

        let doubled = build_counterexample(
            CounterexampleParams { epsilon: 2.0, ..params },
            &CounterexampleOptions::default(),
        )
        .unwrap();
        for (a, b) in ce.implied_b.values.iter().zip(&doubled.implied_b.values) {
            assert_relative_eq!(a / 2.0, *b, max_relative = 1e-12);
        }
    }
}
