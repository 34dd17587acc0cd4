//! Checks on a tabulated chain: Poisson residuals, asymptotic brackets and
//! the log exponent of the implied coefficient.

use serde::{Deserialize, Serialize};

use super::chain_exponents;
use crate::error::{invalid, Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::radial::RadialFn;
use crate::sampling::log_points;
use crate::stencil::radial_laplacian;
use crate::tabulated::{TabulatedRadialFunction, TailModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonCheck {
    /// `sup |(-Δw) - w_prev| / |w_prev|` over the checked nodes.
    pub sup_residual: f64,
    pub at_r: f64,
    pub nodes_checked: usize,
    pub interval: (f64, f64),
    pub tol: f64,
    pub passed: bool,
}

/// Compares `-Δw` by fourth-order differences in `ln r` with `w_prev` at the
/// grid nodes of `w` inside `interval`. Where `w_prev` vanishes the residual
/// is measured against `|w| / r^2`.
pub fn verify_poisson(
    w: &TabulatedRadialFunction,
    w_prev: &dyn RadialFn,
    n: u32,
    interval: (f64, f64),
    tol: f64,
) -> Result<PoissonCheck> {
    let (lo, hi) = interval;
    let grid = &w.grid;
    let range = grid.index_range(lo, hi);
    if !(lo < hi) || range.start < 2 || range.end + 2 > grid.nodes || range.is_empty() {
        return Err(Error::OutsideData {
            lo,
            hi,
            data_lo: grid.node(2),
            data_hi: grid.node(grid.nodes - 3),
        });
    }
    let radii = grid.radii();
    let lap = radial_laplacian(&w.values, &radii, grid.step(), n);
    let mut sup = 0.0f64;
    let mut at = radii[range.start];
    for j in range.clone() {
        let r = radii[j];
        let target = w_prev.value(r)?;
        let minus_lap = -lap[j].expect("stencil available inside the margin");
        let scale = if target != 0.0 {
            target.abs()
        } else {
            w.values[j].abs() / (r * r)
        };
        let diff = (minus_lap - target).abs();
        let res = if scale == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / scale
        };
        if res > sup || res.is_nan() {
            sup = res;
            at = r;
        }
    }
    Ok(PoissonCheck {
        sup_residual: sup,
        at_r: at,
        nodes_checked: range.len(),
        interval,
        tol,
        passed: sup <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub c1: f64,
    pub c2: f64,
    pub interval: (f64, f64),
    pub power: f64,
    pub log_power: f64,
}

impl Bracket {
    pub fn spread(&self) -> f64 {
        self.c2 / self.c1
    }
}

const BRACKET_POINTS: usize = 1001;

/// Extremes of `w(r) / (r^power ln^log_power r)` over `interval`.
pub fn bracket_against(w: &dyn RadialFn, power: f64, log_power: f64, interval: (f64, f64)) -> Result<Bracket> {
    let (lo, hi) = interval;
    if !(lo > 1.0 && hi > lo) {
        return Err(invalid("interval", format!("needs 1 < lo < hi, got ({lo}, {hi})")));
    }
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    for r in log_points(lo, hi, BRACKET_POINTS) {
        let v = w.value(r)?;
        if !(v > 0.0) {
            return Err(Error::Hypothesis(format!("nonpositive value {v} at r = {r}")));
        }
        let ratio = v / TailModel::shape(power, log_power, r);
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
    }
    Ok(Bracket {
        c1,
        c2,
        interval,
        power,
        log_power,
    })
}

/// Bracket of the chain member `w_i` against its leading asymptotics.
pub fn asymptotic_bracket(
    w: &dyn RadialFn,
    i: u32,
    n: u32,
    nu: f64,
    lambda: f64,
    interval: (f64, f64),
) -> Result<Bracket> {
    let (p, q) = chain_exponents(i, n, nu, lambda);
    bracket_against(w, p, q, interval)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogExponentFit {
    /// Slope of `ln(b r^{-power})` against `ln ln r`.
    pub log_power: f64,
    pub line: LineFit,
    pub interval: (f64, f64),
}

/// Least-squares log exponent of `b` after removing the power `r^power`.
pub fn log_exponent_fit(b: &dyn RadialFn, power: f64, interval: (f64, f64)) -> Result<LogExponentFit> {
    let (lo, hi) = interval;
    if !(lo > 1.0 && hi > lo) {
        return Err(invalid("interval", format!("needs 1 < lo < hi, got ({lo}, {hi})")));
    }
    let mut x = Vec::with_capacity(BRACKET_POINTS);
    let mut y = Vec::with_capacity(BRACKET_POINTS);
    for r in log_points(lo, hi, BRACKET_POINTS) {
        let v = b.value(r)?;
        if !(v > 0.0) {
            return Err(Error::Hypothesis(format!("nonpositive coefficient {v} at r = {r}")));
        }
        x.push(r.ln().ln());
        y.push(v.ln() - power * r.ln());
    }
    let line = fit_line(&x, &y).ok_or_else(|| Error::NonFinite("log exponent fit".into()))?;
    Ok(LogExponentFit {
        log_power: line.slope,
        line,
        interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::RadialProfile;
    use crate::tabulated::LogGrid;
    use approx::assert_relative_eq;

    fn grid() -> LogGrid {
        LogGrid::new(1e-2, 1e3, 2048).unwrap()
    }

    #[test]
    fn fundamental_solution_is_harmonic() {
        let w = TabulatedRadialFunction::from_fn(grid(), &RadialProfile::power(-1.0)).unwrap();
        let check = verify_poisson(&w, &RadialProfile::zero(), 3, (0.1, 100.0), 1e-8).unwrap();
        assert!(check.passed, "{check:?}");
    }

    #[test]
    fn sign_of_the_operator() {
        let w = TabulatedRadialFunction::from_fn(grid(), &RadialProfile::power(2.0)).unwrap();
        let minus_six = crate::radial::FnRadial(|_r: f64| -6.0);
        assert!(verify_poisson(&w, &minus_six, 3, (0.1, 100.0), 1e-8).unwrap().passed);
        let six = crate::radial::FnRadial(|_r: f64| 6.0);
        assert!(!verify_poisson(&w, &six, 3, (0.1, 100.0), 1e-8).unwrap().passed);
    }

    #[test]
    fn interval_must_leave_stencil_margin() {
        let w = TabulatedRadialFunction::from_fn(grid(), &RadialProfile::power(2.0)).unwrap();
        assert!(verify_poisson(&w, &RadialProfile::zero(), 3, (1e-2, 10.0), 1e-8).is_err());
        assert!(verify_poisson(&w, &RadialProfile::zero(), 3, (1.0, 1e3), 1e-8).is_err());
    }

    #[test]
    fn seed_ratio_tends_to_one() {
        let w = super::super::seed_profile(3, -3.0, 2.0).unwrap();
        let near = asymptotic_bracket(&w, 0, 3, -3.0, 2.0, (1e2, 1e3)).unwrap();
        let far = asymptotic_bracket(&w, 0, 3, -3.0, 2.0, (1e6, 1e7)).unwrap();
        assert!((far.c2 - 1.0).abs() < (near.c2 - 1.0).abs());
        assert!((far.c1 - 1.0).abs() < 1e-5 && far.c2 <= 1.0 + 1e-12);
    }

    #[test]
    fn bracket_is_homogeneous() {
        let w = super::super::seed_profile(4, -2.5, 2.0).unwrap();
        let a = asymptotic_bracket(&w, 0, 4, -2.5, 2.0, (1e2, 1e4)).unwrap();
        let scaled = w.clone().times(RadialProfile::constant(3.0));
        let b = asymptotic_bracket(&scaled, 0, 4, -2.5, 2.0, (1e2, 1e4)).unwrap();
        assert_relative_eq!(b.c1, 3.0 * a.c1, max_relative = 1e-14);
        assert_relative_eq!(b.c2, 3.0 * a.c2, max_relative = 1e-14);
        let neg = crate::radial::FnRadial(|_r: f64| -1.0);
        assert!(bracket_against(&neg, 0.0, 0.0, (10.0, 20.0)).is_err());
    }

    #[test]
    fn exact_power_log_fit() {
        let b = RadialProfile::power(-1.0).times(RadialProfile::log_power(-2.0));
        let fit = log_exponent_fit(&b, -1.0, (1e2, 1e4)).unwrap();
        assert_relative_eq!(fit.log_power, -2.0, max_relative = 1e-10);
    }
}
