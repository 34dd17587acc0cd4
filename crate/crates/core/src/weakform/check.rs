use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::TestFunction;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{QuadOptions, Quadrature};
use crate::radial::{radial_integral, RadialFn};

fn weak_opts() -> QuadOptions {
    QuadOptions::default().with_rel_tol(1e-10).with_max_panels(8000)
}

fn finite(q: Quadrature, what: &str) -> Result<f64> {
    if q.status.is_divergent() || !q.value.is_finite() {
        return Err(Error::NonFinite(format!("{what} integral did not converge")));
    }
    Ok(q.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakCheck {
    pub r1: f64,
    pub r2: f64,
    /// `∫ u (-1)^k Δ^k φ dx`.
    pub lhs: f64,
    /// `∫ b |u|^λ φ dx`.
    pub rhs: f64,
    pub tol: f64,
    pub verdict: bool,
}

impl WeakCheck {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).abs() / scale
        }
    }
}

/// Tests `∫ u (-1)^k Δ^k φ ≥ ∫ b |u|^λ φ` for radial `u`, `b` in `R^n`.
pub fn verify_weak(
    u: &dyn RadialFn,
    b: &dyn RadialFn,
    lambda: f64,
    k: u32,
    n: u32,
    test: &TestFunction,
    tol: f64,
) -> Result<WeakCheck> {
    if !(lambda > 1.0) {
        return Err(invalid("lambda", format!("must satisfy lambda > 1, got {lambda}")));
    }
    if k == 0 {
        return Err(invalid("k", "polyharmonic order must be at least 1"));
    }
    let opts = weak_opts();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let (r1, r2) = (test.r1, test.r2);
    let lhs = radial_integral(
        |r| {
            let l = test.iterated_laplacian(n, k, r);
            if l == 0.0 {
                return Ok(0.0);
            }
            Ok(sign * u.value(r)? * l)
        },
        r1,
        r2,
        n,
        &opts,
    )?;
    let source = |r: f64| -> Result<f64> {
        let uv = u.value(r)?;
        if uv == 0.0 {
            return Ok(0.0);
        }
        Ok(b.value(r)? * uv.abs().powf(lambda))
    };
    let inner = radial_integral(source, 0.0, r1, n, &opts)?;
    let transition = radial_integral(
        |r| {
            let phi = test.value(r);
            if phi == 0.0 {
                return Ok(0.0);
            }
            Ok(source(r)? * phi)
        },
        r1,
        r2,
        n,
        &opts,
    )?;
    let lhs = finite(lhs, "left-hand")?;
    let rhs = finite(inner.add(transition), "right-hand")?;
    Ok(WeakCheck {
        r1,
        r2,
        lhs,
        rhs,
        tol,
        verdict: lhs >= rhs - tol * rhs.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderChain {
    pub r1: f64,
    pub r2: f64,
    /// `∫_{r1<|x|<r2} a |u|`.
    pub lhs_shell: f64,
    /// `∫_{|x|<r1} b |u|^λ`.
    pub rhs_ball: f64,
    /// `∫_{r1<|x|<r2} a^{λ/(λ-1)} b^{-1/(λ-1)}`; infinite when `b` vanishes.
    pub hoelder_factor: f64,
    /// `∫_{r1<|x|<r2} b |u|^λ`.
    pub shell_source: f64,
    /// `factor^{(λ-1)/λ} shell_source^{1/λ}`.
    pub hoelder_bound: f64,
    /// `lhs_shell / ((r2 - r1)^m rhs_ball)`; `None` when the ball integral vanishes.
    pub fitted_c: Option<f64>,
    pub hoelder_holds: bool,
    /// The Hölder factor diverges, so the averaged coefficient is zero.
    pub degenerate: bool,
    pub verdict: bool,
}

/// Evaluates the quantities of the shell/ball estimate
/// `∫_shell a|u| ≥ C (r2-r1)^m ∫_ball b|u|^λ` and its Hölder bound.
#[allow(clippy::too_many_arguments)]
pub fn holder_chain_check(
    u: &dyn RadialFn,
    a: &dyn RadialFn,
    b: &dyn RadialFn,
    lambda: f64,
    m: u32,
    n: u32,
    r1: f64,
    r2: f64,
) -> Result<HolderChain> {
    if !(lambda > 1.0) {
        return Err(invalid("lambda", format!("must satisfy lambda > 1, got {lambda}")));
    }
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(invalid("interval", format!("need 0 < r1 < r2 < ∞, got ({r1}, {r2})")));
    }
    let opts = weak_opts();
    let lhs_shell = radial_integral(|r| Ok(a.value(r)? * u.value(r)?.abs()), r1, r2, n, &opts)?;
    let source = |r: f64| -> Result<f64> {
        let uv = u.value(r)?;
        if uv == 0.0 {
            return Ok(0.0);
        }
        Ok(b.value(r)? * uv.abs().powf(lambda))
    };
    let rhs_ball = radial_integral(source, 0.0, r1, n, &opts)?;
    let shell_source = radial_integral(source, r1, r2, n, &opts)?;

    let blown = Cell::new(false);
    let factor = radial_integral(
        |r| {
            let av = a.value(r)?;
            if av == 0.0 {
                return Ok(0.0);
            }
            let v = av.powf(lambda / (lambda - 1.0)) * b.value(r)?.powf(-1.0 / (lambda - 1.0));
            if !v.is_finite() {
                blown.set(true);
                return Ok(0.0);
            }
            Ok(v)
        },
        r1,
        r2,
        n,
        &opts,
    )?;
    let lhs_shell = finite(lhs_shell, "shell")?;
    let rhs_ball = finite(rhs_ball, "ball")?;
    let shell_source = finite(shell_source, "shell source")?;
    let degenerate = blown.get() || factor.status.is_divergent() || !factor.value.is_finite();
    let hoelder_factor = if degenerate { f64::INFINITY } else { factor.value };
    let hoelder_bound = if degenerate {
        f64::INFINITY
    } else {
        hoelder_factor.powf((lambda - 1.0) / lambda) * shell_source.powf(1.0 / lambda)
    };
    let hoelder_holds = degenerate || lhs_shell <= hoelder_bound * (1.0 + 1e-9) + 1e-300;
    let fitted_c = (rhs_ball > 0.0).then(|| lhs_shell / ((r2 - r1).powi(m as i32) * rhs_ball));
    let verdict = hoelder_holds && fitted_c.map_or(true, |c| c > 0.0);
    Ok(HolderChain {
        r1,
        r2,
        lhs_shell,
        rhs_ball,
        hoelder_factor,
        shell_source,
        hoelder_bound,
        fitted_c,
        hoelder_holds,
        degenerate,
        verdict,
    })
}
