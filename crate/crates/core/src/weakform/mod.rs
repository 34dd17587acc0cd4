//! Weak formulation checks for radial data against cutoff test functions
//! `φ(x) = S((r2 - |x|) / (r2 - r1))`, with `S` a polynomial smoothstep.

mod check;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stencil::radial_laplacian;
use crate::tabulated::TabulatedRadialFunction;

pub use check::{holder_chain_check, verify_weak, HolderChain, WeakCheck};

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smoothstep of order `N`: the degree `2N+1` polynomial equal to 0 at 0 and
/// 1 at 1 with `N` vanishing derivatives at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Smoothstep {
    pub order: u32,
    /// Monomial coefficients, index = power.
    coefficients: Vec<f64>,
}

impl Smoothstep {
    pub fn new(order: u32) -> Self {
        let n = u64::from(order);
        let mut coefficients = vec![0.0; 2 * order as usize + 2];
        for j in 0..=n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coefficients[(n + 1 + j) as usize] = sign * binomial(n + j, j) * binomial(2 * n + 1, n - j);
        }
        Self { order, coefficients }
    }

    /// `S^{(j)}(x)`, with `S = 0` left of 0 and `S = 1` right of 1.
    pub fn derivative(&self, j: u32, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return if j == 0 { 1.0 } else { 0.0 };
        }
        let j = j as usize;
        if j >= self.coefficients.len() {
            return 0.0;
        }
        // Horner on the j-th derivative coefficients.
        let mut acc = 0.0;
        for p in (j..self.coefficients.len()).rev() {
            let falling: f64 = (0..j).map(|i| (p - i) as f64).product();
            acc = acc * x + self.coefficients[p] * falling;
        }
        acc
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }
}

/// Coefficients `c_j` with `Δ^k g = Σ_j c_j r^{j-2k} g^{(j)}` for radial `g`
/// in `R^n`; index `j` runs over `0..=2k`.
pub fn iterated_laplacian_coefficients(n: u32, k: u32) -> Vec<f64> {
    let dim = f64::from(n);
    let mut c = vec![1.0];
    for level in 0..k {
        let mut next = vec![0.0; c.len() + 2];
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            let e = j as f64 - 2.0 * f64::from(level);
            next[j] += cj * (e * (e - 1.0) + (dim - 1.0) * e);
            next[j + 1] += cj * (2.0 * e + dim - 1.0);
            next[j + 2] += cj;
        }
        c = next;
    }
    c
}

/// Radial cutoff equal to 1 on `B_{r1}` and 0 outside `B_{r2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub r1: f64,
    pub r2: f64,
    pub step: Smoothstep,
}

impl TestFunction {
    /// Cutoff whose smoothstep has `m` vanishing derivatives at both ends.
    pub fn new(r1: f64, r2: f64, m: u32) -> Result<Self> {
        if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
            return Err(invalid("test", format!("need 0 < r1 < r2 < ∞, got ({r1}, {r2})")));
        }
        if m == 0 {
            return Err(invalid("m", "smoothness order must be at least 1"));
        }
        Ok(Self {
            r1,
            r2,
            step: Smoothstep::new(m),
        })
    }

    pub fn width(&self) -> f64 {
        self.r2 - self.r1
    }

    fn argument(&self, r: f64) -> f64 {
        (self.r2 - r) / self.width()
    }

    pub fn value(&self, r: f64) -> f64 {
        self.step.value(self.argument(r))
    }

    /// `d^j φ / dr^j`.
    pub fn derivative(&self, j: u32, r: f64) -> f64 {
        let scale = (-1.0 / self.width()).powi(j as i32);
        scale * self.step.derivative(j, self.argument(r))
    }

    /// `Δ^k φ` evaluated exactly from the smoothstep polynomial.
    pub fn iterated_laplacian(&self, n: u32, k: u32, r: f64) -> f64 {
        if r <= self.r1 || r >= self.r2 {
            return 0.0;
        }
        iterated_laplacian_coefficients(n, k)
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| c * r.powi(j as i32 - 2 * k as i32) * self.derivative(j as u32, r))
            .sum()
    }

    /// `sup_{[0,1]} |S^{(j)}|`, so `|φ^{(j)}| ≤ bound / (r2 - r1)^j`.
    pub fn derivative_bound(&self, j: u32) -> f64 {
        (0..=4096)
            .map(|i| self.step.derivative(j, f64::from(i) / 4096.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `Δ^k g` on the nodes of a tabulation, by `k` stencil applications. Entry
/// `j` is `None` within `2k` nodes of either end.
pub fn radial_laplacian_iter(g: &TabulatedRadialFunction, n: u32, k: u32) -> Result<Vec<Option<f64>>> {
    let len = g.values.len();
    let margin = 2 * k as usize;
    if len <= 2 * margin {
        return Err(invalid(
            "grid",
            format!("{len} nodes leave no interior after {k} stencil applications"),
        ));
    }
    let radii = g.radii();
    let h = g.grid.step();
    let mut start = 0;
    let mut current = g.values.clone();
    for _ in 0..k {
        let lap = radial_laplacian(&current, &radii[start..start + current.len()], h, n);
        current = lap.into_iter().flatten().collect();
        start += 2;
    }
    let mut out = vec![None; len];
    for (i, v) in current.into_iter().enumerate() {
        out[start + i] = Some(v);
    }
    Ok(out)
}
