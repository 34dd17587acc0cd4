//! Radial functions tabulated on log-uniform grids, with head and tail
//! models outside the tabulated range.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::radial::RadialFn;

/// Log-uniform grid `r_j = r_lo * exp(j h)`, `j = 0..nodes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub r_lo: f64,
    pub r_hi: f64,
    pub nodes: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self {
            r_lo: 1e-3,
            r_hi: 1e5,
            nodes: 4096,
        }
    }
}

impl LogGrid {
    pub fn new(r_lo: f64, r_hi: f64, nodes: usize) -> Result<Self> {
        let grid = Self { r_lo, r_hi, nodes };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_lo > 0.0 && self.r_lo.is_finite()) {
            return Err(invalid("r_lo", format!("must be positive, got {}", self.r_lo)));
        }
        if !(self.r_hi > self.r_lo && self.r_hi.is_finite()) {
            return Err(invalid("r_hi", format!("must exceed r_lo, got {}", self.r_hi)));
        }
        if self.nodes < 8 {
            return Err(invalid("nodes", format!("need at least 8 nodes, got {}", self.nodes)));
        }
        Ok(())
    }

    /// Spacing in `ln r`.
    pub fn step(&self) -> f64 {
        (self.r_hi / self.r_lo).ln() / (self.nodes - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == 0 {
            self.r_lo
        } else if j + 1 == self.nodes {
            self.r_hi
        } else {
            self.r_lo * (self.step() * j as f64).exp()
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.nodes).map(|j| self.node(j)).collect()
    }

    /// Grid with half the spacing; every old node is kept.
    pub fn refined(&self) -> LogGrid {
        LogGrid {
            nodes: 2 * (self.nodes - 1) + 1,
            ..*self
        }
    }

    /// Indices of the nodes with `lo <= r_j <= hi`.
    pub fn index_range(&self, lo: f64, hi: f64) -> Range<usize> {
        let h = self.step();
        let first = ((lo / self.r_lo).ln() / h - 1e-9).ceil().max(0.0) as usize;
        let last = ((hi / self.r_lo).ln() / h + 1e-9).floor();
        if last < 0.0 {
            return 0..0;
        }
        let end = (last as usize + 1).min(self.nodes);
        first.min(end)..end
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.r_lo && r <= self.r_hi
    }
}

/// `coefficient * r^power * (ln r)^log_power`, used beyond the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub power: f64,
    pub log_power: f64,
    pub coefficient: f64,
}

impl TailModel {
    pub fn shape(power: f64, log_power: f64, r: f64) -> f64 {
        let log_factor = if log_power == 0.0 { 1.0 } else { r.ln().powf(log_power) };
        r.powf(power) * log_factor
    }

    /// Model with the given exponents matching `value` at `r`.
    pub fn matched(power: f64, log_power: f64, r: f64, value: f64) -> Self {
        Self {
            power,
            log_power,
            coefficient: value / Self::shape(power, log_power, r),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        if self.coefficient == 0.0 {
            return 0.0;
        }
        self.coefficient * Self::shape(self.power, self.log_power, r)
    }
}

/// Behavior below the first grid node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeadModel {
    /// Values below `r_lo` are unavailable.
    #[default]
    None,
    /// Smooth even behavior `c0 + c2 r^2` near the origin.
    Even { c0: f64, c2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Four-point Lagrange in `ln r` on the values.
    Cubic,
    /// Four-point Lagrange in `ln r` on `ln(value)`; needs positive values.
    #[default]
    LogCubic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedRadialFunction {
    pub grid: LogGrid,
    pub values: Vec<f64>,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub tail: Option<TailModel>,
    #[serde(default)]
    pub head: HeadModel,
}

impl TabulatedRadialFunction {
    /// Tabulation with log-cubic interpolation when all values are positive
    /// and plain cubic otherwise.
    pub fn new(grid: LogGrid, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.nodes {
            return Err(invalid(
                "values",
                format!("expected {} values, got {}", grid.nodes, values.len()),
            ));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("tabulated value at r = {}", grid.node(bad))));
        }
        let interpolation = if values.iter().all(|&v| v > 0.0) {
            Interpolation::LogCubic
        } else {
            Interpolation::Cubic
        };
        Ok(Self {
            grid,
            values,
            interpolation,
            tail: None,
            head: HeadModel::None,
        })
    }

    pub fn from_fn<F: RadialFn>(grid: LogGrid, f: &F) -> Result<Self> {
        let values = grid
            .radii()
            .into_iter()
            .map(|r| f.value(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = Some(tail);
        self
    }

    /// Tail with the given exponents, matched to the last node.
    pub fn with_matched_tail(self, power: f64, log_power: f64) -> Self {
        let r = self.grid.r_hi;
        let v = *self.values.last().unwrap_or(&0.0);
        self.with_tail(TailModel::matched(power, log_power, r, v))
    }

    /// Even head `c0 + c2 r^2` through the first two nodes.
    pub fn with_even_head(mut self) -> Self {
        let (r0, r1) = (self.grid.node(0), self.grid.node(1));
        let (v0, v1) = (self.values[0], self.values[1]);
        let c2 = (v1 - v0) / (r1 * r1 - r0 * r0);
        self.head = HeadModel::Even {
            c0: v0 - c2 * r0 * r0,
            c2,
        };
        self
    }

    /// Pointwise multiple; models are scaled along.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= factor;
        }
        if let Some(t) = &mut out.tail {
            t.coefficient *= factor;
        }
        if let HeadModel::Even { c0, c2 } = &mut out.head {
            *c0 *= factor;
            *c2 *= factor;
        }
        if factor <= 0.0 {
            out.interpolation = Interpolation::Cubic;
        }
        out
    }

    pub fn radii(&self) -> Vec<f64> {
        self.grid.radii()
    }

    /// Relative mismatch between the tail model and the last node value.
    pub fn tail_mismatch(&self) -> Option<f64> {
        let tail = self.tail?;
        let v = *self.values.last()?;
        let m = tail.value(self.grid.r_hi);
        Some(if v == 0.0 { m.abs() } else { ((m - v) / v).abs() })
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.values.len() != self.grid.nodes {
            return Err(invalid("values", "length does not match grid"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tabulated values".into()));
        }
        if self.interpolation == Interpolation::LogCubic && self.values.iter().any(|&v| v <= 0.0) {
            return Err(invalid("interpolation", "log_cubic needs positive values"));
        }
        if let Some(mismatch) = self.tail_mismatch() {
            if mismatch > 0.01 {
                return Err(invalid(
                    "tail",
                    format!("tail model differs from last node by {mismatch:.3e} (relative)"),
                ));
            }
        }
        Ok(())
    }

    fn interpolate(&self, r: f64) -> f64 {
        let n = self.grid.nodes;
        let x = (r / self.grid.r_lo).ln() / self.grid.step();
        let cell = (x.floor().max(0.0) as usize).min(n - 2);
        let base = cell.saturating_sub(1).min(n - 4);
        let s = x - base as f64;
        let w = [
            -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
            s * (s - 2.0) * (s - 3.0) / 2.0,
            -s * (s - 1.0) * (s - 3.0) / 2.0,
            s * (s - 1.0) * (s - 2.0) / 6.0,
        ];
        let v = &self.values[base..base + 4];
        match self.interpolation {
            Interpolation::Cubic => w[0] * v[0] + w[1] * v[1] + w[2] * v[2] + w[3] * v[3],
            Interpolation::LogCubic => {
                (w[0] * v[0].ln() + w[1] * v[1].ln() + w[2] * v[2].ln() + w[3] * v[3].ln()).exp()
            }
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::Domain { r, lower: 0.0 });
        }
        if r < self.grid.r_lo {
            return match self.head {
                HeadModel::Even { c0, c2 } => Ok(c0 + c2 * r * r),
                HeadModel::None => Err(Error::OutsideData {
                    lo: r,
                    hi: r,
                    data_lo: self.grid.r_lo,
                    data_hi: self.grid.r_hi,
                }),
            };
        }
        if r > self.grid.r_hi {
            return match &self.tail {
                Some(t) => Ok(t.value(r)),
                None => Err(Error::OutsideData {
                    lo: r,
                    hi: r,
                    data_lo: self.grid.r_lo,
                    data_hi: self.grid.r_hi,
                }),
            };
        }
        Ok(self.interpolate(r))
    }
}

impl RadialFn for TabulatedRadialFunction {
    fn value(&self, r: f64) -> Result<f64> {
        self.eval(r)
    }
}
