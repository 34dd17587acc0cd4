//! Statistical check of the averaging inequality
//! `(∫_{r1}^{r2} ψ^α)^{1/α} ≥ A ∫_{r1}^{r2} r^{1/α-1} γ(r) dr`, where
//! `γ(r) = ess inf ψ` over `(r/κ, κr) ∩ (r1, r2)` and `r2 ≥ ν r1`, on
//! random piecewise-constant `ψ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Nonnegative step function on `[edges[0], edges.last()]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstant {
    pub edges: Vec<f64>,
    pub levels: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(edges: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if edges.len() != levels.len() + 1 || levels.is_empty() {
            return Err(invalid("psi", "needs one more edge than levels"));
        }
        if !edges.windows(2).all(|w| w[1] > w[0]) || !(edges[0] > 0.0) {
            return Err(invalid("psi", "edges must be positive and strictly increasing"));
        }
        if levels.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(invalid("psi", "levels must be finite and nonnegative"));
        }
        Ok(Self { edges, levels })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            edges: self.edges.clone(),
            levels: self.levels.iter().map(|v| v * factor).collect(),
        }
    }

    /// `(∫ ψ^α)^{1/α}`.
    pub fn power_mean(&self, alpha: f64) -> f64 {
        let s: f64 = self
            .levels
            .iter()
            .zip(self.edges.windows(2))
            .filter(|(v, _)| **v > 0.0)
            .map(|(v, w)| (w[1] - w[0]) * v.powf(alpha))
            .sum();
        s.powf(1.0 / alpha)
    }

    /// Essential infimum over the open interval `(a, b)` clipped to the support.
    fn ess_inf(&self, a: f64, b: f64) -> f64 {
        self.levels
            .iter()
            .zip(self.edges.windows(2))
            .filter(|(_, w)| w[0] < b && w[1] > a)
            .map(|(v, _)| *v)
            .fold(f64::INFINITY, f64::min)
    }

    /// `∫ r^{1/α-1} γ(r) dr`, exact: `γ` is constant between the points
    /// `e κ^{±1}` for edges `e`.
    pub fn weighted_local_inf(&self, alpha: f64, kappa: f64) -> f64 {
        let (lo, hi) = (self.edges[0], *self.edges.last().expect("nonempty"));
        let mut cuts: Vec<f64> = vec![lo, hi];
        for &e in &self.edges {
            for c in [e * kappa, e / kappa] {
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let p = 1.0 / alpha;
        cuts.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let g = self.ess_inf(mid / kappa, mid * kappa);
                if g == 0.0 {
                    0.0
                } else {
                    g * alpha * (w[1].powf(p) - w[0].powf(p))
                }
            })
            .sum()
    }
}

/// Random step functions: midpoint splits of `[1, r2]` to a bounded depth,
/// with `r2 = ν 2^j` for `j` uniform in `0..=extra_doublings`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsiGenerator {
    pub max_depth: u32,
    pub split_probability: f64,
    pub zero_probability: f64,
    /// Nonzero levels are `10^U(lo, hi)`.
    pub log10_levels: (f64, f64),
    pub extra_doublings: u32,
}

impl Default for PsiGenerator {
    fn default() -> Self {
        Self {
            max_depth: 6,
            split_probability: 0.5,
            zero_probability: 0.1,
            log10_levels: (-3.0, 3.0),
            extra_doublings: 3,
        }
    }
}

impl PsiGenerator {
    pub fn sample(&self, rng: &mut ChaCha8Rng, nu: f64) -> PiecewiseConstant {
        let r2 = nu * 2f64.powi(rng.gen_range(0..=self.extra_doublings) as i32);
        let mut edges = vec![1.0];
        self.split(rng, 1.0, r2, 0, &mut edges);
        let levels = (0..edges.len() - 1)
            .map(|_| {
                if rng.gen::<f64>() < self.zero_probability {
                    0.0
                } else {
                    10f64.powf(rng.gen_range(self.log10_levels.0..=self.log10_levels.1))
                }
            })
            .collect();
        PiecewiseConstant { edges, levels }
    }

    fn split(&self, rng: &mut ChaCha8Rng, a: f64, b: f64, depth: u32, edges: &mut Vec<f64>) {
        if depth < self.max_depth && rng.gen::<f64>() < self.split_probability {
            let mid = 0.5 * (a + b);
            self.split(rng, a, mid, depth + 1, edges);
            self.split(rng, mid, b, depth + 1, edges);
        } else {
            edges.push(b);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingTrial {
    pub trial: usize,
    pub r2: f64,
    pub pieces: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when the right side vanishes.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragingStats {
    pub alpha: f64,
    pub kappa: f64,
    pub nu: f64,
    pub trials: usize,
    pub seed: u64,
    pub vacuous: usize,
    pub min_ratio: f64,
    pub argmin: Option<usize>,
    /// `(trial, ratio)` each time the running minimum drops by more than
    /// one part in `1e9`.
    pub new_minima: Vec<(usize, f64)>,
    pub last_new_minimum: Option<usize>,
    /// No new minimum in the second half of the trials.
    pub stabilized: bool,
    pub median_ratio: f64,
}

/// Runs `trials` seeded trials; trial `t` draws from ChaCha stream `t`, so
/// results do not depend on thread scheduling.
pub fn averaging_harness(
    alpha: f64,
    kappa: f64,
    nu: f64,
    trials: usize,
    seed: u64,
    generator: &PsiGenerator,
) -> Result<(AveragingStats, Vec<AveragingTrial>)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    if !(kappa > 1.0) {
        return Err(invalid("kappa", format!("must exceed 1, got {kappa}")));
    }
    if !(nu > 1.0) {
        return Err(invalid("nu", format!("must exceed 1, got {nu}")));
    }
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let results: Vec<AveragingTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let psi = generator.sample(&mut rng, nu);
            let lhs = psi.power_mean(alpha);
            let rhs = psi.weighted_local_inf(alpha, kappa);
            AveragingTrial {
                trial: t,
                r2: *psi.edges.last().expect("nonempty"),
                pieces: psi.levels.len(),
                lhs,
                rhs,
                ratio: (rhs > 0.0).then(|| lhs / rhs),
            }
        })
        .collect();

    let mut new_minima = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut argmin = None;
    let mut ratios = Vec::with_capacity(trials);
    for t in &results {
        let Some(q) = t.ratio else { continue };
        ratios.push(q);
        if q < min_ratio * (1.0 - 1e-9) {
            new_minima.push((t.trial, q));
        }
        if q < min_ratio {
            min_ratio = q;
            argmin = Some(t.trial);
        }
    }
    ratios.sort_by(f64::total_cmp);
    let median_ratio = ratios.get(ratios.len() / 2).copied().unwrap_or(f64::NAN);
    let last_new_minimum = new_minima.last().map(|(t, _)| *t);
    let stats = AveragingStats {
        alpha,
        kappa,
        nu,
        trials,
        seed,
        vacuous: results.iter().filter(|t| t.ratio.is_none()).count(),
        min_ratio,
        argmin,
        new_minima,
        last_new_minimum,
        stabilized: last_new_minimum.is_some_and(|t| t < trials / 2),
        median_ratio,
    };
    Ok((stats, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_psi_closed_form() {
        let (alpha, kappa, nu, c) = (0.5, 2.0, 4.0, 3.0);
        let psi = PiecewiseConstant::new(vec![1.0, nu], vec![c]).unwrap();
        assert_relative_eq!(
            psi.power_mean(alpha),
            (nu - 1.0f64).powf(1.0 / alpha) * c,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            psi.weighted_local_inf(alpha, kappa),
            c * alpha * (nu.powf(1.0 / alpha) - 1.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn tiny_bump_leaves_little_on_the_right() {
        let psi = PiecewiseConstant::new(vec![1.0, 2.0, 2.001, 4.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(psi.weighted_local_inf(1.0, 1.5), 0.0);
        assert!(psi.power_mean(1.0) > 0.0);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let psi = PiecewiseConstant::new(vec![1.0, 1.5, 2.5, 4.0], vec![2.0, 0.5, 7.0]).unwrap();
        let r = psi.power_mean(0.25) / psi.weighted_local_inf(0.25, 2.0);
        let s = psi.scaled(13.0);
        assert_relative_eq!(
            s.power_mean(0.25) / s.weighted_local_inf(0.25, 2.0),
            r,
            max_relative = 1e-12
        );
    }

    #[test]
    fn local_inf_matches_brute_force() {
        let psi = PiecewiseConstant::new(vec![1.0, 1.3, 2.2, 2.9, 5.0], vec![4.0, 1.0, 0.2, 3.0]).unwrap();
        let (alpha, kappa) = (0.5, 1.4);
        let n = 200_000;
        let brute: f64 = (0..n)
            .map(|i| {
                let r = 1.0 + 4.0 * (f64::from(i) + 0.5) / f64::from(n);
                r.powf(1.0 / alpha - 1.0) * psi.ess_inf(r / kappa, r * kappa) * 4.0 / f64::from(n)
            })
            .sum();
        assert_relative_eq!(psi.weighted_local_inf(alpha, kappa), brute, max_relative = 1e-4);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let g = PsiGenerator::default();
        let (a, ta) = averaging_harness(0.5, 1.5, 4.0, 500, 7, &g).unwrap();
        let (b, tb) = averaging_harness(0.5, 1.5, 4.0, 500, 7, &g).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        assert!(a.min_ratio > 0.0);
        assert!(averaging_harness(1.5, 1.5, 4.0, 10, 7, &g).is_err());
    }
}
