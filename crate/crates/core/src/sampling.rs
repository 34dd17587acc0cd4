//! Log-uniform sampling with local refinement, used where no closed-form
//! extremum is available.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

impl Extremum {
    fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Extremum::Min => candidate < incumbent,
            Extremum::Max => candidate > incumbent,
        }
    }
}

/// Sampling schedule: initial log-uniform pass, then `rounds` passes of
/// `refine_points` samples over the bracket around the current best.
#[derive(Debug, Clone, Copy)]
pub struct SamplingPlan {
    pub initial_points: usize,
    pub refine_points: usize,
    pub rounds: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            initial_points: 129,
            refine_points: 33,
            rounds: 3,
        }
    }
}

/// Returns `(argument, value)` of the best sample of `f` on `[lo, hi]`
/// (`0 < lo < hi`). NaN samples are skipped.
pub fn sampled_extremum<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, which: Extremum, plan: &SamplingPlan) -> (f64, f64) {
    let mut grid = log_points(lo, hi, plan.initial_points.max(3));
    let mut best: Option<(f64, f64)> = None;
    for round in 0..=plan.rounds {
        let mut local: Option<(usize, f64)> = None;
        for (i, &r) in grid.iter().enumerate() {
            let v = f(r);
            if v.is_nan() {
                continue;
            }
            if local.map_or(true, |(_, lv)| which.better(v, lv)) {
                local = Some((i, v));
            }
        }
        let Some((i, v)) = local else { break };
        if best.map_or(true, |(_, bv)| which.better(v, bv)) {
            best = Some((grid[i], v));
        }
        if round == plan.rounds {
            break;
        }
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(grid.len() - 1)];
        if b <= a {
            break;
        }
        grid = log_points(a, b, plan.refine_points.max(3));
    }
    best.unwrap_or((lo, f64::NAN))
}

/// `count` log-uniformly spaced points from `lo` to `hi` inclusive.
pub fn log_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (la, lb) = (lo.ln(), hi.ln());
    let step = (lb - la) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                (la + step * i as f64).exp()
            }
        })
        .collect()
}
