//! Lower-bound recurrence for the ball functional on `r_i = σ^{i/2} r_0`:
//! `J_{i+1} = J_i + C (r_{i+1} - r_i)^{λm} r_i^{(1-λ)n} sup h · J_i^λ`.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use super::StepClass;
use crate::error::{invalid, Result};
use crate::sampling::{sampled_extremum, Extremum, SamplingPlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupParams {
    pub lambda: f64,
    pub m: u32,
    pub n: u32,
    pub sigma: f64,
    /// Constant of the step inequality.
    pub c: f64,
    pub j0: f64,
    pub r0: f64,
    pub max_steps: usize,
    pub overflow: f64,
}

impl BlowupParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0) {
            return Err(invalid(
                "lambda",
                format!("must satisfy lambda > 1, got {}", self.lambda),
            ));
        }
        if !(self.sigma > 1.0) {
            return Err(invalid("sigma", format!("must satisfy sigma > 1, got {}", self.sigma)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(invalid("c", format!("must be positive, got {}", self.c)));
        }
        if !(self.j0 >= 0.0 && self.j0.is_finite()) {
            return Err(invalid(
                "j0",
                format!("must be finite and nonnegative, got {}", self.j0),
            ));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(invalid("r0", format!("must be positive, got {}", self.r0)));
        }
        if !(self.overflow > 0.0) {
            return Err(invalid("overflow", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrajectory {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Class of the step from `radii[i]` to `radii[i+1]`.
    pub labels: Vec<StepClass>,
    /// Sampled maximizer of `h` on each step.
    pub sup_points: Vec<f64>,
    pub blow_up: bool,
    pub blow_up_index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub i: usize,
    pub r: f64,
    pub value: f64,
    /// Class of the step leaving this point; empty on the last point.
    pub label: &'static str,
}

impl GrowthTrajectory {
    pub fn rows(&self) -> Vec<TrajectoryRow> {
        (0..self.values.len())
            .map(|i| TrajectoryRow {
                i,
                r: self.radii[i],
                value: self.values[i],
                label: self.labels.get(i).map_or("", |l| l.as_str()),
            })
            .collect()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Iterates the recurrence until `max_steps` or until the value exceeds
/// `overflow`, which is recorded as blow-up.
pub fn blowup_iterate<H>(h: H, params: &BlowupParams, plan: &SamplingPlan) -> Result<GrowthTrajectory>
where
    H: Fn(f64) -> Result<f64>,
{
    params.validate()?;
    let BlowupParams {
        lambda,
        m,
        n,
        sigma,
        c,
        j0,
        r0,
        max_steps,
        overflow,
    } = *params;
    let step = sigma.sqrt();
    let mut out = GrowthTrajectory {
        radii: vec![r0],
        values: vec![j0],
        labels: Vec::new(),
        sup_points: Vec::new(),
        blow_up: false,
        blow_up_index: None,
    };
    let mut r = r0;
    let mut j = j0;
    for i in 0..max_steps {
        let next_r = r * step;
        let failure = RefCell::new(None);
        let (at, sup) = sampled_extremum(
            |x| match h(x) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            r,
            next_r,
            Extremum::Max,
            plan,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let increment = if j == 0.0 || sup == 0.0 {
            0.0
        } else {
            c * (next_r - r).powf(lambda * f64::from(m)) * r.powf((1.0 - lambda) * f64::from(n)) * sup * j.powf(lambda)
        };
        let next_j = j + increment;
        out.labels.push(StepClass::of(j, next_j));
        out.sup_points.push(at);
        out.radii.push(next_r);
        out.values.push(next_j);
        if !(next_j <= overflow) {
            out.blow_up = true;
            out.blow_up_index = Some(i + 1);
            break;
        }
        r = next_r;
        j = next_j;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: f64, j0: f64) -> BlowupParams {
        BlowupParams {
            lambda: 2.0,
            m: 2,
            n: 3,
            sigma: 4.0,
            c,
            j0,
            r0: 1.0,
            max_steps: 50,
            overflow: 1e30,
        }
    }

    #[test]
    fn unit_coefficient_blows_up_quickly() {
        let t = blowup_iterate(|_| Ok(1.0), &params(1.0, 1.0), &SamplingPlan::default()).unwrap();
        assert!(t.blow_up && t.blow_up_index.unwrap() <= 10, "{t:?}");
        assert!(t.is_nondecreasing());
        assert_eq!(t.labels.len() + 1, t.values.len());
    }

    #[test]
    fn zero_start_stays_zero() {
        let t = blowup_iterate(|_| Ok(1.0), &params(1.0, 0.0), &SamplingPlan::default()).unwrap();
        assert!(!t.blow_up);
        assert!(t.values.iter().all(|&v| v == 0.0));
        assert_eq!(t.values.len(), 51);
    }

    #[test]
    fn rows_carry_labels() {
        let t = blowup_iterate(|_| Ok(1.0), &params(1.0, 1.0), &SamplingPlan::default()).unwrap();
        let rows = t.rows();
        assert_eq!(rows.len(), t.values.len());
        assert_eq!(rows.last().unwrap().label, "");
        assert!(rows[0].label == "doubling" || rows[0].label == "slow");
    }
}
