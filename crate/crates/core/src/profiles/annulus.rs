//! Essential extrema over intervals and integrals over spherical shells.

use serde::{Deserialize, Serialize};

use super::{Monotonicity, RadialProfile};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_singular, integrate_with_breaks, try_integrate, QuadOptions, Quadrature};
use crate::sampling::{sampled_extremum, Extremum, SamplingPlan};
use crate::special::unit_sphere_area;

/// Essential infimum or supremum with an exactness flag. When `exact` is
/// false the value comes from sampling: an upper bound for an infimum, a
/// lower bound for a supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssBound {
    pub value: f64,
    pub exact: bool,
}

/// `ω_{n-1} ∫_{r1}^{r2} f(ρ) ρ^{n-1} dρ` for a function that is smooth on
/// `(r1, r2)` and behaves like `(ρ - r1)^left_order` at the left end.
pub fn smooth_shell_integral<F>(
    f: F,
    r1: f64,
    r2: f64,
    n: u32,
    left_order: f64,
    opts: &QuadOptions,
) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64>,
{
    if r2 <= r1 {
        return Ok(Quadrature::zero());
    }
    let dim = f64::from(n);
    let order = left_order + if r1 == 0.0 { dim - 1.0 } else { 0.0 };
    let surface = unit_sphere_area(n);
    let q = if order < 0.0 {
        try_integrate(
            |r| Ok(f(r)? * r.powf(dim - 1.0)),
            |g| integrate_singular(g, r1, r2, order, 0.0, opts),
        )?
    } else if r1 > 0.0 && r2 / r1 > 4.0 {
        // Log substitution, with one starting panel per decade.
        let (t1, t2) = (r1.ln(), r2.ln());
        let decades = ((t2 - t1) / std::f64::consts::LN_10).ceil().max(1.0) as usize;
        let points: Vec<f64> = (0..=decades)
            .map(|i| {
                if i == decades {
                    t2
                } else {
                    t1 + (t2 - t1) * i as f64 / decades as f64
                }
            })
            .collect();
        try_integrate(
            |t| {
                let r = t.exp();
                let v = f(r)?;
                Ok(if v == 0.0 { 0.0 } else { v * (dim * t).exp() })
            },
            |g| integrate_with_breaks(g, &points, opts),
        )?
    } else {
        try_integrate(
            |r| {
                let v = f(r)?;
                Ok(if v == 0.0 { 0.0 } else { v * r.powf(dim - 1.0) })
            },
            |g| integrate_with_breaks(g, &[r1, r2], opts),
        )?
    };
    Ok(q.scale(surface))
}

impl RadialProfile {
    /// Open sub-intervals of `(lo, hi)` between consecutive breakpoints.
    fn smooth_pieces(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut edges = vec![lo];
        edges.extend(self.breakpoints(lo, hi));
        edges.push(hi);
        edges.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
    }

    fn check_interval(&self, lo: f64, hi: f64) -> Result<()> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "interval",
                reason: format!("need 0 <= lo < hi < ∞, got ({lo}, {hi})"),
            });
        }
        let lower = self.domain_lower();
        if lo < lower {
            return Err(Error::Domain { r: lo, lower });
        }
        Ok(())
    }

    /// Essential infimum or supremum over the open interval `(lo, hi)`.
    ///
    /// Exact for closed-form monotone pieces, which covers powers, logs
    /// and their monotone combinations; sampled otherwise.
    pub fn ess_bound_interval(&self, lo: f64, hi: f64, which: Extremum, plan: &SamplingPlan) -> Result<EssBound> {
        self.check_interval(lo, hi)?;
        let mut best: Option<f64> = None;
        let mut exact = true;
        for (a, b) in self.smooth_pieces(lo, hi) {
            let piece = self.resolve(a, b);
            let value = if piece.is_identically_zero() {
                0.0
            } else if piece.is_identically_infinite() {
                f64::INFINITY
            } else {
                match (piece.closed_form_monotonicity(), which) {
                    (Monotonicity::Constant, _) => piece.eval(if a > 0.0 { (a * b).sqrt() } else { 0.5 * b })?,
                    (Monotonicity::Nondecreasing, Extremum::Min) | (Monotonicity::Nonincreasing, Extremum::Max) => {
                        piece.eval(a)?
                    }
                    (Monotonicity::Nonincreasing, Extremum::Min) | (Monotonicity::Nondecreasing, Extremum::Max) => {
                        piece.eval(b)?
                    }
                    (Monotonicity::Unknown, _) => {
                        exact = false;
                        let start = if a > 0.0 { a } else { b * 1e-9 };
                        let failure = std::cell::RefCell::new(None);
                        let (_, v) = sampled_extremum(
                            |r| match piece.eval(r) {
                                Ok(v) => v,
                                Err(e) => {
                                    failure.borrow_mut().get_or_insert(e);
                                    f64::NAN
                                }
                            },
                            start,
                            b,
                            which,
                            plan,
                        );
                        if let Some(e) = failure.into_inner() {
                            return Err(e);
                        }
                        v
                    }
                }
            };
            best = Some(match (best, which) {
                (None, _) => value,
                (Some(x), Extremum::Min) => x.min(value),
                (Some(x), Extremum::Max) => x.max(value),
            });
        }
        Ok(EssBound {
            value: best.unwrap_or(0.0),
            exact,
        })
    }

    pub fn ess_inf_interval(&self, lo: f64, hi: f64) -> Result<EssBound> {
        self.ess_bound_interval(lo, hi, Extremum::Min, &SamplingPlan::default())
    }

    pub fn ess_sup_interval(&self, lo: f64, hi: f64) -> Result<EssBound> {
        self.ess_bound_interval(lo, hi, Extremum::Max, &SamplingPlan::default())
    }

    /// Essential infimum over the shell `r / ratio < |x| < ratio r`.
    pub fn ess_inf_annulus(&self, r: f64, ratio: f64) -> Result<EssBound> {
        if !(ratio > 1.0) {
            return Err(Error::InvalidParameter {
                name: "ratio",
                reason: format!("must exceed 1, got {ratio}"),
            });
        }
        self.ess_inf_interval(r / ratio, r * ratio)
    }

    /// `∫_{r1 < |x| < r2} p(|x|) dx` in dimension `n`.
    ///
    /// Non-integrable power or log singularities at the left end give a
    /// symbolic `+∞`; a shell where the profile is identically `+∞` does
    /// too.
    pub fn annulus_integral(&self, r1: f64, r2: f64, n: u32, opts: &QuadOptions) -> Result<Quadrature> {
        self.check_interval(r1, r2)?;
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "dimension must be positive".into(),
            });
        }
        let mut total = Quadrature::zero();
        for (a, b) in self.smooth_pieces(r1, r2) {
            let piece = self.resolve(a, b);
            if piece.is_identically_zero() {
                continue;
            }
            if piece.is_identically_infinite() {
                return Ok(Quadrature::divergent());
            }
            let order = piece.endpoint_order(a);
            let q = smooth_shell_integral(|r| piece.eval(r), a, b, n, order, opts)?;
            total = total.add(q);
            if total.status.is_divergent() {
                break;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadStatus;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn monotone_inf_at_outer_radius() {
        let e = RadialProfile::power(-1.0).ess_inf_annulus(2.0, 2.0).unwrap();
        assert_eq!(e.value, 0.25);
        assert!(e.exact);
    }

    #[test]
    fn dyadic_gap_has_zero_inf() {
        let sigma = 2f64.powf(0.25);
        let p = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, RadialProfile::constant(1.0));
        // Centered in the gap (32, 64).
        let e = p.ess_inf_annulus(45.0, sigma).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.exact);
        // Centered in the shell (16, 32).
        let e = p.ess_inf_annulus(16.0 * 2f64.sqrt(), sigma).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn constant_inf() {
        let e = RadialProfile::constant(0.7).ess_inf_annulus(3.3, 5.0).unwrap();
        assert_eq!(e.value, 0.7);
    }

    #[test]
    fn unknown_monotonicity_is_sampled() {
        // r^{-1} log^3 r peaks at r = e^3.
        let p = RadialProfile::power(-1.0).times(RadialProfile::log_power(3.0));
        let inf = p.ess_inf_interval(2.0, 100.0).unwrap();
        assert!(!inf.exact);
        let expect = (2f64.ln().powi(3) / 2.0).min(100f64.ln().powi(3) / 100.0);
        assert_relative_eq!(inf.value, expect, max_relative = 1e-12);
        let sup = p.ess_sup_interval(2.0, 100.0).unwrap();
        assert_relative_eq!(sup.value, 27.0 * (-3f64).exp(), max_relative = 1e-6);
    }

    #[test]
    fn ball_volume_and_closed_forms() {
        let opts = QuadOptions::default();
        let q = RadialProfile::constant(1.0)
            .annulus_integral(0.0, 1.0, 3, &opts)
            .unwrap();
        assert_relative_eq!(q.value, 4.0 * PI / 3.0, max_relative = 1e-12);
        let q = RadialProfile::power(-1.0).annulus_integral(1.0, 2.0, 3, &opts).unwrap();
        assert_relative_eq!(q.value, 6.0 * PI, max_relative = 1e-12);
        for n in 1..=5u32 {
            let q = RadialProfile::power(-f64::from(n))
                .annulus_integral(0.0, 1.0, n, &opts)
                .unwrap();
            assert_eq!(q.status, QuadStatus::Divergent);
            assert!(q.value.is_infinite());
        }
    }

    #[test]
    fn integrable_singularity_and_long_ranges() {
        let opts = QuadOptions::default();
        // ∫_0^1 r^{-2.5} r^2 dr = 2, times 4π.
        let q = RadialProfile::power(-2.5).annulus_integral(0.0, 1.0, 3, &opts).unwrap();
        assert_relative_eq!(q.value, 8.0 * PI, max_relative = 1e-10);
        // ∫_1^{1e6} r^{-4} r^2 dr = 1 - 1e-6.
        let q = RadialProfile::power(-4.0).annulus_integral(1.0, 1e6, 3, &opts).unwrap();
        assert_relative_eq!(q.value, 4.0 * PI * (1.0 - 1e-6), max_relative = 1e-10);
    }

    #[test]
    fn pieces_are_integrated_separately() {
        let opts = QuadOptions::default();
        let p = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, RadialProfile::constant(1.0));
        let q = p.annulus_integral(1.0, 40.0, 3, &opts).unwrap();
        let exact = 4.0 * PI / 3.0 * ((512.0 - 64.0) + (32768.0 - 4096.0));
        assert_relative_eq!(q.value, exact, max_relative = 1e-12);
    }

    #[test]
    fn negative_power_of_zero_piece_diverges() {
        let b = RadialProfile::indicator(1.0, 2.0).pow(-1.0);
        let q = b.annulus_integral(0.5, 1.5, 3, &QuadOptions::default()).unwrap();
        assert!(q.value.is_infinite());
    }
}
