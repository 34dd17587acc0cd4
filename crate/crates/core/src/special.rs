//! Special functions needed for radial integration.

use std::f64::consts::PI;

/// Gamma function at `n / 2` for a positive integer `n`.
///
/// Uses the recursion `Γ(x + 1) = x Γ(x)` from `Γ(1) = 1` and `Γ(1/2) = √π`,
/// which is exact up to rounding for the small dimensions used here.
pub fn gamma_half_integer(n: u32) -> f64 {
    assert!(n > 0, "gamma_half_integer needs n >= 1");
    let (mut x, mut value) = if n % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = f64::from(n) / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`.
pub fn unit_sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(f64::from(n) / 2.0) / gamma_half_integer(n)
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: u32) -> f64 {
    unit_sphere_area(n) / f64::from(n)
}

/// Volume of the shell `{ lo < |x| < hi }` in `R^n`.
pub fn shell_volume(n: u32, lo: f64, hi: f64) -> f64 {
    let d = i32::try_from(n).unwrap_or(i32::MAX);
    unit_ball_volume(n) * (hi.powi(d) - lo.powi(d))
}

/// `∫_x^∞ t^{a-1} e^{-t} dt` for `a > 0`, `x >= 0`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> f64 {
    statrs::function::gamma::gamma_ur(a, x) * statrs::function::gamma::gamma(a)
}

/// `∫_R^∞ ρ^p (ln ρ)^q dρ` for `R > 1` and `p < -1`.
///
/// With `s = ln ρ` and `μ = -(p + 1)` this is `μ^{-(q+1)} Γ(q + 1, μ ln R)`.
/// For `q <= -1` the incomplete gamma has a nonpositive first argument and
/// the integral in `s` is evaluated by quadrature instead.
pub fn power_log_tail(p: f64, q: f64, r: f64) -> f64 {
    debug_assert!(p < -1.0 && r > 1.0);
    let mu = -(p + 1.0);
    let s0 = r.ln();
    if q > -1.0 {
        return mu.powf(-(q + 1.0)) * upper_incomplete_gamma(q + 1.0, mu * s0);
    }
    // e^{-μ s} s^q beyond s0 + 60/μ is below e^{-60} of the leading value.
    let opts = crate::quadrature::QuadOptions::default().with_rel_tol(1e-12);
    let scale = (-mu * s0).exp() * s0.powf(q);
    let g = |s: f64| (-mu * (s - s0)).exp() * (s / s0).powf(q);
    let span = 60.0 / mu;
    let points: Vec<f64> = (0..=12).map(|i| s0 + span * f64::from(i) / 12.0).collect();
    scale * crate::quadrature::integrate_with_breaks(g, &points, &opts).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tail_fallback_for_strongly_negative_log_power() {
        // ∫_R^∞ ρ^{-2} (ln ρ)^{-2} dρ against direct quadrature in ln ρ.
        let r: f64 = 10.0;
        let direct = crate::quadrature::integrate(
            |s: f64| (-s).exp() * s.powi(-2),
            r.ln(),
            r.ln() + 80.0,
            &crate::quadrature::QuadOptions::default().with_rel_tol(1e-13),
        );
        assert_relative_eq!(power_log_tail(-2.0, -2.0, r), direct.value, max_relative = 1e-10);
        // Continuity across q = -1.
        let a = power_log_tail(-3.0, -0.999_999, 5.0);
        let b = power_log_tail(-3.0, -1.0, 5.0);
        assert_relative_eq!(a, b, max_relative = 1e-5);
    }

    #[test]
    fn sphere_areas_match_known_values() {
        assert_relative_eq!(unit_sphere_area(1), 2.0, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(4), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(5), 8.0 * PI * PI / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn ball_volume_in_three_dimensions() {
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(shell_volume(3, 1.0, 2.0), 4.0 * PI * 7.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn power_log_tail_integer_case() {
        // ∫_R^∞ ρ^{-2} ln ρ dρ = (ln R + 1) / R
        let r: f64 = 1.0e5;
        assert_relative_eq!(power_log_tail(-2.0, 1.0, r), (r.ln() + 1.0) / r, max_relative = 1e-12);
        // q = 0 reduces to R^{p+1} / -(p+1)
        assert_relative_eq!(power_log_tail(-3.0, 0.0, 10.0), 0.5e-2, max_relative = 1e-12);
    }
}
