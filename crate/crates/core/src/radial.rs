use crate::error::Result;
use crate::profiles::smooth_shell_integral;
use crate::quadrature::{QuadOptions, Quadrature};

/// A scalar function of the radius `r = |x|`.
pub trait RadialFn {
    fn value(&self, r: f64) -> Result<f64>;
}

impl<T: RadialFn + ?Sized> RadialFn for &T {
    fn value(&self, r: f64) -> Result<f64> {
        (**self).value(r)
    }
}

/// Adapter for plain closures.
#[derive(Clone, Copy)]
pub struct FnRadial<F>(pub F);

impl<F: Fn(f64) -> f64> RadialFn for FnRadial<F> {
    fn value(&self, r: f64) -> Result<f64> {
        Ok((self.0)(r))
    }
}

/// The zero function.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl RadialFn for Zero {
    fn value(&self, _r: f64) -> Result<f64> {
        Ok(0.0)
    }
}

/// `ω_{n-1} ∫_lo^hi f(ρ) ρ^{n-1} dρ` for a smooth integrand, with the part
/// beyond `ρ = 1` integrated in `ln ρ`.
pub fn radial_integral<F>(f: F, lo: f64, hi: f64, n: u32, opts: &QuadOptions) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo >= 0.0 && hi.is_finite()) {
        return Err(crate::error::invalid(
            "interval",
            format!("need 0 <= lo and finite hi, got ({lo}, {hi})"),
        ));
    }
    if hi <= lo {
        return Ok(Quadrature::zero());
    }
    if lo < 1.0 && hi > 1.0 {
        let near = smooth_shell_integral(&f, lo, 1.0, n, 0.0, opts)?;
        let far = smooth_shell_integral(&f, 1.0, hi, n, 0.0, opts)?;
        return Ok(near.add(far));
    }
    smooth_shell_integral(&f, lo, hi, n, 0.0, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volume_and_decaying_integrand() {
        let opts = QuadOptions::default();
        let v = radial_integral(|_| Ok(1.0), 0.0, 2.0, 3, &opts).unwrap();
        approx::assert_relative_eq!(v.value, 32.0 * std::f64::consts::PI / 3.0, max_relative = 1e-12);
        // ∫_0^R ρ^2 (1+ρ)^{-4} dρ = R^3 / (3 (1+R)^3).
        let r: f64 = 1e3;
        let q = radial_integral(|p: f64| Ok((1.0 + p).powi(-4)), 0.0, r, 3, &opts).unwrap();
        let exact = 4.0 * std::f64::consts::PI * r.powi(3) / (3.0 * (1.0 + r).powi(3));
        approx::assert_relative_eq!(q.value, exact, max_relative = 1e-10);
    }
}
