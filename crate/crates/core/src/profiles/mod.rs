//! Radial coefficient profiles: nonnegative functions of `r = |x|` built as
//! expression trees over powers, logarithms and annular pieces.
//!
//! Profiles serialize as tagged JSON objects, for example
//!
//! ```json
//! { "type": "product", "factors": [
//!     { "type": "power", "exponent": -1.0 },
//!     { "type": "log_power", "exponent": -2.0 } ] }
//! ```
//!
//! evaluates to `r^{-1} log^{-2} r` for `r > 1`.

mod analysis;
mod annulus;
mod growth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::RadialFn;
use crate::tabulated::TabulatedRadialFunction;

pub use analysis::{Asymptotic, Monotonicity};
pub use annulus::{smooth_shell_integral, EssBound};
pub use growth::{p_growth_transform, GrowthTransform};

/// One annular piece `inner < r < outer` of a piecewise profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnularPiece {
    pub inner: f64,
    pub outer: f64,
    pub profile: RadialProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    /// Constant `value >= 0`.
    Const {
        value: f64,
    },
    /// `(shift + r)^exponent`.
    Power {
        exponent: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `ln(shift + r)^exponent`, defined where the logarithm is positive.
    LogPower {
        exponent: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `base(r)^exponent`.
    Pow {
        base: Box<RadialProfile>,
        exponent: f64,
    },
    Sum {
        terms: Vec<RadialProfile>,
    },
    /// Product with the convention `0 * ∞ = 0`.
    Product {
        factors: Vec<RadialProfile>,
    },
    /// Sub-profiles on disjoint open shells, zero elsewhere.
    Piecewise {
        pieces: Vec<AnnularPiece>,
    },
    /// `profile` restricted to the shells
    /// `first_inner P^i < r < first_inner P^i W`, `i = 0, 1, ...` (`count`
    /// shells, or infinitely many), with `W = width_ratio` and
    /// `P = period_ratio`; zero elsewhere.
    GeometricAnnular {
        first_inner: f64,
        width_ratio: f64,
        period_ratio: f64,
        #[serde(default)]
        count: Option<usize>,
        profile: Box<RadialProfile>,
    },
    Tabulated {
        table: TabulatedRadialFunction,
    },
}

impl RadialProfile {
    pub fn constant(value: f64) -> Self {
        Self::Const { value }
    }

    pub fn zero() -> Self {
        Self::Const { value: 0.0 }
    }

    pub fn power(exponent: f64) -> Self {
        Self::Power { exponent, shift: 0.0 }
    }

    pub fn shifted_power(exponent: f64, shift: f64) -> Self {
        Self::Power { exponent, shift }
    }

    pub fn log_power(exponent: f64) -> Self {
        Self::LogPower { exponent, shift: 0.0 }
    }

    pub fn shifted_log_power(exponent: f64, shift: f64) -> Self {
        Self::LogPower { exponent, shift }
    }

    pub fn pow(self, exponent: f64) -> Self {
        Self::Pow {
            base: Box::new(self),
            exponent,
        }
    }

    pub fn sum(terms: Vec<RadialProfile>) -> Self {
        Self::Sum { terms }
    }

    pub fn product(factors: Vec<RadialProfile>) -> Self {
        Self::Product { factors }
    }

    pub fn times(self, other: RadialProfile) -> Self {
        Self::product(vec![self, other])
    }

    /// `r^power log^log_power r`, dropping trivial factors.
    pub fn power_log(power: f64, log_power: f64) -> Self {
        match (power == 0.0, log_power == 0.0) {
            (true, true) => Self::constant(1.0),
            (false, true) => Self::power(power),
            (true, false) => Self::log_power(log_power),
            (false, false) => Self::power(power).times(Self::log_power(log_power)),
        }
    }

    /// Indicator of the shell `inner < r < outer`.
    pub fn indicator(inner: f64, outer: f64) -> Self {
        Self::Piecewise {
            pieces: vec![AnnularPiece {
                inner,
                outer,
                profile: Self::constant(1.0),
            }],
        }
    }

    pub fn geometric_annular(
        first_inner: f64,
        width_ratio: f64,
        period_ratio: f64,
        count: Option<usize>,
        profile: RadialProfile,
    ) -> Self {
        Self::GeometricAnnular {
            first_inner,
            width_ratio,
            period_ratio,
            count,
            profile: Box::new(profile),
        }
    }

    pub fn tabulated(table: TabulatedRadialFunction) -> Self {
        Self::Tabulated { table }
    }

    /// Infimum of the domain; the profile is defined for `r > domain_lower()`
    /// (and at `r = 0` when the value there is meaningful).
    pub fn domain_lower(&self) -> f64 {
        match self {
            Self::Const { .. } | Self::Power { .. } => 0.0,
            Self::LogPower { exponent, shift } => {
                if *exponent == 0.0 {
                    0.0
                } else {
                    (1.0 - shift).max(0.0)
                }
            }
            Self::Pow { base, .. } => base.domain_lower(),
            Self::Sum { terms } => terms.iter().map(Self::domain_lower).fold(0.0, f64::max),
            Self::Product { factors } => factors.iter().map(Self::domain_lower).fold(0.0, f64::max),
            Self::Piecewise { .. } | Self::GeometricAnnular { .. } => 0.0,
            Self::Tabulated { table } => match table.head {
                crate::tabulated::HeadModel::None => table.grid.r_lo,
                crate::tabulated::HeadModel::Even { .. } => 0.0,
            },
        }
    }

    /// Value at `r`, in `[0, +∞]`. Infinite values occur only at isolated
    /// singular points (for instance `r^{-1}` at the origin).
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain {
                r,
                lower: self.domain_lower(),
            });
        }
        let lower = self.domain_lower();
        if r < lower {
            return Err(Error::Domain { r, lower });
        }
        self.eval_unchecked(r)
    }

    fn eval_unchecked(&self, r: f64) -> Result<f64> {
        match self {
            Self::Const { value } => Ok(*value),
            Self::Power { exponent, shift } => {
                if *exponent == 0.0 {
                    Ok(1.0)
                } else {
                    Ok((shift + r).powf(*exponent))
                }
            }
            Self::LogPower { exponent, shift } => {
                if *exponent == 0.0 {
                    return Ok(1.0);
                }
                let l = (shift + r).ln();
                if l < 0.0 {
                    return Err(Error::Domain {
                        r,
                        lower: (1.0 - shift).max(0.0),
                    });
                }
                Ok(l.powf(*exponent))
            }
            Self::Pow { base, exponent } => {
                if *exponent == 0.0 {
                    return Ok(1.0);
                }
                Ok(base.eval_unchecked(r)?.powf(*exponent))
            }
            Self::Sum { terms } => {
                let mut total = 0.0;
                for t in terms {
                    total += t.eval_unchecked(r)?;
                }
                Ok(total)
            }
            Self::Product { factors } => {
                let mut total = 1.0;
                let mut zero = false;
                for f in factors {
                    let v = f.eval_unchecked(r)?;
                    if v == 0.0 {
                        zero = true;
                    }
                    total *= v;
                }
                Ok(if zero { 0.0 } else { total })
            }
            Self::Piecewise { pieces } => {
                for p in pieces {
                    if r > p.inner && r < p.outer {
                        return p.profile.eval(r);
                    }
                }
                Ok(0.0)
            }
            Self::GeometricAnnular { profile, .. } => {
                if self.window_index(r).is_some() {
                    profile.eval(r)
                } else {
                    Ok(0.0)
                }
            }
            Self::Tabulated { table } => table.eval(r),
        }
    }

    /// Index of the shell of a geometric profile that contains `r`.
    fn window_index(&self, r: f64) -> Option<usize> {
        let Self::GeometricAnnular {
            first_inner,
            width_ratio,
            period_ratio,
            count,
            ..
        } = self
        else {
            return None;
        };
        if r <= *first_inner {
            return None;
        }
        let approx = ((r / first_inner).ln() / period_ratio.ln()).floor();
        // Rounding can put `approx` one off near shell edges.
        for i in [approx - 1.0, approx, approx + 1.0] {
            if i < 0.0 || count.is_some_and(|c| i >= c as f64) {
                continue;
            }
            let inner = first_inner * period_ratio.powf(i);
            if r > inner && r < inner * width_ratio {
                return Some(i as usize);
            }
        }
        None
    }

    /// Checks the structural invariants; errors name the offending node.
    pub fn validate(&self) -> Result<()> {
        self.validate_at("profile")
    }

    pub fn validate_at(&self, path: &str) -> Result<()> {
        let fail = |what: String| Err(Error::InvalidProfile(format!("{path}: {what}")));
        let finite = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidProfile(format!("{path}.{name}: must be finite, got {v}")))
            }
        };
        match self {
            Self::Const { value } => {
                finite("value", *value)?;
                if *value < 0.0 {
                    return fail(format!("constant must be nonnegative, got {value}"));
                }
            }
            Self::Power { exponent, shift } | Self::LogPower { exponent, shift } => {
                finite("exponent", *exponent)?;
                finite("shift", *shift)?;
                if *shift < 0.0 {
                    return fail(format!("shift must be nonnegative, got {shift}"));
                }
            }
            Self::Pow { base, exponent } => {
                finite("exponent", *exponent)?;
                base.validate_at(&format!("{path}.base"))?;
            }
            Self::Sum { terms } => {
                if terms.is_empty() {
                    return fail("sum needs at least one term".into());
                }
                for (i, t) in terms.iter().enumerate() {
                    t.validate_at(&format!("{path}.terms[{i}]"))?;
                }
            }
            Self::Product { factors } => {
                if factors.is_empty() {
                    return fail("product needs at least one factor".into());
                }
                for (i, f) in factors.iter().enumerate() {
                    f.validate_at(&format!("{path}.factors[{i}]"))?;
                }
            }
            Self::Piecewise { pieces } => {
                for (i, p) in pieces.iter().enumerate() {
                    let here = format!("{path}.pieces[{i}]");
                    if !(p.inner >= 0.0 && p.outer > p.inner && p.outer.is_finite()) {
                        return Err(Error::InvalidProfile(format!(
                            "{here}: need 0 <= inner < outer < ∞, got ({}, {})",
                            p.inner, p.outer
                        )));
                    }
                    if p.profile.domain_lower() > p.inner {
                        return Err(Error::InvalidProfile(format!(
                            "{here}: sub-profile is undefined below r = {}",
                            p.profile.domain_lower()
                        )));
                    }
                    p.profile.validate_at(&format!("{here}.profile"))?;
                }
                let mut sorted: Vec<_> = pieces.iter().map(|p| (p.inner, p.outer)).collect();
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
                for w in sorted.windows(2) {
                    if w[1].0 < w[0].1 {
                        return fail(format!(
                            "pieces ({}, {}) and ({}, {}) overlap",
                            w[0].0, w[0].1, w[1].0, w[1].1
                        ));
                    }
                }
            }
            Self::GeometricAnnular {
                first_inner,
                width_ratio,
                period_ratio,
                count,
                profile,
            } => {
                finite("first_inner", *first_inner)?;
                finite("width_ratio", *width_ratio)?;
                finite("period_ratio", *period_ratio)?;
                if *first_inner <= 0.0 {
                    return fail(format!("first_inner must be positive, got {first_inner}"));
                }
                if *width_ratio <= 1.0 {
                    return fail(format!("width_ratio must exceed 1, got {width_ratio}"));
                }
                if period_ratio < width_ratio {
                    return fail(format!(
                        "period_ratio {period_ratio} below width_ratio {width_ratio}: shells overlap"
                    ));
                }
                if *count == Some(0) {
                    return fail("count must be positive when given".into());
                }
                if profile.domain_lower() > *first_inner {
                    return fail(format!("sub-profile is undefined below r = {}", profile.domain_lower()));
                }
                profile.validate_at(&format!("{path}.profile"))?;
            }
            Self::Tabulated { table } => {
                table
                    .validate()
                    .map_err(|e| Error::InvalidProfile(format!("{path}.table: {e}")))?;
                if table.values.iter().any(|&v| v < 0.0) {
                    return fail("tabulated profile has negative values".into());
                }
            }
        }
        Ok(())
    }
}

impl RadialFn for RadialProfile {
    fn value(&self, r: f64) -> Result<f64> {
        self.eval(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shifted_power_at_origin() {
        let p = RadialProfile::shifted_power(-3.0, 2.0);
        assert_eq!(p.eval(0.0).unwrap(), 0.125);
    }

    #[test]
    fn indicator_of_first_dyadic_shell() {
        let p = RadialProfile::indicator(4.0, 8.0);
        assert_eq!(p.eval(5.0).unwrap(), 1.0);
        assert_eq!(p.eval(9.0).unwrap(), 0.0);
        assert_eq!(p.eval(4.0).unwrap(), 0.0);
    }

    #[test]
    fn sum_is_linear() {
        let p = RadialProfile::sum(vec![RadialProfile::constant(1.0), RadialProfile::power(1.0)]);
        assert_eq!(p.eval(2.0).unwrap(), 3.0);
    }

    #[test]
    fn log_power_domain_is_enforced() {
        let p = RadialProfile::log_power(-2.0);
        assert!(matches!(p.eval(0.5), Err(Error::Domain { .. })));
        assert_eq!(p.domain_lower(), 1.0);
        assert_relative_eq!(p.eval(std::f64::consts::E).unwrap(), 1.0);
        let shifted = RadialProfile::shifted_log_power(1.0, 2.0);
        assert_eq!(shifted.domain_lower(), 0.0);
        assert_relative_eq!(shifted.eval(std::f64::consts::E - 2.0).unwrap(), 1.0);
    }

    #[test]
    fn product_treats_zero_times_infinity_as_zero() {
        let p = RadialProfile::power(-1.0).times(RadialProfile::power(1.0).pow(2.0));
        assert_eq!(p.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn geometric_shells() {
        let p = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, RadialProfile::constant(1.0));
        for (r, v) in [
            (5.0, 1.0),
            (9.0, 0.0),
            (17.0, 1.0),
            (31.9, 1.0),
            (33.0, 0.0),
            (4096.5, 1.0),
            (3.0, 0.0),
        ] {
            assert_eq!(p.eval(r).unwrap(), v, "r = {r}");
        }
        let finite = RadialProfile::geometric_annular(4.0, 2.0, 4.0, Some(2), RadialProfile::constant(1.0));
        assert_eq!(finite.eval(17.0).unwrap(), 1.0);
        assert_eq!(finite.eval(65.0).unwrap(), 0.0);
    }

    #[test]
    fn validation_names_the_node() {
        let bad = RadialProfile::product(vec![
            RadialProfile::constant(1.0),
            RadialProfile::Piecewise {
                pieces: vec![
                    AnnularPiece {
                        inner: 1.0,
                        outer: 3.0,
                        profile: RadialProfile::constant(1.0),
                    },
                    AnnularPiece {
                        inner: 2.0,
                        outer: 4.0,
                        profile: RadialProfile::constant(1.0),
                    },
                ],
            },
        ]);
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("profile.factors[1]"), "{msg}");
        assert!(RadialProfile::constant(-1.0).validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, RadialProfile::power_log(-1.0, -1.0));
        let text = serde_json::to_string(&p).unwrap();
        let back: RadialProfile = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
        let parsed: RadialProfile = serde_json::from_str(r#"{"type":"power","exponent":-3,"shift":2}"#).unwrap();
        assert_eq!(parsed, RadialProfile::shifted_power(-3.0, 2.0));
        assert!(serde_json::from_str::<RadialProfile>(r#"{"type":"powr","exponent":1}"#).is_err());
    }
}
