//! Reduction of `p`-growth problems to linear growth.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Result of the substitution `v = |u|^p sign u`, which turns growth
/// `|ζ|^p` in the operator into linear growth and the exponent `λ` into
/// `λ / p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTransform {
    pub lambda: f64,
    pub note: String,
    /// Set when the new exponent is not above 1, where the criteria do not apply.
    pub warning: Option<String>,
}

pub fn p_growth_transform(lambda: f64, p: f64) -> Result<GrowthTransform> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid("p", format!("growth exponent must be positive, got {p}")));
    }
    if !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be finite, got {lambda}")));
    }
    let transformed = lambda / p;
    let warning = (transformed <= 1.0).then(|| {
        format!("transformed exponent {transformed} <= 1: outside the range lambda > 1 covered by the criteria")
    });
    Ok(GrowthTransform {
        lambda: transformed,
        note: format!(
            "growth |ζ|^{p} reduces to linear growth via v = |u|^{p} sign u; lambda {lambda} becomes {transformed}"
        ),
        warning,
    })
}
