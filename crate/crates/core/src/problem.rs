use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::profiles::RadialProfile;

fn default_sigma() -> f64 {
    2.0
}

fn default_neighborhood() -> f64 {
    10.0
}

/// Parameters of `Σ (-1)^{|α|} ∂^α a_α(x, u) ≥ b(x)|u|^λ` in `R^n` with an
/// operator of order `m`, together with the radial coefficient data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n: u32,
    pub m: u32,
    /// Polyharmonic order when the operator is `(-1)^k Δ^k`, so `m = 2k`.
    #[serde(default)]
    pub k: Option<u32>,
    pub lambda: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Growth bound `|a_α(x, ζ)| ≤ a(x)|ζ|`.
    pub profile_a: RadialProfile,
    pub profile_b: RadialProfile,
    /// Optional `f` with `b ≥ a^λ f`, for coefficients `a` that may vanish.
    #[serde(default)]
    pub profile_f: Option<RadialProfile>,
    /// Radius beyond which asymptotic lower bounds are checked.
    #[serde(default = "default_neighborhood")]
    pub r0_neighborhood: f64,
}

impl ProblemSpec {
    /// Polyharmonic model `(-1)^k Δ^k u ≥ b |u|^λ` with `a ≡ 1`.
    pub fn polyharmonic(n: u32, k: u32, lambda: f64, profile_b: RadialProfile) -> Self {
        Self {
            n,
            m: 2 * k,
            k: Some(k),
            lambda,
            sigma: default_sigma(),
            profile_a: RadialProfile::constant(1.0),
            profile_b,
            profile_f: None,
            r0_neighborhood: default_neighborhood(),
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_f(mut self, f: RadialProfile) -> Self {
        self.profile_f = Some(f);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "space dimension must be at least 1"));
        }
        if self.m == 0 {
            return Err(invalid("m", "operator order must be at least 1"));
        }
        if let Some(k) = self.k {
            if self.m != 2 * k {
                return Err(invalid("k", format!("m = {} must equal 2k = {}", self.m, 2 * k)));
            }
        }
        if !(self.lambda > 1.0 && self.lambda.is_finite()) {
            return Err(invalid(
                "lambda",
                format!("must satisfy lambda > 1, got {}", self.lambda),
            ));
        }
        if !(self.sigma > 1.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", format!("must satisfy sigma > 1, got {}", self.sigma)));
        }
        if !(self.r0_neighborhood > 0.0 && self.r0_neighborhood.is_finite()) {
            return Err(invalid("r0_neighborhood", "must be positive"));
        }
        self.profile_a.validate_at("profile_a")?;
        self.profile_b.validate_at("profile_b")?;
        if let Some(f) = &self.profile_f {
            f.validate_at("profile_f")?;
        }
        Ok(())
    }

    pub fn profile_f(&self) -> Result<&RadialProfile> {
        self.profile_f.as_ref().ok_or(Error::MissingProfile("profile_f"))
    }

    /// Exponent of `r` in the criterion integrand `r^{(m-n)λ+n-1} q(r)`.
    pub fn integrand_exponent(&self) -> f64 {
        (f64::from(self.m) - f64::from(self.n)) * self.lambda + f64::from(self.n) - 1.0
    }

    /// The borderline power `(n - m)λ - n` of `b` for `a ≡ 1`.
    pub fn critical_power(&self) -> f64 {
        (f64::from(self.n) - f64::from(self.m)) * self.lambda - f64::from(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_json() {
        let spec: ProblemSpec = serde_json::from_str(
            r#"{"n":3,"m":2,"k":1,"lambda":2,
                "profile_a":{"type":"const","value":1},
                "profile_b":{"type":"power","exponent":-1}}"#,
        )
        .unwrap();
        assert_eq!(spec.sigma, 2.0);
        assert_eq!(spec.r0_neighborhood, 10.0);
        spec.validate().unwrap();
        assert_eq!(spec.critical_power(), -1.0);
        assert_eq!(spec.integrand_exponent(), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = ProblemSpec::polyharmonic(3, 1, 2.0, RadialProfile::constant(1.0));
        let mut s = base.clone();
        s.lambda = 1.0;
        assert!(s.validate().is_err());
        let mut s = base.clone();
        s.sigma = 1.0;
        assert!(s.validate().is_err());
        let mut s = base.clone();
        s.m = 3;
        assert!(s.validate().is_err());
        let mut s = base;
        s.profile_b = RadialProfile::constant(-2.0);
        let msg = s.validate().unwrap_err().to_string();
        assert!(msg.contains("profile_b"), "{msg}");
    }
}
