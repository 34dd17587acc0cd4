//! Structural analysis of profiles: breakpoints, local resolution of
//! piecewise nodes, monotonicity, endpoint orders and behavior at infinity.

use serde::{Deserialize, Serialize};

use super::RadialProfile;

/// Monotonicity of a profile on an interval (in the non-strict sense).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Constant,
    Nondecreasing,
    Nonincreasing,
    Unknown,
}

impl Monotonicity {
    fn from_exponent(e: f64) -> Self {
        if e > 0.0 {
            Self::Nondecreasing
        } else if e < 0.0 {
            Self::Nonincreasing
        } else {
            Self::Constant
        }
    }

    fn flip(self) -> Self {
        match self {
            Self::Nondecreasing => Self::Nonincreasing,
            Self::Nonincreasing => Self::Nondecreasing,
            other => other,
        }
    }

    /// Monotonicity of a sum, or of a product of nonnegative factors.
    fn combine(self, other: Self) -> Self {
        use Monotonicity::*;
        match (self, other) {
            (Constant, x) | (x, Constant) => x,
            (Nondecreasing, Nondecreasing) => Nondecreasing,
            (Nonincreasing, Nonincreasing) => Nonincreasing,
            _ => Unknown,
        }
    }
}

/// Leading behavior as `r → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Asymptotic {
    /// Vanishes identically beyond some radius.
    Zero,
    /// Comparable to `r^power log^log_power r`.
    PowerLog {
        power: f64,
        log_power: f64,
    },
    /// Comparable to `r^power log^log_power r` on the shells
    /// `(first_inner P^i, first_inner P^i W)` and zero between them.
    Windowed {
        first_inner: f64,
        width_ratio: f64,
        period_ratio: f64,
        power: f64,
        log_power: f64,
    },
    Unknown,
}

impl Asymptotic {
    pub fn pow(self, e: f64) -> Self {
        if e == 0.0 {
            return Self::PowerLog {
                power: 0.0,
                log_power: 0.0,
            };
        }
        match self {
            Self::Zero if e > 0.0 => Self::Zero,
            Self::PowerLog { power, log_power } => Self::PowerLog {
                power: power * e,
                log_power: log_power * e,
            },
            Self::Windowed {
                first_inner,
                width_ratio,
                period_ratio,
                power,
                log_power,
            } if e > 0.0 => Self::Windowed {
                first_inner,
                width_ratio,
                period_ratio,
                power: power * e,
                log_power: log_power * e,
            },
            _ => Self::Unknown,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        use Asymptotic::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Zero, _) | (_, Zero) => Zero,
            (
                PowerLog {
                    power: p1,
                    log_power: q1,
                },
                PowerLog {
                    power: p2,
                    log_power: q2,
                },
            ) => PowerLog {
                power: p1 + p2,
                log_power: q1 + q2,
            },
            (
                PowerLog {
                    power: p1,
                    log_power: q1,
                },
                Windowed {
                    first_inner,
                    width_ratio,
                    period_ratio,
                    power,
                    log_power,
                },
            )
            | (
                Windowed {
                    first_inner,
                    width_ratio,
                    period_ratio,
                    power,
                    log_power,
                },
                PowerLog {
                    power: p1,
                    log_power: q1,
                },
            ) => Windowed {
                first_inner,
                width_ratio,
                period_ratio,
                power: power + p1,
                log_power: log_power + q1,
            },
            (a @ Windowed { .. }, b @ Windowed { .. }) if a.same_windows(&b) => {
                let (
                    Windowed {
                        power: p1,
                        log_power: q1,
                        ..
                    },
                    Windowed {
                        power: p2,
                        log_power: q2,
                        ..
                    },
                ) = (a, b)
                else {
                    unreachable!()
                };
                a.with_exponents(p1 + p2, q1 + q2)
            }
            _ => Unknown,
        }
    }

    pub fn add(self, other: Self) -> Self {
        use Asymptotic::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Zero, x) | (x, Zero) => x,
            (
                PowerLog {
                    power: p1,
                    log_power: q1,
                },
                PowerLog {
                    power: p2,
                    log_power: q2,
                },
            ) => {
                let (power, log_power) = dominant((p1, q1), (p2, q2));
                PowerLog { power, log_power }
            }
            (a @ Windowed { .. }, b @ Windowed { .. }) if a.same_windows(&b) => {
                let (
                    Windowed {
                        power: p1,
                        log_power: q1,
                        ..
                    },
                    Windowed {
                        power: p2,
                        log_power: q2,
                        ..
                    },
                ) = (a, b)
                else {
                    unreachable!()
                };
                let (p, q) = dominant((p1, q1), (p2, q2));
                a.with_exponents(p, q)
            }
            _ => Unknown,
        }
    }

    fn same_windows(&self, other: &Self) -> bool {
        match (self, other) {
            (
                Self::Windowed {
                    first_inner: a1,
                    width_ratio: w1,
                    period_ratio: p1,
                    ..
                },
                Self::Windowed {
                    first_inner: a2,
                    width_ratio: w2,
                    period_ratio: p2,
                    ..
                },
            ) => a1 == a2 && w1 == w2 && p1 == p2,
            _ => false,
        }
    }

    fn with_exponents(self, power: f64, log_power: f64) -> Self {
        match self {
            Self::Windowed {
                first_inner,
                width_ratio,
                period_ratio,
                ..
            } => Self::Windowed {
                first_inner,
                width_ratio,
                period_ratio,
                power,
                log_power,
            },
            _ => Self::PowerLog { power, log_power },
        }
    }
}

fn dominant(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    if a.0 > b.0 || (a.0 == b.0 && a.1 >= b.1) {
        a
    } else {
        b
    }
}

impl RadialProfile {
    /// Radii in the open interval `(lo, hi)` where the profile may jump or
    /// change its closed-form expression, sorted and deduplicated.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(lo, hi, &mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        let mut push = |r: f64| {
            if r > lo && r < hi {
                out.push(r);
            }
        };
        match self {
            Self::Const { .. } | Self::Power { .. } | Self::LogPower { .. } => {}
            Self::Pow { base, .. } => base.collect_breakpoints(lo, hi, out),
            Self::Sum { terms: items } | Self::Product { factors: items } => {
                for item in items {
                    item.collect_breakpoints(lo, hi, out);
                }
            }
            Self::Piecewise { pieces } => {
                for p in pieces {
                    push(p.inner);
                    push(p.outer);
                }
                for p in pieces {
                    p.profile.collect_breakpoints(lo.max(p.inner), hi.min(p.outer), out);
                }
            }
            Self::GeometricAnnular {
                first_inner,
                width_ratio,
                period_ratio,
                count,
                profile,
            } => {
                if hi <= *first_inner {
                    return;
                }
                let start = ((lo.max(*first_inner) / first_inner).ln() / period_ratio.ln()).floor() - 1.0;
                let stop = ((hi / first_inner).ln() / period_ratio.ln()).ceil() + 1.0;
                let mut i = start.max(0.0);
                let mut edges = Vec::new();
                while i <= stop && count.map_or(true, |c| i < c as f64) {
                    let inner = first_inner * period_ratio.powf(i);
                    edges.push((inner, inner * width_ratio));
                    i += 1.0;
                }
                for &(a, b) in &edges {
                    push(a);
                    push(b);
                }
                for (a, b) in edges {
                    profile.collect_breakpoints(lo.max(a), hi.min(b), out);
                }
            }
            Self::Tabulated { table } => {
                push(table.grid.r_lo);
                push(table.grid.r_hi);
            }
        }
    }

    /// Closed-form profile that agrees with `self` on `(lo, hi)`, assuming no
    /// breakpoint lies strictly inside the interval.
    pub fn resolve(&self, lo: f64, hi: f64) -> RadialProfile {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        match self {
            Self::Const { .. } | Self::Power { .. } | Self::LogPower { .. } | Self::Tabulated { .. } => self.clone(),
            Self::Pow { base, exponent } => base.resolve(lo, hi).pow(*exponent),
            Self::Sum { terms } => Self::sum(terms.iter().map(|t| t.resolve(lo, hi)).collect()),
            Self::Product { factors } => Self::product(factors.iter().map(|f| f.resolve(lo, hi)).collect()),
            Self::Piecewise { pieces } => pieces
                .iter()
                .find(|p| mid > p.inner && mid < p.outer)
                .map_or_else(Self::zero, |p| p.profile.resolve(lo, hi)),
            Self::GeometricAnnular { profile, .. } => {
                if self.window_index(mid).is_some() {
                    profile.resolve(lo, hi)
                } else {
                    Self::zero()
                }
            }
        }
    }

    /// True when the profile is zero everywhere on its domain.
    pub fn is_identically_zero(&self) -> bool {
        match self {
            Self::Const { value } => *value == 0.0,
            Self::Power { .. } | Self::LogPower { .. } => false,
            Self::Pow { base, exponent } => *exponent > 0.0 && base.is_identically_zero(),
            Self::Sum { terms } => terms.iter().all(Self::is_identically_zero),
            Self::Product { factors } => factors.iter().any(Self::is_identically_zero),
            Self::Piecewise { pieces } => pieces.iter().all(|p| p.profile.is_identically_zero()),
            Self::GeometricAnnular { profile, .. } => profile.is_identically_zero(),
            Self::Tabulated { table } => {
                table.values.iter().all(|&v| v == 0.0) && table.tail.map_or(true, |t| t.coefficient == 0.0)
            }
        }
    }

    /// True when the profile is `+∞` everywhere (e.g. a negative power of
    /// the zero function).
    pub fn is_identically_infinite(&self) -> bool {
        match self {
            Self::Pow { base, exponent } => {
                (*exponent < 0.0 && base.is_identically_zero()) || (*exponent > 0.0 && base.is_identically_infinite())
            }
            Self::Sum { terms } => terms.iter().any(Self::is_identically_infinite),
            Self::Product { factors } => {
                !factors.iter().any(Self::is_identically_zero) && factors.iter().any(Self::is_identically_infinite)
            }
            _ => false,
        }
    }

    /// Monotonicity on `(lo, hi)`, inferred from the expression tree.
    pub fn monotonicity_on(&self, lo: f64, hi: f64) -> Monotonicity {
        if !self.breakpoints(lo, hi).is_empty() {
            return Monotonicity::Unknown;
        }
        self.resolve(lo, hi).closed_form_monotonicity()
    }

    pub(crate) fn closed_form_monotonicity(&self) -> Monotonicity {
        if self.is_identically_zero() {
            return Monotonicity::Constant;
        }
        match self {
            Self::Const { .. } => Monotonicity::Constant,
            Self::Power { exponent, .. } | Self::LogPower { exponent, .. } => Monotonicity::from_exponent(*exponent),
            Self::Pow { base, exponent } => {
                let m = base.closed_form_monotonicity();
                if *exponent > 0.0 {
                    m
                } else if *exponent < 0.0 {
                    m.flip()
                } else {
                    Monotonicity::Constant
                }
            }
            Self::Sum { terms: items } | Self::Product { factors: items } => items
                .iter()
                .map(Self::closed_form_monotonicity)
                .fold(Monotonicity::Constant, Monotonicity::combine),
            Self::Piecewise { .. } | Self::GeometricAnnular { .. } | Self::Tabulated { .. } => Monotonicity::Unknown,
        }
    }

    /// Exponent `β` with `p(ρ) ≍ (ρ - r)^β` as `ρ → r+`, for a resolved
    /// closed-form profile. Regular points give 0, identically zero
    /// profiles give `+∞`.
    pub fn endpoint_order(&self, r: f64) -> f64 {
        if self.is_identically_zero() {
            return f64::INFINITY;
        }
        match self {
            Self::Const { .. } | Self::Tabulated { .. } => 0.0,
            Self::Power { exponent, shift } => {
                if shift + r == 0.0 {
                    *exponent
                } else {
                    0.0
                }
            }
            Self::LogPower { exponent, shift } => {
                if *exponent != 0.0 && (shift + r) == 1.0 {
                    *exponent
                } else {
                    0.0
                }
            }
            Self::Pow { base, exponent } => exponent * base.endpoint_order(r),
            Self::Sum { terms } => terms.iter().map(|t| t.endpoint_order(r)).fold(f64::INFINITY, f64::min),
            Self::Product { factors } => factors.iter().map(|f| f.endpoint_order(r)).sum(),
            Self::Piecewise { .. } | Self::GeometricAnnular { .. } => 0.0,
        }
    }

    /// Leading behavior as `r → ∞`.
    pub fn asymptotic(&self) -> Asymptotic {
        if self.is_identically_zero() {
            return Asymptotic::Zero;
        }
        match self {
            Self::Const { .. } => Asymptotic::PowerLog {
                power: 0.0,
                log_power: 0.0,
            },
            Self::Power { exponent, .. } => Asymptotic::PowerLog {
                power: *exponent,
                log_power: 0.0,
            },
            Self::LogPower { exponent, .. } => Asymptotic::PowerLog {
                power: 0.0,
                log_power: *exponent,
            },
            Self::Pow { base, exponent } => base.asymptotic().pow(*exponent),
            Self::Sum { terms } => terms
                .iter()
                .map(Self::asymptotic)
                .fold(Asymptotic::Zero, Asymptotic::add),
            Self::Product { factors } => factors.iter().map(Self::asymptotic).fold(
                Asymptotic::PowerLog {
                    power: 0.0,
                    log_power: 0.0,
                },
                Asymptotic::mul,
            ),
            Self::Piecewise { .. } => Asymptotic::Zero,
            Self::GeometricAnnular {
                first_inner,
                width_ratio,
                period_ratio,
                count,
                profile,
            } => {
                if count.is_some() {
                    return Asymptotic::Zero;
                }
                match profile.asymptotic() {
                    Asymptotic::Zero => Asymptotic::Zero,
                    Asymptotic::PowerLog { power, log_power } => Asymptotic::Windowed {
                        first_inner: *first_inner,
                        width_ratio: *width_ratio,
                        period_ratio: *period_ratio,
                        power,
                        log_power,
                    },
                    _ => Asymptotic::Unknown,
                }
            }
            Self::Tabulated { table } => match table.tail {
                Some(t) if t.coefficient > 0.0 => Asymptotic::PowerLog {
                    power: t.power,
                    log_power: t.log_power,
                },
                Some(t) if t.coefficient == 0.0 => Asymptotic::Zero,
                _ => Asymptotic::Unknown,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakpoints_of_nested_pieces() {
        let p = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, RadialProfile::constant(1.0))
            .times(RadialProfile::indicator(1.0, 100.0));
        assert_eq!(p.breakpoints(0.0, 50.0), vec![1.0, 4.0, 8.0, 16.0, 32.0]);
        assert_eq!(p.breakpoints(5.0, 7.0), Vec::<f64>::new());
    }

    #[test]
    fn resolve_picks_active_piece() {
        let p = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, RadialProfile::power(-1.0));
        assert_eq!(p.resolve(17.0, 20.0), RadialProfile::power(-1.0));
        assert!(p.resolve(9.0, 15.0).is_identically_zero());
    }

    #[test]
    fn inferred_monotonicity() {
        use Monotonicity::*;
        assert_eq!(RadialProfile::power(-1.0).monotonicity_on(1.0, 2.0), Nonincreasing);
        assert_eq!(
            RadialProfile::power(2.0).pow(-0.5).monotonicity_on(1.0, 2.0),
            Nonincreasing
        );
        let mixed = RadialProfile::power(-1.0).times(RadialProfile::log_power(3.0));
        assert_eq!(mixed.monotonicity_on(2.0, 3.0), Unknown);
        let both = RadialProfile::power(1.0).times(RadialProfile::log_power(3.0));
        assert_eq!(both.monotonicity_on(2.0, 3.0), Nondecreasing);
        assert_eq!(RadialProfile::indicator(1.0, 2.0).monotonicity_on(0.5, 3.0), Unknown);
        assert_eq!(RadialProfile::indicator(1.0, 2.0).monotonicity_on(1.2, 1.5), Constant);
    }

    #[test]
    fn endpoint_orders() {
        assert_eq!(RadialProfile::power(-3.0).endpoint_order(0.0), -3.0);
        assert_eq!(RadialProfile::power(-3.0).endpoint_order(1.0), 0.0);
        assert_eq!(RadialProfile::log_power(-0.5).endpoint_order(1.0), -0.5);
        let p = RadialProfile::power(2.0).times(RadialProfile::power(-1.0).pow(3.0));
        assert_eq!(p.endpoint_order(0.0), -1.0);
    }

    #[test]
    fn asymptotic_classes() {
        let b = RadialProfile::shifted_power(-3.0, 2.0).times(RadialProfile::shifted_log_power(1.0, 2.0));
        assert_eq!(
            b.asymptotic(),
            Asymptotic::PowerLog {
                power: -3.0,
                log_power: 1.0
            }
        );
        let sum = RadialProfile::sum(vec![
            RadialProfile::power(-2.0),
            RadialProfile::power(-1.0).times(RadialProfile::log_power(-5.0)),
        ]);
        assert_eq!(
            sum.asymptotic(),
            Asymptotic::PowerLog {
                power: -1.0,
                log_power: -5.0
            }
        );
        let dyadic = RadialProfile::geometric_annular(4.0, 2.0, 4.0, None, RadialProfile::power(-1.0));
        assert!(matches!(dyadic.asymptotic().pow(-2.0), Asymptotic::Unknown));
        assert!(matches!(
            dyadic.asymptotic().mul(RadialProfile::constant(2.0).asymptotic().pow(-2.0)),
            Asymptotic::Windowed { power, .. } if power == -1.0
        ));
        assert_eq!(RadialProfile::indicator(1.0, 2.0).asymptotic(), Asymptotic::Zero);
    }
}
