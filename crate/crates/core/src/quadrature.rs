//! Adaptive Gauss–Kronrod quadrature on finite intervals.
//!
//! Panels are bisected greedily by largest error estimate until the global
//! estimate drops below `max(abs_tol, rel_tol * |I|)`. Endpoint power
//! singularities of known order are removed by the substitution
//! `r = a + (b - a) t^κ` before the adaptive loop runs.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Unconverged partial values above this magnitude are reported as
    /// divergent.
    pub divergence_threshold: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_panels: 4000,
            divergence_threshold: 1e30,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadStatus {
    /// The requested tolerance was met.
    Converged,
    /// Panel budget exhausted; the value carries the reported error estimate.
    Approximate,
    /// The integral is `+∞`, detected symbolically.
    Divergent,
    /// The value exceeded the divergence threshold under refinement.
    DivergentHeuristic,
}

impl QuadStatus {
    pub fn is_divergent(self) -> bool {
        matches!(self, QuadStatus::Divergent | QuadStatus::DivergentHeuristic)
    }

    /// Combines the status of two partial integrals that are summed.
    pub fn merge(self, other: QuadStatus) -> QuadStatus {
        use QuadStatus::*;
        match (self, other) {
            (Divergent, _) | (_, Divergent) => Divergent,
            (DivergentHeuristic, _) | (_, DivergentHeuristic) => DivergentHeuristic,
            (Approximate, _) | (_, Approximate) => Approximate,
            _ => Converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub status: QuadStatus,
    pub evaluations: usize,
}

impl Quadrature {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            abs_error: 0.0,
            status: QuadStatus::Converged,
            evaluations: 0,
        }
    }

    pub fn divergent() -> Self {
        Self {
            value: f64::INFINITY,
            abs_error: f64::INFINITY,
            status: QuadStatus::Divergent,
            evaluations: 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && !self.status.is_divergent()
    }

    /// Sum of two integrals over adjacent intervals.
    pub fn add(self, other: Quadrature) -> Quadrature {
        let status = self.status.merge(other.status);
        let value = if status.is_divergent() {
            f64::INFINITY
        } else {
            self.value + other.value
        };
        Quadrature {
            value,
            abs_error: self.abs_error + other.abs_error,
            status,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scale(self, factor: f64) -> Quadrature {
        if self.status.is_divergent() {
            return self;
        }
        Quadrature {
            value: self.value * factor,
            abs_error: self.abs_error * factor.abs(),
            ..self
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
/// Returns `(integral, error estimate)`.
pub fn gauss_kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let x = half * XGK[jtwm1];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !result.is_finite() {
        err = f64::INFINITY;
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Quadrature {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Adaptive integration over `[points[0], points[last]]`, starting from the
/// panels delimited by `points` (which must be nondecreasing).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: &QuadOptions) -> Quadrature {
    if points.len() < 2 {
        return Quadrature::zero();
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error) = gauss_kronrod21(&f, w[0], w[1]);
        evaluations += 21;
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let budget = opts.max_panels.max(heap.len());
    let finish = |value: f64, err: f64, status: QuadStatus, evaluations: usize| Quadrature {
        value,
        abs_error: err,
        status,
        evaluations,
    };
    loop {
        if total.is_nan() {
            return finish(f64::NAN, f64::INFINITY, QuadStatus::Approximate, evaluations);
        }
        if total.is_infinite() {
            return finish(
                f64::INFINITY,
                f64::INFINITY,
                QuadStatus::DivergentHeuristic,
                evaluations,
            );
        }
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return finish(total, total_err, QuadStatus::Converged, evaluations);
        }
        if heap.len() >= budget {
            if total.abs() > opts.divergence_threshold {
                return finish(
                    f64::INFINITY,
                    f64::INFINITY,
                    QuadStatus::DivergentHeuristic,
                    evaluations,
                );
            }
            return finish(total, total_err, QuadStatus::Approximate, evaluations);
        }
        let Some(worst) = heap.pop() else {
            return finish(total, total_err, QuadStatus::Converged, evaluations);
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(Panel { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gauss_kronrod21(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod21(&f, mid, worst.b);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        if heap.len() % 64 == 0 {
            // Refresh sums to stop cancellation drift.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Exponent used by the endpoint substitution for a singularity of order
/// `order` (integrand `~ (r - a)^order`). Capped so `t^κ` stays representable.
fn substitution_power(order: f64) -> f64 {
    if order >= 0.0 {
        1.0
    } else {
        (1.0 / (1.0 + order)).min(20.0)
    }
}

/// Integrates `f` over `[a, b]` when the integrand behaves like
/// `(r - a)^left_order` and `(b - r)^right_order` at the endpoints.
/// Orders `<= -1` give an immediate symbolic divergence.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    left_order: f64,
    right_order: f64,
    opts: &QuadOptions,
) -> Quadrature {
    singular_dyn(&f, a, b, left_order, right_order, opts)
}

fn singular_dyn(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    left_order: f64,
    right_order: f64,
    opts: &QuadOptions,
) -> Quadrature {
    if left_order <= -1.0 || right_order <= -1.0 {
        return Quadrature::divergent();
    }
    let left_singular = left_order < 0.0;
    let right_singular = right_order < 0.0;
    if !left_singular && !right_singular {
        return integrate(f, a, b, opts);
    }
    if left_singular && right_singular {
        let mid = 0.5 * (a + b);
        let lhs = singular_dyn(f, a, mid, left_order, 0.0, opts);
        let rhs = singular_dyn(f, mid, b, 0.0, right_order, opts);
        return lhs.add(rhs);
    }
    let width = b - a;
    if left_singular {
        let kappa = substitution_power(left_order);
        integrate(
            |t: f64| {
                let tk = t.powf(kappa);
                f(a + width * tk) * width * kappa * tk / t
            },
            0.0,
            1.0,
            opts,
        )
    } else {
        let kappa = substitution_power(right_order);
        integrate(
            |t: f64| {
                let tk = t.powf(kappa);
                f(b - width * tk) * width * kappa * tk / t
            },
            0.0,
            1.0,
            opts,
        )
    }
}

/// Runs an integration whose integrand may fail; the first error raised by
/// the integrand is returned instead of the quadrature result.
pub fn try_integrate<F, Q>(f: F, run: Q) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64>,
    Q: FnOnce(&dyn Fn(f64) -> f64) -> Quadrature,
{
    let failure = RefCell::new(None);
    let wrapped = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let result = run(&wrapped);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(result),
    }
}
