use liouville_core::counterexample::{greens_step, tabulate_seed};
use liouville_core::criterion::{classify_divergence, domination_constant, q_essinf, q_hoelder, LadderOptions, Method};
use liouville_core::proofsim::{doubling_sequence, step_partition, BallFunctional, PiecewiseConstant, StepClass};
use liouville_core::quadrature::QuadOptions;
use liouville_core::special::unit_sphere_area;
use liouville_core::tabulated::LogGrid;
use liouville_core::weakform::{verify_weak, TestFunction};
use liouville_core::{ProblemSpec, RadialProfile, Verdict};
use proptest::prelude::*;

fn power_log(p: f64, q: f64, shift: f64) -> RadialProfile {
    RadialProfile::shifted_power(p, shift).times(RadialProfile::shifted_log_power(q, shift.max(2.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nested_annuli_lower_the_infimum(p in -4.0..3.0f64, q in -2.0..2.0f64, r in 1.0..1e4f64,
                                       s1 in 1.05..3.0f64, extra in 1.0..3.0f64) {
        let b = power_log(p, q, 1.0);
        let small = b.ess_inf_annulus(r, s1).unwrap().value;
        let large = b.ess_inf_annulus(r, s1 * extra).unwrap().value;
        prop_assert!(large <= small * (1.0 + 1e-12));
    }

    #[test]
    fn decreasing_profiles_attain_the_outer_value(p in -5.0..-0.1f64, r in 0.5..1e5f64, s in 1.05..4.0f64) {
        let b = RadialProfile::power(p);
        let inf = b.ess_inf_annulus(r, s).unwrap();
        prop_assert!(inf.exact);
        prop_assert!(((inf.value - b.eval(r * s).unwrap()) / inf.value).abs() < 1e-14);
    }

    #[test]
    fn annulus_integrals_are_additive(p in -3.0..2.0f64, q in -1.5..1.5f64, a in 1.0..10.0f64,
                                      f1 in 1.1..5.0f64, f2 in 1.1..50.0f64, n in 2u32..6) {
        let b = power_log(p, q, 1.0);
        let opts = QuadOptions::default();
        let (m, c) = (a * f1, a * f1 * f2);
        let whole = b.annulus_integral(a, c, n, &opts).unwrap().value;
        let parts = b.annulus_integral(a, m, n, &opts).unwrap().value + b.annulus_integral(m, c, n, &opts).unwrap().value;
        prop_assert!(((whole - parts) / whole).abs() < 1e-9, "{whole} vs {parts}");
    }

    #[test]
    fn power_integrals_match_closed_form(p in -6.0..4.0f64, n in 1u32..7, r1 in 0.01..100.0f64, f in 1.01..1e3f64) {
        let e = p + f64::from(n);
        prop_assume!(e.abs() > 1e-3);
        let r2 = r1 * f;
        let got = RadialProfile::power(p).annulus_integral(r1, r2, n, &QuadOptions::default()).unwrap().value;
        let want = unit_sphere_area(n) * (r2.powf(e) - r1.powf(e)) / e;
        prop_assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn averaged_functional_dominates_the_infimum(p in -4.0..2.0f64, q in -2.0..2.0f64, r in 1.0..1e3f64,
                                                 lambda in 1.2..4.0f64, sigma in 1.2..4.0f64, n in 3u32..6) {
        let mut spec = ProblemSpec::polyharmonic(n, 1, lambda, power_log(p, q, 1.0)).with_sigma(sigma);
        spec.profile_a = RadialProfile::shifted_power(0.3, 1.0);
        let c = domination_constant(n, lambda, sigma);
        let (h, e) = (q_hoelder(&spec, r).unwrap(), q_essinf(&spec, r).unwrap());
        prop_assert!(h >= c * e * (1.0 - 1e-9), "{h} < {c} * {e}");
    }

    #[test]
    fn larger_coefficients_give_larger_q(p in -4.0..2.0f64, bump in 0.0..3.0f64, r in 1.0..1e3f64) {
        let b = RadialProfile::power(p);
        let bigger = RadialProfile::sum(vec![b.clone(), RadialProfile::constant(bump)]);
        let (s, t) = (ProblemSpec::polyharmonic(3, 1, 2.0, b), ProblemSpec::polyharmonic(3, 1, 2.0, bigger));
        prop_assert!(q_essinf(&s, r).unwrap() <= q_essinf(&t, r).unwrap());
        prop_assert!(q_hoelder(&s, r).unwrap() <= q_hoelder(&t, r).unwrap() * (1.0 + 1e-10));
    }

    #[test]
    fn power_weights_scale_with_their_exponent(l in -5.0..3.0f64, r in 1.0..1e3f64, lambda in 1.2..3.0f64) {
        let spec = ProblemSpec::polyharmonic(3, 1, lambda, RadialProfile::power(l));
        let slope = (q_hoelder(&spec, 10.0 * r).unwrap() / q_hoelder(&spec, r).unwrap()).log10();
        prop_assert!((slope - l).abs() < 1e-6, "{slope} vs {l}");
    }

    #[test]
    fn partition_is_exhaustive(values in prop::collection::vec(0.0..1e3f64, 2..40)) {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let labels = step_partition(&sorted);
        prop_assert_eq!(labels.len(), sorted.len() - 1);
        for (w, l) in sorted.windows(2).zip(&labels) {
            prop_assert_eq!(*l == StepClass::Doubling, w[1] >= 2.0 * w[0]);
        }
    }

    #[test]
    fn ball_functional_is_monotone(p in -2.0..1.0f64, q in -2.0..0.0f64, n in 2u32..5,
                                   radii in prop::collection::vec(0.01..1e3f64, 2..8)) {
        let u = RadialProfile::shifted_power(q, 1.0);
        let b = RadialProfile::shifted_power(p, 1.0);
        let j = BallFunctional::new(&u, &b, 2.0, n).unwrap();
        let mut radii = radii;
        radii.sort_by(f64::total_cmp);
        let vals: Vec<f64> = radii.iter().map(|&r| j.eval(r).unwrap()).collect();
        prop_assert!(vals.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)), "{vals:?}");
    }

    #[test]
    fn doubling_sequence_respects_its_bounds(s in 0.3..6.0f64, r1 in 0.1..10.0f64, f in 1.0..40.0f64) {
        let j = |r: f64| Ok(r.powf(s));
        let r2 = r1 * 2f64.powf(1.0 / s) * f;
        let seq = doubling_sequence(j, r1, r2).unwrap();
        prop_assert_eq!(seq[0], r1);
        prop_assert_eq!(*seq.last().unwrap(), r2);
        for w in seq.windows(2) {
            let (a, b) = (w[0].powf(s), w[1].powf(s));
            prop_assert!(b >= 2.0 * a * (1.0 - 1e-9) && b <= 4.0 * a * (1.0 + 1e-9), "{seq:?}");
        }
    }

    #[test]
    fn averaging_ratio_is_homogeneous(levels in prop::collection::vec(0.01..100.0f64, 1..6), c in 0.01..100.0f64) {
        let edges: Vec<f64> = (0..=levels.len()).map(|i| 1.0 + 3.0 * i as f64 / levels.len() as f64).collect();
        let psi = PiecewiseConstant::new(edges, levels).unwrap();
        let scaled = psi.scaled(c);
        let r = psi.power_mean(0.5) / psi.weighted_local_inf(0.5, 1.5);
        let rs = scaled.power_mean(0.5) / scaled.weighted_local_inf(0.5, 1.5);
        prop_assert!(((r - rs) / r).abs() < 1e-12);
    }

    #[test]
    fn test_function_stays_in_unit_interval(r1 in 0.1..100.0f64, f in 1.01..10.0f64, m in 1u32..5, x in 0.0..1.0f64) {
        let t = TestFunction::new(r1, r1 * f, m).unwrap();
        let v = t.value(r1 * f * x * 1.2);
        prop_assert!((0.0..=1.0).contains(&v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn symbolic_verdict_follows_the_borderline(n in 3u32..6, lambda in 1.2..3.5f64, offset in -1.0..1.0f64) {
        let crit = (f64::from(n) - 2.0) * lambda - f64::from(n);
        let spec = ProblemSpec::polyharmonic(n, 1, lambda, RadialProfile::power(crit + offset));
        let report = classify_divergence(&spec, Method::EssInf, &LadderOptions::default()).unwrap();
        let expect = if offset >= 0.0 { Verdict::ForcedTrivial } else { Verdict::NotForced };
        prop_assert_eq!(report.verdict, expect);
    }

    #[test]
    fn green_step_is_linear(alpha in 0.01..100.0f64, nu in -4.0..-1.1f64, n in 3u32..6) {
        let grid = LogGrid::new(1e-3, 1e4, 512).unwrap();
        let w = tabulate_seed(n, nu, 2.0, grid).unwrap();
        let a = greens_step(&w, n).unwrap();
        let b = greens_step(&w.scaled(alpha), n).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((alpha * x - y).abs() <= 1e-12 * y.abs());
        }
    }

    #[test]
    fn enlarging_b_never_repairs_a_violation(scale in 1.0..4.0f64, r1 in 1.0..50.0f64) {
        // u = (1+r^2)^{-1/2} solves -Δu = 3(1+r^2)^{-5/2} in R^3.
        let u = liouville_core::radial::FnRadial(|r: f64| (1.0 + r * r).powf(-0.5));
        let b0 = |r: f64| 3.0 * (1.0 + r * r).powf(-1.5);
        let t = TestFunction::new(r1, 3.0 * r1, 2).unwrap();
        let base = verify_weak(&u, &liouville_core::radial::FnRadial(|r| scale * b0(r)), 2.0, 1, 3, &t, 1e-9).unwrap();
        let more = verify_weak(&u, &liouville_core::radial::FnRadial(|r| 1.5 * scale * b0(r)), 2.0, 1, 3, &t, 1e-9).unwrap();
        prop_assert!(base.verdict || !more.verdict);
        prop_assert!(!more.verdict);
    }
}
