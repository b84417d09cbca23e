use std::f64::consts::{FRAC_PI_2, PI};

use deltakit::families::{big_delta_n, delta_r, theta_n, RegFamily};
use deltakit::pairing::{pair, pair_delta_r, pair_lorentz};
use deltakit::seqdist::{derivative, FundamentalSeq};
use deltakit::special::{si, sinc_sq_integral};
use deltakit::testfn::{smooth_step_down, smooth_step_up};
use deltakit::{Integrator, TestFunction};
use proptest::prelude::*;

fn knots() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-3.0..3.0f64, 0.2..2.0f64, 0.0..2.0f64, 0.2..2.0f64)
        .prop_map(|(a, w1, w2, w3)| (a, a + w1, a + w1 + w2, a + w1 + w2 + w3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bump_is_bounded_and_compactly_supported((a, b, c, d) in knots(), t in -1.0..2.0f64) {
        let f = TestFunction::bump(a, b, c, d).unwrap();
        let x = a + t * (d - a);
        let v = f.eval(x);
        prop_assert!((0.0..=1.0).contains(&v));
        if x <= a || x >= d {
            prop_assert_eq!(v, 0.0);
        }
        if x >= b && x <= c {
            prop_assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn steps_are_complementary_under_reflection(a in -3.0..3.0f64, w in 0.1..3.0f64, t in -0.5..1.5f64) {
        let up = smooth_step_up(a, a + w).unwrap();
        let down = smooth_step_down(-a - w, -a).unwrap();
        let x = a + t * w;
        prop_assert!((up.eval(x) - down.eval(-x)).abs() < 1e-15);
    }

    #[test]
    fn si_is_odd_and_bounded(x in -200.0..200.0f64) {
        prop_assert_eq!(si(-x), -si(x));
        prop_assert!(si(x).abs() <= 1.851_937_052_0);
    }

    #[test]
    fn si_agrees_with_direct_quadrature(x in 0.0..60.0f64) {
        let direct = Integrator::new(1e-14, 1e-14)
            .with_max_panel_width(1.0)
            .integrate(deltakit::special::sinc, 0.0, x)
            .unwrap()
            .value;
        prop_assert!((si(x) - direct).abs() < 1e-12);
    }

    #[test]
    fn sinc_sq_integral_is_additive(a in 0.0..40.0f64, w1 in 0.0..20.0f64, w2 in 0.0..20.0f64) {
        let b = a + w1;
        let c = b + w2;
        let whole = sinc_sq_integral(a, c).unwrap();
        let parts = sinc_sq_integral(a, b).unwrap() + sinc_sq_integral(b, c).unwrap();
        prop_assert!((whole - parts).abs() < 1e-12);
    }

    #[test]
    fn primitives_are_anchored_and_odd_or_even(n in 0.5..50.0f64, x in -5.0..5.0f64) {
        prop_assert_eq!(theta_n(n, 0.0).unwrap(), 0.0);
        prop_assert_eq!(big_delta_n(n, 0.0).unwrap(), 0.0);
        prop_assert!((theta_n(n, -x).unwrap() + theta_n(n, x).unwrap()).abs() < 1e-15);
        prop_assert!((big_delta_n(n, -x).unwrap() - big_delta_n(n, x).unwrap()).abs() < 1e-15);
        prop_assert!(delta_r(n, x).unwrap().abs() <= n / PI * (1.0 + 1e-15));
    }

    #[test]
    fn theta_stays_within_si_maximum(n in 1.0..500.0f64, x in 0.0..5.0f64) {
        let t = theta_n(n, x).unwrap();
        prop_assert!(t <= 1.851_937_052_0 / PI + 1e-15);
        prop_assert!(t >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pairing_is_linear_in_the_test_function((a, b, c, d) in knots(), s in -2.0..2.0f64, r in 5.0..60.0f64) {
        let f = TestFunction::bump(a, b, c, d).unwrap();
        let h = TestFunction::bump(-1.0, -0.5, 0.5, 1.0).unwrap();
        let combo = TestFunction::linear_combination(s, &f, 1.0, &h);
        let lhs = pair_delta_r(r, &combo).unwrap().value;
        let rhs = s * pair_delta_r(r, &f).unwrap().value + pair_delta_r(r, &h).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn lorentz_pairing_is_a_weighted_average((a, b, c, d) in knots(), eps in 1e-3..1.0f64) {
        let f = TestFunction::bump(a, b, c, d).unwrap();
        let v = pair_lorentz(eps, &f).unwrap().value;
        prop_assert!(v >= -1e-12);
        prop_assert!(v <= 1.0 + 1e-12);
    }

    #[test]
    fn translated_pairing_samples_the_shift(x0 in -2.0..2.0f64) {
        let f = TestFunction::bump(-1.0, -0.5, 0.5, 1.0).unwrap().shifted(x0).unwrap();
        let v = pair_delta_r(400.0, &f).unwrap().value;
        prop_assert!((v - f.eval(0.0)).abs() < 5e-3);
    }
}

#[test]
fn kernel_pairing_via_generic_entry_point() {
    let f = TestFunction::bump(-2.0, -1.0, 1.0, 2.0).unwrap();
    let fam = RegFamily::fourier(50.0).unwrap();
    let generic = pair(|x| fam.eval(x), &f).unwrap().value;
    let dedicated = pair_delta_r(50.0, &f).unwrap().value;
    assert!((generic - dedicated).abs() < 1e-10);
}

#[test]
fn si_far_field() {
    assert!((si(1e6) - FRAC_PI_2).abs() <= 2e-6);
    assert!((si(1e12) - FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn double_derivative_of_limit_primitive_recovers_kernel() {
    let seq = FundamentalSeq::fourier_kernel().integrated(2).unwrap();
    let twice = derivative(&derivative(&seq).unwrap()).unwrap();
    let f = TestFunction::bump(-2.0, -1.0, 1.0, 2.0).unwrap();
    let v = deltakit::seqdist::pair_by_parts(&twice, &f).unwrap();
    assert!((v - 1.0).abs() < 1e-6);
}
