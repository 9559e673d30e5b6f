use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use unitary_hermite::zetasolver::{tan, zeta, zeta_boundary_line, ZetaConfig};

fn t_value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.25), Just(1.0), Just(2.0), 0.05..4.0f64]
}

fn z(t: f64, theta: Complex64) -> Complex64 {
    zeta(t, theta, &ZetaConfig::default()).unwrap().zeta
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn residual(t in t_value(), re in -PI..PI, im in 0.0..10.0f64) {
        let theta = Complex64::new(re, im);
        let v = zeta(t, theta, &ZetaConfig::default()).unwrap();
        let r = (v.zeta - t * tan(v.zeta) - theta).norm();
        prop_assert!(r <= 1e-12 * theta.norm().max(1.0), "residual {r:e} at t = {t}, θ = {theta}");
        prop_assert!(v.zeta.im >= 0.0);
    }

    #[test]
    fn periodic(t in t_value(), re in -PI..PI, im in 0.0..10.0f64) {
        let theta = Complex64::new(re, im);
        let d = z(t, theta + PI) - z(t, theta) - PI;
        prop_assert!(d.norm() <= 1e-12 * theta.norm().max(1.0), "{d}");
    }

    #[test]
    fn reflection(t in t_value(), re in -PI..PI, im in 0.0..10.0f64) {
        let theta = Complex64::new(re, im);
        let d = z(t, -theta.conj()) + z(t, theta).conj();
        prop_assert!(d.norm() <= 1e-12 * theta.norm().max(1.0), "{d}");
    }

    #[test]
    fn strict_lift(t in t_value(), re in -PI..PI, im in 1e-3..10.0f64) {
        let theta = Complex64::new(re, im);
        prop_assert!(z(t, theta).im > im);
    }

    #[test]
    fn boundary_line(t in t_value(), tau in 0.0..10.0f64) {
        let v = z(t, Complex64::new(-0.5 * PI, tau));
        let want = Complex64::new(-0.5 * PI, zeta_boundary_line(t, tau).unwrap());
        prop_assert!((v - want).norm() <= 1e-10, "{v} vs {want}");
    }
}
