use proptest::prelude::*;
use std::f64::consts::PI;
use unitary_hermite::freenormal::{density, moment, support_halfwidth, FreeNormalParams};
use unitary_hermite::quad::integrate;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn density_is_even(s2 in 0.05..8.0f64, theta in 0.0..PI) {
        let p = FreeNormalParams::new(s2).unwrap();
        let a = density(&p, theta).unwrap();
        let b = density(&p, -theta).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn density_is_periodic(s2 in 0.05..8.0f64, theta in -PI..PI) {
        let p = FreeNormalParams::new(s2).unwrap();
        let a = density(&p, theta).unwrap();
        let b = density(&p, theta + 2.0 * PI).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }
}

#[test]
fn quadrature_moments() {
    for &s2 in &[1.0, 4.0] {
        let p = FreeNormalParams::new(s2).unwrap();
        let m = support_halfwidth(&p);
        for ell in 0..=8i64 {
            let f = |t: f64| (ell as f64 * t).cos() * density(&p, t).unwrap();
            let v = integrate(f, -m, m, &[0.0], 1e-12, 1e-12).unwrap().value;
            let want = moment(&p, ell);
            assert!((v - want).abs() <= 1e-7, "σ² = {s2}, ℓ = {ell}: {v} vs {want}");
        }
    }
}
