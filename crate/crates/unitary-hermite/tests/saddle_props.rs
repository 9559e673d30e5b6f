use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use unitary_hermite::saddle::{limit_logH, limit_logderivative};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn real_coefficients_give_conjugate_symmetry(r in 0.01..0.3f64, phi in -PI..PI, s2 in 0.1..4.0f64) {
        let z = Complex64::from_polar(r, phi);
        let a = limit_logH(z.conj(), s2).unwrap();
        let b = limit_logH(z, s2).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12, "{a} vs {b}");
        let a = limit_logderivative(z.conj(), s2).unwrap();
        let b = limit_logderivative(z, s2).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "{a} vs {b}");
    }
}
