use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use unitary_hermite::heatflow::{backward_heat_algebraic, backward_heat_circle, scaled_hermite};
use unitary_hermite::polycore::{finite_free_add, finite_free_mult, unitary_hermite, CirclePoly, RealPoly};

fn poly_from_circle_roots(phis: &[f64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &p in phis {
        let r = Complex64::from_polar(1.0, p);
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (j, a) in c.iter().enumerate() {
            next[j + 1] += a;
            next[j] -= a * r;
        }
        c = next;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn algebraic_flow_is_free_convolution(roots in prop::collection::vec(-2.0..2.0f64, 1..=12), s in 0.01..2.0f64) {
        let n = roots.len();
        let p = RealPoly::from_roots(&roots).unwrap();
        let a = backward_heat_algebraic(&p, s).unwrap().coeffs_f64();
        let b = finite_free_add(&p, &scaled_hermite(n, s).unwrap(), n).unwrap().coeffs_f64();
        prop_assert_eq!(a.len(), b.len());
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn circle_flow_is_hermite_product(phis in prop::collection::vec(-PI..PI, 1..=12), sigma2 in 0.05..6.0f64) {
        let n = phis.len();
        let s = sigma2 / n as f64;
        let p = CirclePoly::from_complex(&poly_from_circle_roots(&phis)).unwrap();
        let flowed = backward_heat_circle(&p, s).unwrap().coeffs_c64();
        let prod = finite_free_mult(&unitary_hermite(n, s).unwrap(), &p, n).unwrap().coeffs_c64();
        // Flowing multiplies coefficient j by exp((s/2)(j - n/2)²) = exp(s n²/8) exp(-s j(n-j)/2).
        let k = (s * (n * n) as f64 / 8.0).exp();
        let scale = flowed.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        for (x, y) in flowed.iter().zip(&prod) {
            prop_assert!((x - k * y).norm() <= 1e-12 * scale, "{x} vs {}", k * y);
        }
    }
}
