use num_complex::Complex64;
use proptest::prelude::*;
use unitary_hermite::polycore::{finite_free_add, finite_free_mult, unitary_hermite, CirclePoly, RealPoly};

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-3.0..3.0f64, n), prop_oneof![0.5..3.0f64, -3.0..-0.5f64]).prop_map(|(mut c, lead)| {
        c.push(lead);
        c
    })
}

fn pair() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..=12).prop_flat_map(|n| (Just(n), coeffs(n), coeffs(n), coeffs(n)))
}

fn values(p: &RealPoly) -> Vec<f64> {
    p.coeffs.iter().map(|c| c.to_f64()).collect()
}

fn padded(v: Vec<f64>, len: usize) -> Vec<f64> {
    let mut v = v;
    v.resize(len, 0.0);
    v
}

/// `[p_0..p_n]` as a self-inversive coefficient vector.
fn self_inversive(n: usize, raw: &[(f64, f64)]) -> Vec<Complex64> {
    let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    for j in 0..=n / 2 {
        let v = Complex64::new(raw[j].0, raw[j].1);
        c[j] = v;
        c[n - j] = sgn * v.conj();
    }
    if n % 2 == 0 {
        // The middle coefficient must be real.
        c[n / 2] = Complex64::new(raw[n / 2].0, 0.0);
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_add_commutes((n, p, q, _) in pair()) {
        let p = RealPoly::from_f64(&p).unwrap();
        let q = RealPoly::from_f64(&q).unwrap();
        let a = values(&finite_free_add(&p, &q, n).unwrap());
        let b = values(&finite_free_add(&q, &p, n).unwrap());
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn free_add_is_bilinear((n, p, p2, q) in pair(), alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let combo: Vec<f64> = p.iter().zip(&p2).map(|(a, b)| alpha * a + beta * b).collect();
        prop_assume!(combo[n].abs() > 1e-3);
        let pp = RealPoly::from_f64(&p).unwrap();
        let pp2 = RealPoly::from_f64(&p2).unwrap();
        let qq = RealPoly::from_f64(&q).unwrap();
        let lhs = padded(values(&finite_free_add(&RealPoly::from_f64(&combo).unwrap(), &qq, n).unwrap()), n + 1);
        let x = padded(values(&finite_free_add(&pp, &qq, n).unwrap()), n + 1);
        let y = padded(values(&finite_free_add(&pp2, &qq, n).unwrap()), n + 1);
        for j in 0..=n {
            let want = alpha * x[j] + beta * y[j];
            let scale = (alpha * x[j]).abs() + (beta * y[j]).abs() + lhs[j].abs();
            prop_assert!((lhs[j] - want).abs() <= 1e-12 * scale.max(1e-300), "j = {j}: {} vs {want}", lhs[j]);
        }
    }

    #[test]
    fn free_add_commutes_with_derivative((n, p, q, _) in pair()) {
        prop_assume!(n >= 2);
        let p = RealPoly::from_f64(&p).unwrap();
        let q = RealPoly::from_f64(&q).unwrap();
        let lhs = values(&finite_free_add(&p, &q, n).unwrap().derivative());
        let dq: Vec<f64> = values(&q.derivative()).iter().map(|c| c / n as f64).collect();
        let rhs = values(&finite_free_add(&p.derivative(), &RealPoly::from_f64(&dq).unwrap(), n - 1).unwrap());
        let scale = lhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let rhs = padded(rhs, lhs.len());
        for (j, (x, y)) in lhs.iter().zip(&rhs).enumerate() {
            prop_assert!((x - y).abs() <= 1e-12 * scale, "j = {j}: {x} vs {y}");
        }
    }

    #[test]
    fn free_mult_keeps_self_inversive(
        n in 1usize..=12,
        a in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 7),
        b in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 7),
    ) {
        prop_assume!(a[0].0.hypot(a[0].1) > 0.1 && b[0].0.hypot(b[0].1) > 0.1);
        let p = CirclePoly::from_complex(&self_inversive(n, &a)).unwrap();
        let q = CirclePoly::from_complex(&self_inversive(n, &b)).unwrap();
        prop_assert!(p.self_inversive && q.self_inversive);
        let r = finite_free_mult(&p, &q, n).unwrap();
        prop_assert!(r.self_inversive);
        prop_assert!(r.check_self_inversive(1e-12));
    }

    #[test]
    fn hermite_semigroup(n in 1usize..=60, a in 0.0..2.0f64, b in 0.0..2.0f64) {
        let r = finite_free_mult(&unitary_hermite(n, a).unwrap(), &unitary_hermite(n, b).unwrap(), n).unwrap();
        let h = unitary_hermite(n, a + b).unwrap();
        for (x, y) in r.coeffs.iter().zip(&h.coeffs) {
            prop_assert_eq!(x.re.sign, y.re.sign);
            prop_assert_eq!(x.im.sign, 0);
            prop_assert!((x.re.ln_mag - y.re.ln_mag).abs() <= 1e-13 * y.re.ln_mag.abs().max(1.0));
        }
    }

    #[test]
    fn hermite_is_self_inversive(n in 1usize..=400, s2 in 0.0..8.0f64) {
        let h = unitary_hermite(n, s2).unwrap();
        prop_assert!(h.self_inversive);
        prop_assert!(h.check_self_inversive(0.0));
    }
}
