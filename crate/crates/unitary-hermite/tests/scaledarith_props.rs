use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use unitary_hermite::scaledarith::{log_binomial, ss_add, ss_mul, SignedScaled};

fn scaled() -> impl Strategy<Value = SignedScaled> {
    (prop_oneof![Just(-1i8), Just(1i8)], -500.0..500.0f64).prop_map(|(s, l)| SignedScaled::new(s, l))
}

fn same_sign() -> impl Strategy<Value = (SignedScaled, SignedScaled, SignedScaled)> {
    (prop_oneof![Just(-1i8), Just(1i8)], -500.0..500.0f64, -500.0..500.0f64, -500.0..500.0f64)
        .prop_map(|(s, a, b, c)| (SignedScaled::new(s, a), SignedScaled::new(s, b), SignedScaled::new(s, c)))
}

fn close(x: SignedScaled, y: SignedScaled, rel: f64) -> bool {
    x.sign == y.sign && (x.sign == 0 || (x.ln_mag - y.ln_mag).abs() <= rel * x.ln_mag.abs().max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn add_and_mul_commute(a in scaled(), b in scaled()) {
        prop_assert_eq!(ss_add(a, b), ss_add(b, a));
        prop_assert_eq!(ss_mul(a, b), ss_mul(b, a));
    }

    #[test]
    fn mul_associates(a in scaled(), b in scaled(), c in scaled()) {
        let l = ss_mul(ss_mul(a, b), c);
        let r = ss_mul(a, ss_mul(b, c));
        let scale = a.ln_mag.abs().max(b.ln_mag.abs()).max(c.ln_mag.abs()).max(1.0);
        prop_assert_eq!(l.sign, r.sign);
        prop_assert!((l.ln_mag - r.ln_mag).abs() <= 1e-14 * scale);
    }

    #[test]
    fn add_associates_without_cancellation((a, b, c) in same_sign()) {
        let l = ss_add(ss_add(a, b), c);
        let r = ss_add(a, ss_add(b, c));
        prop_assert!(close(l, r, 1e-14), "{l:?} vs {r:?}");
    }

    // With mixed signs the sum is only as good as its condition number.
    #[test]
    fn add_associates_up_to_conditioning(a in scaled(), b in scaled(), c in scaled()) {
        let l = ss_add(ss_add(a, b), c);
        let r = ss_add(a, ss_add(b, c));
        prop_assert_eq!(l.sign, r.sign);
        if l.sign != 0 {
            let top = a.ln_mag.max(b.ln_mag).max(c.ln_mag);
            let cond = [a, b, c].iter().map(|x| (x.ln_mag - l.ln_mag).exp()).sum::<f64>();
            let tol = 1e-14 * l.ln_mag.abs().max(1.0) + 4.0 * f64::EPSILON * (cond + top.abs() * cond);
            prop_assert!((l.ln_mag - r.ln_mag).abs() <= tol, "{l:?} vs {r:?}");
        }
    }

    #[test]
    fn zero_is_neutral(a in scaled()) {
        prop_assert_eq!(ss_add(a, SignedScaled::ZERO), a);
        prop_assert_eq!(ss_mul(a, SignedScaled::ZERO), SignedScaled::ZERO);
        prop_assert_eq!(ss_add(a, a.neg()), SignedScaled::ZERO);
    }

    // ln then exp in double precision costs a few ulps on large exponents.
    #[test]
    fn f64_round_trip(x in prop::num::f64::NORMAL) {
        let y = SignedScaled::from_f64(x).to_f64();
        let ulps = (x.abs().ln().abs() * f64::EPSILON).max(f64::EPSILON);
        prop_assert!((y - x).abs() <= 2.0 * ulps * x.abs(), "{x:e} -> {y:e}");
        prop_assert_eq!(y.signum(), x.signum());
    }
}

#[test]
fn log_binomial_against_integers() {
    for n in 0u64..=60 {
        let mut c = BigUint::from(1u32);
        for k in 0..=n {
            let want = c.to_f64().unwrap();
            let got = log_binomial(n, k).unwrap().exp();
            assert!((got - want).abs() <= 1e-12 * want, "C({n},{k}): {got} vs {want}");
            c = c * BigUint::from(n - k) / BigUint::from(k + 1);
        }
    }
    assert!(log_binomial(3, 4).is_err());
}
