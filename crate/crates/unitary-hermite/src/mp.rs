//! Thin helpers over `astro_float` for the certified evaluators.

use astro_float::{BigFloat, Consts, Exponent, RoundingMode, Sign, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Working bits for a requested number of decimal digits, rounded up to whole words.
pub(crate) fn bits_for_digits(digits: u32) -> usize {
    let b = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8;
    b.div_ceil(64) * 64
}

/// Unit roundoff `2^(1-p)`.
pub(crate) fn unit_roundoff(p: usize) -> f64 {
    2f64.powi(1 - p as i32)
}

pub(crate) fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

pub(crate) fn f(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

pub(crate) fn zero(p: usize) -> BigFloat {
    BigFloat::from_f64(0.0, p)
}

/// Nearest double, saturating to infinity and flushing to zero.
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    match mant_exp(x) {
        None => 0.0,
        Some((m, e)) => ldexp(m, e),
    }
}

/// `log2 |x|`, `-inf` for zero.
pub(crate) fn log2_abs(x: &BigFloat) -> f64 {
    match mant_exp(x) {
        None => f64::NEG_INFINITY,
        Some((m, e)) => m.abs().log2() + e as f64,
    }
}

/// `(m, e)` with `x = m * 2^e`; `(0, 0)` for zero.
pub(crate) fn mant_exp_or_zero(x: &BigFloat) -> (f64, i64) {
    mant_exp(x).unwrap_or((0.0, 0))
}

/// `(m, e)` with `x = m * 2^e`, `0.5 <= |m| < 1`.
fn mant_exp(x: &BigFloat) -> Option<(f64, i64)> {
    if x.is_zero() {
        return None;
    }
    let (words, _bits, sign, e, _) = x.as_raw_parts()?;
    let k = words.len();
    let hi = words[k - 1] as f64;
    let lo = if k >= 2 { words[k - 2] as f64 } else { 0.0 };
    let w = Word::BITS as i32;
    let m = (hi + lo * 2f64.powi(-w)) * 2f64.powi(-w);
    let m = if sign == Sign::Neg { -m } else { m };
    Some((m, e as i64))
}

pub(crate) fn ldexp(m: f64, e: i64) -> f64 {
    if e > 1100 {
        return m * f64::INFINITY;
    }
    if e < -1200 {
        return 0.0 * m;
    }
    let e1 = e / 2;
    let e2 = e - e1;
    m * 2f64.powi(e1 as i32) * 2f64.powi(e2 as i32)
}

/// Exact conversion of an integer (the result carries as many bits as needed).
pub(crate) fn from_bigint(n: &BigInt) -> BigFloat {
    if n.is_zero() {
        return zero(64);
    }
    // Word is u64 on 64-bit targets and u32 on wasm32.
    let (s, words): (_, Vec<Word>) = if Word::BITS == 64 {
        let (s, w) = n.to_u64_digits();
        (s, w.into_iter().map(|w| w as Word).collect())
    } else {
        let (s, w) = n.to_u32_digits();
        (s, w.into_iter().map(|w| w as Word).collect())
    };
    let sign = if s == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
    BigFloat::from_words(&words, sign, (words.len() * Word::BITS as usize) as Exponent)
}

pub(crate) fn from_ratio(r: &BigRational, p: usize) -> BigFloat {
    let num = from_bigint(r.numer());
    if r.denom() == &BigInt::from(1) {
        let mut v = num;
        v.set_precision(p, RM).expect("precision");
        return v;
    }
    let den = from_bigint(r.denom());
    num.div(&den, p, RM)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        let p = 128;
        for x in [1.0, -3.5, 1e-300, 7e300, 0.1, -2f64.powi(-1000)] {
            assert_eq!(to_f64(&f(x, p)), x, "{x}");
        }
        let big = BigInt::from(3).pow(200u32);
        let b = from_bigint(&big);
        assert!((log2_abs(&b) - 200.0 * 3f64.log2()).abs() < 1e-12);
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!((to_f64(&from_ratio(&r, 128)) - 1.0 / 3.0).abs() < 1e-17);
    }

    #[test]
    fn multiword_integers_are_exact() {
        let two = BigInt::from(2);
        let n: BigInt = -(two.pow(130u32) + two.pow(70u32) * 5u32 + 3u32);
        let x = from_bigint(&n);
        let top = f(-2f64.powi(130), 256);
        let rest = x.sub(&top, 256, RM);
        assert_eq!(to_f64(&rest), -(5.0 * 2f64.powi(70) + 3.0));
        assert_eq!(to_f64(&x), -2f64.powi(130));
    }
}
