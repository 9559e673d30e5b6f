//! Signed log-scale reals.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};

/// A real number stored as `sign * exp(ln_mag)`.
///
/// `sign == 0` is exact zero and `ln_mag` is then ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedScaled {
    pub sign: i8,
    pub ln_mag: f64,
}

impl SignedScaled {
    pub const ZERO: SignedScaled = SignedScaled { sign: 0, ln_mag: 0.0 };
    pub const ONE: SignedScaled = SignedScaled { sign: 1, ln_mag: 0.0 };

    pub fn new(sign: i8, ln_mag: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            debug_assert!(ln_mag.is_finite());
            SignedScaled { sign: sign.signum(), ln_mag }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedScaled { sign: if x > 0.0 { 1 } else { -1 }, ln_mag: x.abs().ln() }
        }
    }

    /// `sign * exp(ln_mag)`, saturating to infinity or zero.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.ln_mag.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn neg(self) -> Self {
        SignedScaled { sign: -self.sign, ln_mag: self.ln_mag }
    }

    pub fn abs(self) -> Self {
        SignedScaled { sign: self.sign.abs(), ln_mag: self.ln_mag }
    }

    /// Multiplies by `exp(x)`.
    pub fn scale_exp(self, x: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            SignedScaled { sign: self.sign, ln_mag: self.ln_mag + x }
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        SignedScaled { sign: self.sign, ln_mag: -self.ln_mag }
    }
}

impl std::ops::Mul for SignedScaled {
    type Output = SignedScaled;
    fn mul(self, rhs: SignedScaled) -> SignedScaled {
        ss_mul(self, rhs)
    }
}

impl std::ops::Add for SignedScaled {
    type Output = SignedScaled;
    fn add(self, rhs: SignedScaled) -> SignedScaled {
        ss_add(self, rhs)
    }
}

impl std::ops::Div for SignedScaled {
    type Output = SignedScaled;
    fn div(self, rhs: SignedScaled) -> SignedScaled {
        ss_mul(self, rhs.recip())
    }
}

impl std::ops::Neg for SignedScaled {
    type Output = SignedScaled;
    fn neg(self) -> SignedScaled {
        SignedScaled::neg(self)
    }
}

pub fn ss_mul(a: SignedScaled, b: SignedScaled) -> SignedScaled {
    if a.sign == 0 || b.sign == 0 {
        return SignedScaled::ZERO;
    }
    SignedScaled { sign: a.sign * b.sign, ln_mag: a.ln_mag + b.ln_mag }
}

pub fn ss_add(a: SignedScaled, b: SignedScaled) -> SignedScaled {
    if a.sign == 0 {
        return b;
    }
    if b.sign == 0 {
        return a;
    }
    let (hi, lo) = if a.ln_mag >= b.ln_mag { (a, b) } else { (b, a) };
    let r = (lo.ln_mag - hi.ln_mag).exp();
    if hi.sign == lo.sign {
        SignedScaled { sign: hi.sign, ln_mag: hi.ln_mag + r.ln_1p() }
    } else if r == 1.0 {
        SignedScaled::ZERO
    } else {
        SignedScaled { sign: hi.sign, ln_mag: hi.ln_mag + (-r).ln_1p() }
    }
}

/// Sum of many terms, factoring out the largest magnitude once.
pub fn ss_sum(terms: &[SignedScaled]) -> SignedScaled {
    let m = terms
        .iter()
        .filter(|t| t.sign != 0)
        .map(|t| t.ln_mag)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return SignedScaled::ZERO;
    }
    let mut pos = 0.0;
    let mut neg = 0.0;
    for t in terms.iter().filter(|t| t.sign != 0) {
        let v = (t.ln_mag - m).exp();
        if t.sign > 0 {
            pos += v;
        } else {
            neg += v;
        }
    }
    let s = pos - neg;
    if s == 0.0 {
        SignedScaled::ZERO
    } else {
        SignedScaled { sign: if s > 0.0 { 1 } else { -1 }, ln_mag: m + s.abs().ln() }
    }
}

/// `ln C(n, k)`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return domain(format!("log_binomial: k = {k} exceeds n = {n}"));
    }
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    if n <= 60 {
        // Exact in u128, then a single rounding.
        let mut c: u128 = 1;
        for i in 0..k as u128 {
            c = c * (n as u128 - i) / (i + 1);
        }
        return Ok((c as f64).ln());
    }
    if k <= 16 {
        let mut s = 0.0;
        for i in 0..k {
            s += ((n - i) as f64 / (i + 1) as f64).ln();
        }
        return Ok(s);
    }
    Ok(ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
}

/// `ln n!`.
pub fn log_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else if n <= 20 {
        ((1..=n).product::<u64>() as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn mul_examples() {
        let r = ss_mul(SignedScaled::from_f64(2.0), SignedScaled::from_f64(-3.0));
        assert_eq!(r.sign, -1);
        assert!(close(r.ln_mag, 6f64.ln(), 1e-15));
        assert!(ss_mul(SignedScaled::ZERO, SignedScaled::new(1, 100.0)).is_zero());
        let big = ss_mul(SignedScaled::new(1, 700.0), SignedScaled::new(1, 700.0));
        assert_eq!((big.sign, big.ln_mag), (1, 1400.0));
    }

    #[test]
    fn add_examples() {
        let three = SignedScaled::new(1, 3f64.ln());
        assert!(ss_add(three, -three).is_zero());
        let two = ss_add(SignedScaled::ONE, SignedScaled::ONE);
        assert!(close(two.ln_mag, 2f64.ln(), 1e-15));
        let dom = ss_add(SignedScaled::new(1, 1000.0), SignedScaled::new(1, 0.0));
        assert_eq!(dom.sign, 1);
        assert_eq!(dom.ln_mag, 1000.0);
    }

    #[test]
    fn log_binomial_small() {
        assert!(close(log_binomial(4, 2).unwrap(), 6f64.ln(), 1e-15));
        assert_eq!(log_binomial(17, 0).unwrap(), 0.0);
        assert!(log_binomial(3, 4).is_err());
        let v = log_binomial(1000, 500).unwrap();
        assert!((v - 689.467).abs() < 1e-3, "{v}");
    }

    #[test]
    fn sum_cancels() {
        let t = [SignedScaled::from_f64(1.5), SignedScaled::from_f64(-1.5), SignedScaled::from_f64(2.0)];
        assert!(close(ss_sum(&t).to_f64(), 2.0, 1e-15));
    }
}
