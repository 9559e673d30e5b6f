//! Polynomial families and finite free convolutions.
//!
//! Coefficients live in [`SignedScaled`] form so that binomials and Gaussian
//! weights of any size compose without overflow. Polynomials built from
//! closed forms additionally carry an exact description of their
//! coefficients, which the multiprecision evaluators materialize at whatever
//! precision a computation needs.

use astro_float::{BigFloat, Consts};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circleroots::EvalPrecision;
use crate::error::{domain, Error, Result};
use crate::mp::{self, RM};
use crate::scaledarith::{log_binomial, log_factorial, ss_add, ss_mul, ss_sum, SignedScaled};

pub(crate) type CRat = Complex<BigRational>;

/// A complex number with [`SignedScaled`] components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub re: SignedScaled,
    pub im: SignedScaled,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { re: SignedScaled::ZERO, im: SignedScaled::ZERO };

    pub fn real(re: SignedScaled) -> Self {
        ScaledComplex { re, im: SignedScaled::ZERO }
    }

    pub fn from_c64(z: Complex64) -> Self {
        ScaledComplex { re: SignedScaled::from_f64(z.re), im: SignedScaled::from_f64(z.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(self) -> Self {
        ScaledComplex { re: self.re, im: -self.im }
    }

    pub fn neg(self) -> Self {
        ScaledComplex { re: -self.re, im: -self.im }
    }

    pub fn scale_exp(self, x: f64) -> Self {
        ScaledComplex { re: self.re.scale_exp(x), im: self.im.scale_exp(x) }
    }

    /// Largest component log-magnitude, `-inf` for zero.
    pub fn ln_max(self) -> f64 {
        let l = |s: SignedScaled| if s.is_zero() { f64::NEG_INFINITY } else { s.ln_mag };
        l(self.re).max(l(self.im))
    }

    /// `ln |z|`.
    pub fn ln_abs(self) -> f64 {
        let m = self.ln_max();
        if m == f64::NEG_INFINITY {
            return m;
        }
        let a = self.scale_exp(-m).to_c64();
        m + a.norm().ln()
    }

    pub fn mul(self, o: ScaledComplex) -> ScaledComplex {
        ScaledComplex {
            re: ss_add(ss_mul(self.re, o.re), -ss_mul(self.im, o.im)),
            im: ss_add(ss_mul(self.re, o.im), ss_mul(self.im, o.re)),
        }
    }

    pub fn add(self, o: ScaledComplex) -> ScaledComplex {
        ScaledComplex { re: ss_add(self.re, o.re), im: ss_add(self.im, o.im) }
    }
}

/// Exact coefficient description: coefficient `j` equals
/// `exp(ln_scale + (flow/2)(j - center2/2)^2) * base[j]`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExactForm {
    pub base: Vec<CRat>,
    pub flow: f64,
    pub center2: i64,
    pub ln_scale: f64,
}

/// Coefficients materialized at a fixed binary precision and normalized so
/// that the largest has modulus about one.
pub(crate) struct MpWeights {
    pub bits: usize,
    pub re: Vec<BigFloat>,
    pub im: Vec<BigFloat>,
    /// Approximate moduli of the normalized weights.
    pub abs: Vec<f64>,
    /// Natural log of the normalization factor.
    pub ln_norm: f64,
    /// Relative error bound of each materialized weight.
    pub rel_err: f64,
}

pub(crate) fn ln_abs_ratio(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let num = mp::from_bigint(r.numer());
    let den = mp::from_bigint(r.denom());
    (mp::log2_abs(&num) - mp::log2_abs(&den)) * std::f64::consts::LN_2
}

/// Exact rational `sign * exp(x)` up to double rounding of `exp` of the fractional part.
pub(crate) fn ratio_from_signed_log(sign: i8, x: f64) -> BigRational {
    if sign == 0 {
        return BigRational::zero();
    }
    let k = (x / std::f64::consts::LN_2).floor();
    let r = x - k * std::f64::consts::LN_2;
    let m = BigRational::from_float(sign as f64 * r.exp()).expect("finite mantissa");
    let two = BigRational::from_integer(BigInt::from(2));
    let k = k as i64;
    if k >= 0 {
        m * num_traits::pow(two, k as usize)
    } else {
        m / num_traits::pow(two, (-k) as usize)
    }
}

pub(crate) fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    for j in 0..=n {
        row.push(c.clone());
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    row
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

impl ExactForm {
    pub(crate) fn from_scaled(coeffs: &[ScaledComplex]) -> Self {
        let l = coeffs.iter().map(|c| c.ln_max()).fold(f64::NEG_INFINITY, f64::max);
        let l = if l.is_finite() { l } else { 0.0 };
        let base = coeffs
            .iter()
            .map(|c| {
                CRat::new(
                    ratio_from_signed_log(c.re.sign, c.re.ln_mag - l),
                    ratio_from_signed_log(c.im.sign, c.im.ln_mag - l),
                )
            })
            .collect();
        ExactForm { base, flow: 0.0, center2: coeffs.len() as i64 - 1, ln_scale: l }
    }

    fn flow_part(&self, j: usize) -> f64 {
        let d = j as f64 - 0.5 * self.center2 as f64;
        0.5 * self.flow * d * d
    }

    /// `ln |coefficient j|` without the global scale.
    pub(crate) fn ln_mags(&self) -> Vec<f64> {
        self.base
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let lr = ln_abs_ratio(&c.re);
                let li = ln_abs_ratio(&c.im);
                let m = lr.max(li);
                if m == f64::NEG_INFINITY {
                    return m;
                }
                let x = lr.min(li) - m;
                m + 0.5 * (2.0 * x).exp().ln_1p() + self.flow_part(j)
            })
            .collect()
    }

    pub(crate) fn to_scaled(&self) -> Vec<ScaledComplex> {
        self.base
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let extra = self.ln_scale + self.flow_part(j);
                let part = |r: &BigRational| {
                    if r.is_zero() {
                        SignedScaled::ZERO
                    } else {
                        let s = if r.is_negative() { -1 } else { 1 };
                        SignedScaled::new(s, ln_abs_ratio(r) + extra)
                    }
                };
                ScaledComplex { re: part(&c.re), im: part(&c.im) }
            })
            .collect()
    }

    /// Correctly rounded (up to the scale factor) double coefficients.
    pub(crate) fn to_c64(&self) -> Vec<Complex64> {
        let bits = 128;
        let mut cc = mp::consts();
        self.base
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let extra = self.ln_scale + self.flow_part(j);
                let factor = (extra != 0.0).then(|| mp::f(extra, bits).exp(bits, RM, &mut cc));
                let part = |r: &BigRational| {
                    let v = mp::from_ratio(r, bits);
                    match &factor {
                        Some(f) => mp::to_f64(&v.mul(f, bits, RM)),
                        None => mp::to_f64(&v),
                    }
                };
                Complex64::new(part(&c.re), part(&c.im))
            })
            .collect()
    }

    pub(crate) fn materialize(&self, bits: usize, cc: &mut Consts) -> MpWeights {
        let lm = self.ln_mags();
        let l = lm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let half_flow = mp::f(0.5 * self.flow, bits);
        let lbf = mp::f(l, bits);
        let mut re = Vec::with_capacity(self.base.len());
        let mut im = Vec::with_capacity(self.base.len());
        let mut abs = Vec::with_capacity(self.base.len());
        for (j, c) in self.base.iter().enumerate() {
            if lm[j] == f64::NEG_INFINITY {
                re.push(mp::zero(bits));
                im.push(mp::zero(bits));
                abs.push(0.0);
                continue;
            }
            let d2 = 2 * j as i64 - self.center2;
            // (j - c)^2 = d2^2 / 4, exact in a double for any practical degree.
            let sq = mp::f((d2 * d2) as f64 * 0.25, bits);
            let arg = half_flow.mul(&sq, bits, RM).sub(&lbf, bits, RM);
            let e = arg.exp(bits, RM, cc);
            let conv = |r: &BigRational| {
                if r.is_zero() {
                    mp::zero(bits)
                } else {
                    mp::from_ratio(r, bits).mul(&e, bits, RM)
                }
            };
            re.push(conv(&c.re));
            im.push(conv(&c.im));
            abs.push((lm[j] - l).exp());
        }
        MpWeights { bits, re, im, abs, ln_norm: l + self.ln_scale, rel_err: 8.0 * mp::unit_roundoff(bits) }
    }
}

/// Degree-`n` polynomial with complex coefficients; `coeffs[j]` multiplies `z^j`.
#[derive(Debug, Clone)]
pub struct CirclePoly {
    pub n: usize,
    pub coeffs: Vec<ScaledComplex>,
    /// `coeffs[j] = (-1)^n conj(coeffs[n-j])` for all `j`.
    pub self_inversive: bool,
    pub(crate) exact: Option<ExactForm>,
}

impl PartialEq for CirclePoly {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.coeffs == o.coeffs && self.self_inversive == o.self_inversive
    }
}

impl CirclePoly {
    /// Builds a polynomial from coefficient values; the self-inversive flag is detected.
    pub fn from_coeffs(coeffs: Vec<ScaledComplex>) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("polynomial needs at least one coefficient");
        }
        let n = coeffs.len() - 1;
        if coeffs[n].is_zero() {
            return domain("leading coefficient is zero");
        }
        let mut p = CirclePoly { n, coeffs, self_inversive: false, exact: None };
        p.self_inversive = p.check_self_inversive(1e-12);
        Ok(p)
    }

    pub fn from_complex(coeffs: &[Complex64]) -> Result<Self> {
        let mut p = Self::from_coeffs(coeffs.iter().map(|&c| ScaledComplex::from_c64(c)).collect())?;
        p.exact = Some(ExactForm {
            base: coeffs
                .iter()
                .map(|c| {
                    CRat::new(
                        BigRational::from_float(c.re).expect("finite"),
                        BigRational::from_float(c.im).expect("finite"),
                    )
                })
                .collect(),
            flow: 0.0,
            center2: p.n as i64,
            ln_scale: 0.0,
        });
        Ok(p)
    }

    pub(crate) fn from_exact(exact: ExactForm) -> Result<Self> {
        let mut p = Self::from_coeffs(exact.to_scaled())?;
        p.exact = Some(exact);
        Ok(p)
    }

    /// Checks `coeffs[j] = (-1)^n conj(coeffs[n-j])` to a relative tolerance in log-magnitude.
    pub fn check_self_inversive(&self, tol: f64) -> bool {
        let sgn = if self.n % 2 == 0 { 1 } else { -1 };
        (0..=self.n).all(|j| {
            let a = self.coeffs[j];
            let b = self.coeffs[self.n - j].conj();
            let b = ScaledComplex { re: SignedScaled { sign: b.re.sign * sgn, ..b.re }, im: SignedScaled { sign: b.im.sign * sgn, ..b.im } };
            let same = |x: SignedScaled, y: SignedScaled| {
                x.sign == y.sign && (x.sign == 0 || (x.ln_mag - y.ln_mag).abs() <= tol * (1.0 + x.ln_mag.abs()))
            };
            same(a.re, b.re) && same(a.im, b.im)
        })
    }

    /// Exact coefficient form; derived from the stored values when none was attached.
    pub(crate) fn exact_form(&self) -> ExactForm {
        self.exact.clone().unwrap_or_else(|| ExactForm::from_scaled(&self.coeffs))
    }

    pub fn coeffs_c64(&self) -> Vec<Complex64> {
        if let Some(e) = &self.exact {
            return e.to_c64();
        }
        self.coeffs.iter().map(|c| c.to_c64()).collect()
    }

    /// `Some(flow)` when the polynomial is a positive multiple of a flowed `(z-1)^n`,
    /// i.e. a unitary Hermite polynomial; `flow` is its parameter.
    pub fn hermite_parameter(&self) -> Option<f64> {
        let e = self.exact.as_ref()?;
        if e.center2 != self.n as i64 {
            return None;
        }
        let row = binomial_row(self.n);
        let k = &e.base[self.n];
        if !k.im.is_zero() || k.re.is_zero() {
            return None;
        }
        let unit = &k.re;
        for (j, c) in e.base.iter().enumerate() {
            let sgn = if (self.n - j) % 2 == 0 { 1 } else { -1 };
            let want = unit * BigRational::from_integer(&row[j] * sgn);
            if !c.im.is_zero() || c.re != want {
                return None;
            }
        }
        if unit.is_positive() {
            Some(e.flow)
        } else {
            None
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CirclePolyJson {
    n: usize,
    coeffs: Vec<(i8, f64, i8, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    self_inversive: Option<bool>,
}

impl Serialize for CirclePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let f = |x: SignedScaled| if x.sign == 0 { 0.0 } else { x.ln_mag };
                (c.re.sign, f(c.re), c.im.sign, f(c.im))
            })
            .collect();
        CirclePolyJson { n: self.n, coeffs, self_inversive: Some(self.self_inversive) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CirclePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = CirclePolyJson::deserialize(d)?;
        if j.coeffs.len() != j.n + 1 {
            return Err(D::Error::custom(format!("expected {} coefficients, got {}", j.n + 1, j.coeffs.len())));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|&(rs, rl, is, il)| ScaledComplex { re: SignedScaled::new(rs, rl), im: SignedScaled::new(is, il) })
            .collect();
        let mut p = CirclePoly::from_coeffs(coeffs).map_err(D::Error::custom)?;
        if let Some(flag) = j.self_inversive {
            if flag && !p.self_inversive {
                return Err(D::Error::custom("coefficients are not self-inversive"));
            }
        }
        p.exact = Some(ExactForm::from_scaled(&p.coeffs));
        Ok(p)
    }
}

/// Real polynomial, `coeffs[j]` multiplies `z^j`.
#[derive(Debug, Clone)]
pub struct RealPoly {
    pub n: usize,
    pub coeffs: Vec<SignedScaled>,
    pub(crate) exact: Option<Vec<BigRational>>,
}

impl PartialEq for RealPoly {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.coeffs == o.coeffs
    }
}

impl RealPoly {
    pub fn from_scaled(coeffs: Vec<SignedScaled>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.last().unwrap().is_zero() {
            return domain("leading coefficient is zero");
        }
        Ok(RealPoly { n: coeffs.len() - 1, coeffs, exact: None })
    }

    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        let mut p = Self::from_scaled(coeffs.iter().map(|&c| SignedScaled::from_f64(c)).collect())?;
        p.exact = Some(coeffs.iter().map(|&c| BigRational::from_float(c).expect("finite")).collect());
        Ok(p)
    }

    pub(crate) fn from_rationals(c: Vec<BigRational>) -> Result<Self> {
        let coeffs = c
            .iter()
            .map(|r| {
                if r.is_zero() {
                    SignedScaled::ZERO
                } else {
                    SignedScaled::new(if r.is_negative() { -1 } else { 1 }, ln_abs_ratio(r))
                }
            })
            .collect();
        let mut p = Self::from_scaled(coeffs)?;
        p.exact = Some(c);
        Ok(p)
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Result<Self> {
        let mut c = vec![BigRational::one()];
        for &r in roots {
            let r = BigRational::from_float(r).ok_or_else(|| Error::Domain("non-finite root".into()))?;
            let mut next = vec![BigRational::zero(); c.len() + 1];
            for (j, a) in c.iter().enumerate() {
                next[j + 1] += a;
                next[j] -= a * &r;
            }
            c = next;
        }
        Self::from_rationals(c)
    }

    pub(crate) fn exact_coeffs(&self) -> Vec<BigRational> {
        self.exact.clone().unwrap_or_else(|| {
            let l = self.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.ln_mag).fold(f64::NEG_INFINITY, f64::max);
            self.coeffs.iter().map(|c| ratio_from_signed_log(c.sign, c.ln_mag - l)).collect()
        })
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        if let Some(e) = &self.exact {
            return e.iter().map(|r| mp::to_f64(&mp::from_ratio(r, 128))).collect();
        }
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Horner evaluation in double precision with max-log prescaling.
    pub fn eval(&self, x: f64) -> f64 {
        let l = self.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.ln_mag).fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.scale_exp(-l).to_f64();
        }
        acc * l.exp()
    }

    pub fn derivative(&self) -> RealPoly {
        if self.n == 0 {
            return RealPoly { n: 0, coeffs: vec![SignedScaled::ZERO], exact: Some(vec![BigRational::zero()]) };
        }
        let coeffs = (1..=self.n).map(|j| self.coeffs[j].scale_exp((j as f64).ln())).collect();
        let exact = self.exact.as_ref().map(|e| {
            (1..=self.n).map(|j| &e[j] * BigRational::from_integer(BigInt::from(j))).collect()
        });
        RealPoly { n: self.n - 1, coeffs, exact }
    }
}

/// `H_n(z; s2) = sum_j (-1)^(n-j) C(n,j) exp(-s2 j(n-j)/2) z^j`.
pub fn unitary_hermite(n: usize, s2: f64) -> Result<CirclePoly> {
    if n < 1 {
        return domain("unitary_hermite needs n >= 1");
    }
    if !(s2 >= 0.0) || !s2.is_finite() {
        return domain(format!("unitary_hermite needs s2 >= 0, got {s2}"));
    }
    let row = binomial_row(n);
    let base = (0..=n)
        .map(|j| {
            let sgn = if (n - j) % 2 == 0 { 1 } else { -1 };
            CRat::new(BigRational::from_integer(&row[j] * sgn), BigRational::zero())
        })
        .collect();
    let coeffs = (0..=n)
        .map(|j| {
            let sgn = if (n - j) % 2 == 0 { 1 } else { -1 };
            let l = log_binomial(n as u64, j as u64).expect("j <= n") - 0.5 * s2 * (j * (n - j)) as f64;
            ScaledComplex::real(SignedScaled::new(sgn, l))
        })
        .collect();
    let exact = ExactForm { base, flow: s2, center2: n as i64, ln_scale: -s2 * (n * n) as f64 / 8.0 };
    Ok(CirclePoly { n, coeffs, self_inversive: true, exact: Some(exact) })
}

/// Probabilists' Hermite polynomial `He_n`.
pub fn classical_hermite(n: usize) -> RealPoly {
    let nf = factorial(n);
    let mut c = vec![BigRational::zero(); n + 1];
    for m in 0..=n / 2 {
        let den = factorial(m) * BigInt::from(2).pow(m as u32) * factorial(n - 2 * m);
        let v = BigRational::new(nf.clone(), den);
        c[n - 2 * m] = if m % 2 == 0 { v } else { -v };
    }
    RealPoly::from_rationals(c).expect("monic")
}

/// Finite free additive convolution `p ⊞_n q`.
pub fn finite_free_add(p: &RealPoly, q: &RealPoly, n: usize) -> Result<RealPoly> {
    if p.n > n || q.n > n {
        return domain(format!("finite_free_add: degrees {} and {} exceed n = {n}", p.n, q.n));
    }
    let a = |j: usize| if j <= p.n { p.coeffs[j] } else { SignedScaled::ZERO };
    let b = |j: usize| if j <= q.n { q.coeffs[j] } else { SignedScaled::ZERO };
    let lfn = log_factorial(n as u64);
    let mut out = Vec::with_capacity(n + 1);
    for l in 0..=n {
        let mut terms = Vec::new();
        for i in l..=n {
            let j = n + l - i;
            let t = ss_mul(a(i), b(j));
            if !t.is_zero() {
                terms.push(t.scale_exp(log_factorial(i as u64) + log_factorial(j as u64) - lfn - log_factorial(l as u64)));
            }
        }
        out.push(ss_sum(&terms));
    }
    while out.len() > 1 && out.last().unwrap().is_zero() {
        out.pop();
    }
    let exact = match (&p.exact, &q.exact) {
        (Some(pe), Some(qe)) => {
            let fact: Vec<BigInt> = (0..=n).map(factorial).collect();
            let mut c = Vec::with_capacity(n + 1);
            for l in 0..=n {
                let mut s = BigRational::zero();
                for i in l..=n {
                    let j = n + l - i;
                    if i <= p.n && j <= q.n {
                        s += &pe[i] * &qe[j] * BigRational::from_integer(&fact[i] * &fact[j]);
                    }
                }
                c.push(s / BigRational::from_integer(&fact[n] * &fact[l]));
            }
            while c.len() > 1 && c.last().unwrap().is_zero() {
                c.pop();
            }
            Some(c)
        }
        _ => None,
    };
    if out.last().unwrap().is_zero() {
        return domain("finite_free_add produced the zero polynomial");
    }
    Ok(RealPoly { n: out.len() - 1, coeffs: out, exact })
}

/// Finite free multiplicative convolution `p ⊠_n q`; coefficient `j` is
/// `(-1)^(n-j) a_j b_j / C(n,j)`.
pub fn finite_free_mult(p: &CirclePoly, q: &CirclePoly, n: usize) -> Result<CirclePoly> {
    if p.n > n || q.n > n {
        return domain(format!("finite_free_mult: degrees {} and {} exceed n = {n}", p.n, q.n));
    }
    let get = |x: &CirclePoly, j: usize| if j <= x.n { x.coeffs[j] } else { ScaledComplex::ZERO };
    let coeffs: Vec<ScaledComplex> = (0..=n)
        .map(|j| {
            let c = get(p, j).mul(get(q, j)).scale_exp(-log_binomial(n as u64, j as u64).expect("j <= n"));
            if (n - j) % 2 == 1 {
                c.neg()
            } else {
                c
            }
        })
        .collect();
    if coeffs[n].is_zero() {
        return domain("finite_free_mult: leading coefficient vanishes (inputs of lower degree)");
    }
    let exact = match (&p.exact, &q.exact) {
        (Some(pe), Some(qe)) if p.n == n && q.n == n && pe.center2 == n as i64 && qe.center2 == n as i64 => {
            let row = binomial_row(n);
            let base = (0..=n)
                .map(|j| {
                    let c = &pe.base[j] * &qe.base[j];
                    let d = BigRational::from_integer(row[j].clone());
                    let c = CRat::new(&c.re / &d, &c.im / &d);
                    if (n - j) % 2 == 1 {
                        -c
                    } else {
                        c
                    }
                })
                .collect();
            Some(ExactForm { base, flow: pe.flow + qe.flow, center2: n as i64, ln_scale: pe.ln_scale + qe.ln_scale })
        }
        _ => None,
    };
    Ok(CirclePoly { n, coeffs, self_inversive: p.self_inversive && q.self_inversive, exact })
}

/// Coefficients of `Q(z) = (z^2 - 2 z cos(phi) + 1)^d`.
fn cosine_factor_power(d: usize, phi: f64) -> Vec<f64> {
    let c = phi.cos();
    let mut p = vec![1.0];
    for _ in 0..d {
        let mut q = vec![0.0; p.len() + 2];
        for (i, a) in p.iter().enumerate() {
            q[i] += a;
            q[i + 1] -= 2.0 * c * a;
            q[i + 2] += a;
        }
        p = q;
    }
    p
}

/// Single factor `Q_N(z) = (z^2 - 2 z cos(sigma/sqrt(N)) + 1)^d`.
pub fn demoivre_laplace_factor(d: usize, sigma: f64, big_n: usize) -> Result<CirclePoly> {
    if d < 1 || big_n < 1 {
        return domain("demoivre_laplace needs d >= 1 and N >= 1");
    }
    let q = cosine_factor_power(d, sigma / (big_n as f64).sqrt());
    let c: Vec<Complex64> = q.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    CirclePoly::from_complex(&c)
}

/// `N`-fold `⊠_{2d}` power of `Q_N`, computed as the coefficientwise `N`-th power
/// of the per-factor multiplier `(-1)^(n-j) q_j / C(n,j)`.
pub fn demoivre_laplace_product(d: usize, sigma: f64, big_n: usize) -> Result<CirclePoly> {
    let q = demoivre_laplace_factor(d, sigma, big_n)?;
    let n = 2 * d;
    let coeffs = (0..=n)
        .map(|j| {
            let lb = log_binomial(n as u64, j as u64).expect("j <= n");
            let m = q.coeffs[j].re.scale_exp(-lb);
            let m = if (n - j) % 2 == 1 { -m } else { m };
            // Every multiplier is positive: the signs of Q alternate.
            debug_assert!(m.sign > 0);
            let sgn = if (n - j) % 2 == 0 { 1 } else { -1 };
            ScaledComplex::real(SignedScaled::new(sgn, lb + big_n as f64 * m.ln_mag))
        })
        .collect();
    CirclePoly::from_coeffs(coeffs)
}

/// Horner evaluation in double precision with max-log prescaling.
pub fn poly_eval(p: &CirclePoly, z: Complex64) -> Complex64 {
    let l = p.coeffs.iter().map(|c| c.ln_max()).fold(f64::NEG_INFINITY, f64::max);
    if l == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for c in p.coeffs.iter().rev() {
        acc = acc * z + c.scale_exp(-l).to_c64();
    }
    acc * l.exp()
}

pub fn poly_derivative(p: &CirclePoly) -> CirclePoly {
    if p.n == 0 {
        return CirclePoly { n: 0, coeffs: vec![ScaledComplex::ZERO], self_inversive: false, exact: None };
    }
    let coeffs = (1..=p.n).map(|j| p.coeffs[j].scale_exp((j as f64).ln())).collect();
    let exact = p.exact.as_ref().map(|e| ExactForm {
        base: (1..=p.n)
            .map(|j| {
                let k = BigRational::from_integer(BigInt::from(j));
                CRat::new(&e.base[j].re * &k, &e.base[j].im * &k)
            })
            .collect(),
        flow: e.flow,
        center2: e.center2 - 2,
        ln_scale: e.ln_scale,
    });
    CirclePoly { n: p.n - 1, coeffs, self_inversive: false, exact }
}

/// A value `exp(ln_abs + i arg)` with a relative error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreciseValue {
    pub ln_abs: f64,
    pub arg: f64,
    pub rel_err: f64,
    pub digits: u32,
}

impl PreciseValue {
    /// Principal logarithm.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs, self.arg)
    }
}

/// Multiprecision Horner evaluator that escalates precision until the result
/// is accurate to about double precision. Materialized weights are cached per
/// precision level, so repeated evaluations of one polynomial are cheap.
pub struct PreciseHorner {
    exact: ExactForm,
    prec: EvalPrecision,
    levels: Vec<(u32, MpWeights)>,
    cc: Consts,
    start_digits: u32,
}

impl PreciseHorner {
    pub fn new(p: &CirclePoly, prec: EvalPrecision) -> Self {
        let start_digits = prec.working_digits;
        PreciseHorner { exact: p.exact_form(), prec, levels: Vec::new(), cc: mp::consts(), start_digits }
    }

    fn level(&mut self, digits: u32) -> usize {
        if let Some(i) = self.levels.iter().position(|(d, _)| *d == digits) {
            return i;
        }
        let w = self.exact.materialize(mp::bits_for_digits(digits), &mut self.cc);
        self.levels.push((digits, w));
        self.levels.len() - 1
    }

    pub fn eval(&mut self, z: Complex64) -> Result<PreciseValue> {
        let target = 2f64.powi(-50);
        let mut digits = self.start_digits;
        loop {
            let li = self.level(digits);
            let w = &self.levels[li].1;
            let (v, bound) = horner_mp(w, z);
            let ok = v.0 > f64::NEG_INFINITY && bound <= target * (v.0 - w.ln_norm).exp();
            if ok {
                self.start_digits = digits;
                let rel = bound / (v.0 - w.ln_norm).exp();
                return Ok(PreciseValue { ln_abs: v.0, arg: v.1, rel_err: rel, digits });
            }
            let next = digits * self.prec.escalation_factor.max(2);
            if digits >= self.prec.max_digits {
                return Err(Error::Numeric(format!(
                    "polynomial value at {z} not resolved at {digits} digits"
                )));
            }
            digits = next.min(self.prec.max_digits);
        }
    }
}

/// Returns `((ln|P(z)|, arg P(z)), absolute error bound of the normalized value)`.
fn horner_mp(w: &MpWeights, z: Complex64) -> ((f64, f64), f64) {
    let p = w.bits;
    let zr = mp::f(z.re, p);
    let zi = mp::f(z.im, p);
    let mut br = mp::zero(p);
    let mut bi = mp::zero(p);
    let r = z.norm();
    let mut absum = 0.0;
    for j in (0..w.re.len()).rev() {
        let nr = br.mul(&zr, p, RM).sub(&bi.mul(&zi, p, RM), p, RM).add(&w.re[j], p, RM);
        let ni = br.mul(&zi, p, RM).add(&bi.mul(&zr, p, RM), p, RM).add(&w.im[j], p, RM);
        br = nr;
        bi = ni;
        absum = absum * r + w.abs[j];
    }
    let n = w.re.len() as f64;
    let bound = 1.01 * absum * (10.0 * (n + 1.0) * mp::unit_roundoff(p) + w.rel_err);
    let val = combine_log(mp::mant_exp_or_zero(&br), mp::mant_exp_or_zero(&bi));
    ((val.0 + w.ln_norm, val.1), bound)
}

/// `(ln|a + ib|, arg(a + ib))` from `a = ma 2^ea`, `b = mb 2^eb`.
fn combine_log(a: (f64, i64), b: (f64, i64)) -> (f64, f64) {
    if a.0 == 0.0 && b.0 == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let e = a.1.max(b.1);
    let x = mp::ldexp(a.0, a.1 - e);
    let y = mp::ldexp(b.0, b.1 - e);
    let m = x.hypot(y);
    (m.ln() + e as f64 * std::f64::consts::LN_2, y.atan2(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: &CirclePoly) -> Vec<f64> {
        p.coeffs_c64().iter().map(|c| c.re).collect()
    }

    #[test]
    fn small_hermite() {
        assert_eq!(c(&unitary_hermite(1, 0.7).unwrap()), vec![-1.0, 1.0]);
        let h2 = c(&unitary_hermite(2, 0.6).unwrap());
        assert!((h2[1] + 2.0 * (-0.3f64).exp()).abs() < 1e-15);
        assert_eq!(h2[0], 1.0);
        assert_eq!(h2[2], 1.0);
        let h5 = c(&unitary_hermite(5, 0.0).unwrap());
        assert_eq!(h5, vec![-1.0, 5.0, -10.0, 10.0, -5.0, 1.0]);
    }

    #[test]
    fn exact_form_matches_scaled() {
        let h = unitary_hermite(9, 0.37).unwrap();
        let from_exact = h.exact.as_ref().unwrap().to_scaled();
        for (a, b) in from_exact.iter().zip(&h.coeffs) {
            assert_eq!(a.re.sign, b.re.sign);
            assert!((a.re.ln_mag - b.re.ln_mag).abs() < 1e-13);
        }
        assert_eq!(h.hermite_parameter(), Some(0.37));
    }

    #[test]
    fn he_small() {
        assert_eq!(classical_hermite(1).coeffs_f64(), vec![0.0, 1.0]);
        assert_eq!(classical_hermite(2).coeffs_f64(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(classical_hermite(3).coeffs_f64(), vec![0.0, -3.0, 0.0, 1.0]);
    }

    #[test]
    fn free_add_small() {
        let p = RealPoly::from_f64(&[-1.0, 0.0, 1.0]).unwrap();
        let r = finite_free_add(&p, &p, 2).unwrap();
        let v = r.coeffs_f64();
        assert!((v[0] + 2.0).abs() < 1e-14 && v[1].abs() < 1e-14 && (v[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_and_eval() {
        let p = CirclePoly::from_complex(&[Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let d = poly_derivative(&p);
        assert_eq!(d.coeffs_c64(), vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)]);
        let h = unitary_hermite(7, 0.2).unwrap();
        assert!((poly_eval(&h, Complex64::new(0.0, 0.0)) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn precise_horner_agrees_in_benign_region() {
        let h = unitary_hermite(12, 0.1).unwrap();
        let z = Complex64::new(0.2, -0.1);
        let v = PreciseHorner::new(&h, EvalPrecision::default()).eval(z).unwrap();
        let d = poly_eval(&h, z);
        assert!((v.ln() - d.ln()).norm() < 1e-13);
    }
}
