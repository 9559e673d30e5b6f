//! Backward heat flow `exp(-(s/2)∂²)` on algebraic and trigonometric polynomials.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::circleroots::{find_roots, refine, CircleValue, EmpiricalCircleMeasure, EvalPrecision};
use crate::error::{domain, Error, Result};
use crate::mp::{self, RM};
use crate::polycore::{factorial, CirclePoly, ExactForm, RealPoly};
use crate::scaledarith::{log_factorial, ss_sum, SignedScaled};

type CRat = Complex<BigRational>;

/// `T(θ) = Σ_{ℓ=-d}^{d} c_ℓ e^{iℓθ}` with `c_{-ℓ} = conj(c_ℓ)`.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    pub d: usize,
    /// `c[ℓ + d]`.
    pub c: Vec<Complex64>,
    exact: ExactForm,
}

impl TrigPoly {
    /// From `c_{-d}..c_d`; the negative half is taken as the conjugate of the positive one.
    pub fn new(c: &[Complex64]) -> Result<Self> {
        if c.len() % 2 == 0 {
            return domain("TrigPoly needs an odd number of coefficients");
        }
        let d = c.len() / 2;
        let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for l in 0..=d {
            if (c[d + l] - c[d - l].conj()).norm() > 1e-12 * scale {
                return domain("TrigPoly coefficients must satisfy c_{-l} = conj(c_l)");
            }
        }
        if c[2 * d].norm() == 0.0 {
            return domain("TrigPoly needs c_d != 0");
        }
        let q = |x: f64| BigRational::from_float(x).expect("finite coefficient");
        let base: Vec<CRat> = (0..=2 * d)
            .map(|j| {
                let z = if j >= d { c[j] } else { c[2 * d - j].conj() };
                CRat::new(q(z.re), q(z.im))
            })
            .collect();
        Ok(Self::from_exact(d, ExactForm { base, flow: 0.0, center2: 2 * d as i64, ln_scale: 0.0 }))
    }

    fn from_exact(d: usize, exact: ExactForm) -> Self {
        let c = exact.to_c64();
        TrigPoly { d, c, exact }
    }

    /// `(sin θ/2)^{2d} = (-1)^d 4^{-d} Σ_k (-1)^k C(2d,k) e^{i(k-d)θ}`.
    pub fn sin_half_power(d: usize) -> Result<Self> {
        if d == 0 {
            return domain("sin_half_power needs d >= 1");
        }
        let n = 2 * d;
        let row = crate::polycore::binomial_row(n);
        let den = BigRational::from_integer(BigInt::one() << (2 * d));
        let base = (0..=n)
            .map(|k| {
                let sgn = if (k + d) % 2 == 0 { 1 } else { -1 };
                CRat::new(BigRational::from_integer(&row[k] * sgn) / &den, BigRational::zero())
            })
            .collect();
        Ok(Self::from_exact(d, ExactForm { base, flow: 0.0, center2: n as i64, ln_scale: 0.0 }))
    }

    pub fn coeff(&self, l: i64) -> Complex64 {
        if l.unsigned_abs() as usize > self.d {
            return Complex64::new(0.0, 0.0);
        }
        self.c[(l + self.d as i64) as usize]
    }

    /// `T(θ)` in double precision.
    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = self.c[self.d].re;
        for l in 1..=self.d {
            s += 2.0 * (self.c[self.d + l] * Complex64::from_polar(1.0, l as f64 * theta)).re;
        }
        s
    }

    /// `P(z) = z^d T` evaluated at `z = e^{iθ}`, a self-inversive polynomial of degree `2d`.
    pub fn to_circle_poly(&self) -> Result<CirclePoly> {
        CirclePoly::from_exact(self.exact.clone())
    }
}

/// Adds `s` to the flow, or to the scale when every nonzero coefficient sits at
/// the same `|ℓ|` (then the flow is a common factor and the roots are untouched).
fn flow_exact(e: &ExactForm, s: f64) -> ExactForm {
    let mut out = e.clone();
    let dists: Vec<i64> = e
        .base
        .iter()
        .enumerate()
        .filter(|(_, c)| !(c.re.is_zero() && c.im.is_zero()))
        .map(|(j, _)| (2 * j as i64 - e.center2).abs())
        .collect();
    if dists.windows(2).all(|w| w[0] == w[1]) {
        let d = dists.first().copied().unwrap_or(0) as f64 * 0.5;
        out.ln_scale += 0.5 * s * d * d;
    } else {
        out.flow += s;
    }
    out
}

/// `c_ℓ ↦ c_ℓ e^{(s/2)ℓ²}`.
pub fn backward_heat_trig(t: &TrigPoly, s: f64) -> Result<TrigPoly> {
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("heat flow needs s >= 0, got {s}"));
    }
    Ok(TrigPoly::from_exact(t.d, flow_exact(&t.exact, s)))
}

/// The same flow on a self-inversive polynomial of any degree (odd degrees carry
/// half-integer frequencies).
pub fn backward_heat_circle(p: &CirclePoly, s: f64) -> Result<CirclePoly> {
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("heat flow needs s >= 0, got {s}"));
    }
    CirclePoly::from_exact(flow_exact(&p.exact_form(), s))
}

pub fn trig_roots(t: &TrigPoly, prec: EvalPrecision) -> Result<EmpiricalCircleMeasure> {
    find_roots(&t.to_circle_poly()?, prec, 8)
}

/// `z^j ↦ Σ_m (-s/2)^m/m! · j!/(j-2m)! · z^{j-2m}`.
pub fn backward_heat_algebraic(p: &RealPoly, s: f64) -> Result<RealPoly> {
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("heat flow needs s >= 0, got {s}"));
    }
    let n = p.n;
    if let Some(e) = &p.exact {
        let sr = BigRational::from_float(s).expect("finite") / BigRational::from_integer(BigInt::from(2));
        let fact: Vec<BigInt> = (0..=n).map(factorial).collect();
        let mut spow = vec![BigRational::one()];
        for m in 1..=n / 2 {
            let next = &spow[m - 1] * -&sr;
            spow.push(next);
        }
        let mut out = vec![BigRational::zero(); n + 1];
        for (j, a) in e.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for m in 0..=j / 2 {
                let k = BigRational::new(fact[j].clone(), &fact[m] * &fact[j - 2 * m]);
                out[j - 2 * m] += a * &spow[m] * k;
            }
        }
        return RealPoly::from_rationals(out);
    }
    let ls = (0.5 * s).ln();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let terms: Vec<SignedScaled> = (0..)
            .map(|m| (m, i + 2 * m))
            .take_while(|&(_, j)| j <= n)
            .filter(|&(m, j)| !p.coeffs[j].is_zero() && (m == 0 || s > 0.0))
            .map(|(m, j)| {
                let sign = if m % 2 == 0 { 1 } else { -1 };
                let mag = m as f64 * ls + log_factorial(j as u64) - log_factorial(m as u64) - log_factorial(i as u64);
                let mag = if m == 0 { log_factorial(j as u64) - log_factorial(i as u64) } else { mag };
                SignedScaled::new(sign * p.coeffs[j].sign, p.coeffs[j].ln_mag + mag)
            })
            .collect();
        out.push(ss_sum(&terms));
    }
    RealPoly::from_scaled(out)
}

/// `s^{n/2} He_n(z/√s) = Σ_m n!/(m! 2^m (n-2m)!) (-s)^m z^{n-2m}`, exact in `s`.
pub fn scaled_hermite(n: usize, s: f64) -> Result<RealPoly> {
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("scaled_hermite needs s >= 0, got {s}"));
    }
    let sr = BigRational::from_float(s).expect("finite");
    let mut c = vec![BigRational::zero(); n + 1];
    let mut spow = BigRational::one();
    for m in 0..=n / 2 {
        let den = factorial(m) * (BigInt::one() << m) * factorial(n - 2 * m);
        let v = BigRational::new(factorial(n), den) * &spow;
        c[n - 2 * m] = if m % 2 == 0 { v } else { -v };
        spow = &spow * &sr;
    }
    RealPoly::from_rationals(c)
}

struct RealWeights {
    bits: usize,
    coeffs: Vec<BigFloat>,
    abs: Vec<BigFloat>,
}

/// Certified-sign evaluator of a real polynomial on the real line.
struct RealEvaluator {
    exact: Vec<BigRational>,
    levels: Vec<u32>,
    cache: Vec<Option<RealWeights>>,
    hint: usize,
}

impl RealEvaluator {
    fn new(p: &RealPoly, prec: EvalPrecision) -> Self {
        let levels = prec.levels();
        RealEvaluator { exact: p.exact_coeffs(), cache: levels.iter().map(|_| None).collect(), levels, hint: 0 }
    }

    fn eval_level(&mut self, x: f64, li: usize) -> CircleValue {
        if self.cache[li].is_none() {
            let bits = mp::bits_for_digits(self.levels[li]);
            let coeffs: Vec<BigFloat> = self.exact.iter().map(|r| mp::from_ratio(r, bits)).collect();
            let abs = coeffs.iter().map(|c| c.abs()).collect();
            self.cache[li] = Some(RealWeights { bits, coeffs, abs });
        }
        let w = self.cache[li].as_ref().unwrap();
        let p = w.bits;
        let xb = mp::f(x, p);
        let xa = xb.abs();
        let mut acc = mp::zero(p);
        let mut aacc = mp::zero(p);
        for (c, a) in w.coeffs.iter().zip(&w.abs).rev() {
            acc = acc.mul(&xb, p, RM).add(c, p, RM);
            aacc = aacc.mul(&xa, p, RM).add(a, p, RM);
        }
        let n = self.exact.len() as f64;
        let u = mp::unit_roundoff(p);
        if aacc.is_zero() {
            return CircleValue { value: 0.0, abs_error_bound: 0.0, ln_scale: 0.0, digits: self.levels[li] };
        }
        let ratio = mp::to_f64(&acc.div(&aacc, p, RM));
        CircleValue {
            value: ratio,
            abs_error_bound: (1.05 * (2.0 * n + 3.0) + 2.0) * u,
            ln_scale: mp::log2_abs(&aacc) * std::f64::consts::LN_2,
            digits: self.levels[li],
        }
    }

    fn eval(&mut self, x: f64) -> CircleValue {
        let mut li = self.hint.min(self.levels.len() - 1);
        loop {
            let v = self.eval_level(x, li);
            if v.certified_sign().is_some() || li + 1 == self.levels.len() {
                // Stay one level lower when the margin is comfortable.
                self.hint = if v.certified_sign().is_some() && li > 0 && v.value.abs() > 1e12 * v.abs_error_bound * 2f64.powi(64) {
                    li - 1
                } else {
                    li
                };
                return v;
            }
            li += 1;
        }
    }
}

/// Fujiwara's bound on the moduli of the roots.
fn fujiwara_bound(p: &RealPoly) -> f64 {
    let n = p.n;
    let lead = p.coeffs[n].ln_mag;
    let mut b = f64::NEG_INFINITY;
    for k in 1..=n {
        let c = p.coeffs[n - k];
        if c.is_zero() {
            continue;
        }
        let mut l = c.ln_mag - lead;
        if k == n {
            l -= std::f64::consts::LN_2;
        }
        b = b.max(l / k as f64);
    }
    if b == f64::NEG_INFINITY {
        return 0.0;
    }
    2.0 * b.exp()
}

/// All real roots, sorted, each certified by a sign change.
pub fn real_roots_algebraic(p: &RealPoly, prec: EvalPrecision) -> Result<Vec<f64>> {
    let n = p.n;
    if n == 0 {
        return Ok(vec![]);
    }
    let b = fujiwara_bound(p) * 1.01;
    if b == 0.0 {
        // a z^n
        return Ok(vec![0.0; n]);
    }
    let mut ev = RealEvaluator::new(p, prec);
    let max_digits = prec.max_digits;
    let mut found = 0;
    let mut mult = 8;
    while mult <= 8 * 64 {
        let big_n = mult * n + 1;
        let h = 2.0 * b / big_n as f64;
        let mut pts = Vec::with_capacity(big_n + 1);
        for k in 0..=big_n {
            let mut x = -b + k as f64 * h;
            let mut s = ev.eval(x).certified_sign();
            let mut tries = 0;
            while s.is_none() && tries < 3 && k > 0 && k < big_n {
                tries += 1;
                x = -b + (k as f64 + 1e-3 * tries as f64) * h;
                s = ev.eval(x).certified_sign();
            }
            let s = s.ok_or(Error::Certification { found: 0, expected: n, digits: max_digits })?;
            pts.push((x, s));
        }
        let brackets: Vec<(f64, i8, f64)> =
            pts.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| (w[0].0, w[0].1, w[1].0)).collect();
        found = brackets.len();
        if found > n {
            return Err(Error::Numeric(format!("{found} sign changes for a degree-{n} polynomial")));
        }
        if found == n {
            let mut roots: Vec<f64> = brackets.into_iter().map(|(a, sa, c)| refine(&mut |x| ev.eval(x), a, sa, c).0).collect();
            roots.sort_by(f64::total_cmp);
            return Ok(roots);
        }
        mult *= 2;
    }
    Err(Error::Certification { found, expected: n, digits: max_digits })
}

/// Free cumulants `κ_1..κ_K` from moments `m_1..m_K` via
/// `m_n = Σ_{s=1}^{n} κ_s [z^{n-s}] M(z)^s`, `M(z) = 1 + Σ m_i z^i`.
pub fn free_cumulants_from_moments(m: &[f64]) -> Vec<f64> {
    let k = m.len();
    let mut kappa = Vec::with_capacity(k);
    for n in 1..=k {
        let mix: f64 = (1..n).map(|s| kappa[s - 1] * power_coeff(m, s, n - s)).sum();
        kappa.push(m[n - 1] - mix);
    }
    kappa
}

/// Inverse of [`free_cumulants_from_moments`].
pub fn moments_from_free_cumulants(kappa: &[f64]) -> Vec<f64> {
    let k = kappa.len();
    let mut m: Vec<f64> = Vec::with_capacity(k);
    for n in 1..=k {
        let mix: f64 = (1..n).map(|s| kappa[s - 1] * power_coeff(&m, s, n - s)).sum();
        m.push(kappa[n - 1] + mix);
    }
    m
}

/// `[z^r] M(z)^s` with `M = 1 + m_1 z + m_2 z^2 + ...`; needs `m_1..m_r`.
fn power_coeff(m: &[f64], s: usize, r: usize) -> f64 {
    let mut base = vec![1.0];
    base.extend_from_slice(&m[..r.min(m.len())]);
    base.resize(r + 1, 0.0);
    let mut acc = vec![0.0; r + 1];
    acc[0] = 1.0;
    for _ in 0..s {
        let mut next = vec![0.0; r + 1];
        for (i, a) in acc.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in base.iter().enumerate().take(r + 1 - i) {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc[r]
}

/// Empirical moment `(1/n) Σ x_i^k`.
pub fn empirical_real_moment(roots: &[f64], k: i32) -> f64 {
    roots.iter().map(|x| x.powi(k)).sum::<f64>() / roots.len() as f64
}

/// Exact power sum `(1/n) Σ x_i^k` of the roots, from the coefficients by Newton's identities.
pub fn exact_power_sums(p: &RealPoly, k_max: usize) -> Result<Vec<f64>> {
    let c = p.exact_coeffs();
    let n = p.n;
    if k_max > n {
        return domain("k exceeds the degree");
    }
    // e_k = (-1)^k c_{n-k} / c_n
    let e: Vec<BigRational> = (0..=k_max)
        .map(|k| {
            let v = &c[n - k] / &c[n];
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    let mut ps: Vec<BigRational> = vec![BigRational::from_integer(BigInt::from(n))];
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut s = &e[k] * BigRational::from_integer(BigInt::from(k as i64 * if k % 2 == 1 { 1 } else { -1 }));
        for i in 1..k {
            let t = &e[k - i] * &ps[i];
            if (k - 1 + i) % 2 == 0 {
                s += t;
            } else {
                s -= t;
            }
        }
        out.push(mp::to_f64(&mp::from_ratio(&(&s / BigRational::from_integer(BigInt::from(n))), 128)));
        ps.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_squared_flow() {
        let p = RealPoly::from_f64(&[0.0, 0.0, 1.0]).unwrap();
        let q = backward_heat_algebraic(&p, 0.3).unwrap();
        assert_eq!(q.coeffs_f64(), vec![-0.3, 0.0, 1.0]);
        let r = real_roots_algebraic(&q, EvalPrecision::default()).unwrap();
        assert!((r[0] + 0.3f64.sqrt()).abs() < 1e-12 && (r[1] - 0.3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn he4_roots() {
        let r = real_roots_algebraic(&scaled_hermite(4, 1.0).unwrap(), EvalPrecision::default()).unwrap();
        let s6 = 6f64.sqrt();
        let want = [-(3.0 + s6).sqrt(), -(3.0 - s6).sqrt(), (3.0 - s6).sqrt(), (3.0 + s6).sqrt()];
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulant_examples() {
        let k = free_cumulants_from_moments(&[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(k, vec![0.0, 1.0, 0.0, -1.0]);
        let r2 = 0.49;
        let k = free_cumulants_from_moments(&[0.0, r2, 0.0, 2.0 * r2 * r2]);
        assert!(k.iter().zip([0.0, r2, 0.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-15));
        let m = moments_from_free_cumulants(&[0.0, 1.0 + r2, 0.0, -1.0]);
        assert!((m[1] - (1.0 + r2)).abs() < 1e-15);
        assert!((m[3] - (1.0 + 4.0 * r2 + 2.0 * r2 * r2)).abs() < 1e-14);
    }

    #[test]
    fn two_root_trig_flow() {
        let a = 0.9f64;
        let t = TrigPoly::new(&[Complex64::new(0.5, 0.0), Complex64::new(-a.cos(), 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        let s = 0.7;
        let r = trig_roots(&backward_heat_trig(&t, s).unwrap(), EvalPrecision::default()).unwrap();
        let want = ((-s / 2.0).exp() * a.cos()).acos();
        assert!((r.angles[0] + want).abs() < 1e-12 && (r.angles[1] - want).abs() < 1e-12, "{:?}", r.angles);
    }
}
