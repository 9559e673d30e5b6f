//! Certified isolation of the zeros of self-inversive polynomials on the unit
//! circle, and statistics of the resulting empirical measures.
//!
//! On `z = e^{iθ}` a self-inversive polynomial satisfies
//! `P(e^{iθ}) e^{-inθ/2} = i^κ r(θ)` with `r` real, so all zeros are sign
//! changes of `r`. The circle function is summed by Clenshaw's recurrence in
//! multiprecision arithmetic with a rigorous-style forward error bound; a node
//! is trusted only when its value exceeds that bound.

use astro_float::{BigFloat, Consts};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::mp::{self, RM};
use crate::polycore::{poly_derivative, CirclePoly, ExactForm, PreciseHorner};

/// Environment variable overriding the default working digits.
pub const DIGITS_ENV: &str = "UHERMITE_DIGITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPrecision {
    pub working_digits: u32,
    pub escalation_factor: u32,
    pub max_digits: u32,
}

impl Default for EvalPrecision {
    fn default() -> Self {
        EvalPrecision { working_digits: 32, escalation_factor: 2, max_digits: 256 }
    }
}

impl EvalPrecision {
    pub fn new(working_digits: u32, escalation_factor: u32, max_digits: u32) -> Result<Self> {
        if working_digits < 16 {
            return domain(format!("working_digits must be at least 16, got {working_digits}"));
        }
        if escalation_factor < 2 {
            return domain("escalation_factor must be at least 2");
        }
        if max_digits < working_digits {
            return domain("max_digits must not be below working_digits");
        }
        Ok(EvalPrecision { working_digits, escalation_factor, max_digits })
    }

    /// Defaults, with working digits taken from [`DIGITS_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut p = Self::default();
        if let Ok(v) = std::env::var(DIGITS_ENV) {
            let d: u32 = v.trim().parse().map_err(|_| Error::Domain(format!("{DIGITS_ENV}={v} is not an integer")))?;
            p = Self::new(d, p.escalation_factor, p.max_digits.max(d))?;
        }
        Ok(p)
    }

    pub(crate) fn levels(&self) -> Vec<u32> {
        let mut v = vec![self.working_digits];
        let mut d = self.working_digits;
        while d < self.max_digits {
            d = (d * self.escalation_factor).min(self.max_digits);
            v.push(d);
        }
        v
    }
}

/// Angles of the zeros, sorted in `(-π, π]`, repeated by multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCircleMeasure {
    pub angles: Vec<f64>,
    pub enclosure_width: f64,
}

impl EmpiricalCircleMeasure {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Value of the real circle function `r(θ)` in units of `exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleValue {
    pub value: f64,
    pub abs_error_bound: f64,
    pub ln_scale: f64,
    pub digits: u32,
}

impl CircleValue {
    pub fn certified_sign(&self) -> Option<i8> {
        if self.value.abs() > self.abs_error_bound {
            Some(if self.value > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }
}

struct CircleWeights {
    bits: usize,
    /// Cosine coefficients, frequency `m + δ`.
    a: Vec<BigFloat>,
    /// Sine coefficients, frequency `m + δ`.
    b: Vec<BigFloat>,
    a_abs: f64,
    b_abs: f64,
    rel_err: f64,
    ln_norm: f64,
}

/// Reusable evaluator of the circle function of one polynomial.
pub struct CircleEvaluator {
    exact: ExactForm,
    n: usize,
    prec: EvalPrecision,
    levels: Vec<u32>,
    cache: Vec<Option<CircleWeights>>,
    cc: Consts,
    hint: usize,
}

impl CircleEvaluator {
    pub fn new(p: &CirclePoly, prec: EvalPrecision) -> Result<Self> {
        if !p.self_inversive {
            return domain("circle function needs a self-inversive polynomial");
        }
        let levels = prec.levels();
        Ok(CircleEvaluator {
            exact: p.exact_form(),
            n: p.n,
            prec,
            cache: levels.iter().map(|_| None).collect(),
            levels,
            cc: mp::consts(),
            hint: 0,
        })
    }

    fn ensure_weights(&mut self, li: usize) {
        if self.cache[li].is_none() {
            let bits = mp::bits_for_digits(self.levels[li]);
            let w = self.exact.materialize(bits, &mut self.cc);
            let n = self.n;
            let two = mp::f(2.0, bits);
            let (mut a, mut b, mut aa, mut ba) = (Vec::new(), Vec::new(), 0.0, 0.0);
            if n % 2 == 0 {
                let h = n / 2;
                a.push(w.re[h].clone());
                b.push(mp::zero(bits));
                aa += w.abs[h];
                for m in 1..=h {
                    let j = h + m;
                    a.push(w.re[j].mul(&two, bits, RM));
                    b.push(w.im[j].mul(&two, bits, RM).neg());
                    aa += 2.0 * w.abs[j];
                    ba += 2.0 * w.abs[j];
                }
            } else {
                let h = n.div_ceil(2);
                for m in 0..=(n - h) {
                    let j = h + m;
                    a.push(w.im[j].mul(&two, bits, RM));
                    b.push(w.re[j].mul(&two, bits, RM));
                    aa += 2.0 * w.abs[j];
                    ba += 2.0 * w.abs[j];
                }
            }
            // Zero-free series are skipped entirely.
            if a.iter().all(|x| x.is_zero()) {
                aa = 0.0;
            }
            if b.iter().all(|x| x.is_zero()) {
                ba = 0.0;
            }
            self.cache[li] = Some(CircleWeights { bits, a, b, a_abs: aa, b_abs: ba, rel_err: w.rel_err, ln_norm: w.ln_norm });
        }
    }

    fn eval_level(&mut self, theta: f64, li: usize) -> CircleValue {
        let odd = self.n % 2 == 1;
        let digits = self.levels[li];
        self.ensure_weights(li);
        let w = self.cache[li].as_ref().unwrap();
        let cc = &mut self.cc;
        let p = w.bits;
        let th = mp::f(theta, p);
        let (alpha, y_cos, y_sin) = if odd {
            let half = mp::f(0.5 * theta, p);
            (th.cos(p, RM, cc).mul(&mp::f(2.0, p), p, RM), half.cos(p, RM, cc), half.sin(p, RM, cc))
        } else {
            let c = th.cos(p, RM, cc);
            (c.mul(&mp::f(2.0, p), p, RM), c, th.sin(p, RM, cc))
        };
        let mut total = mp::zero(p);
        let mut bsum = 0.0;
        let mut fin = 0.0;
        for (coef, absum, is_cos) in [(&w.a, w.a_abs, true), (&w.b, w.b_abs, false)] {
            if absum == 0.0 {
                continue;
            }
            let mut b1 = mp::zero(p);
            let mut b2 = mp::zero(p);
            for c in coef.iter().rev() {
                let b0 = c.add(&alpha.mul(&b1, p, RM), p, RM).sub(&b2, p, RM);
                bsum += mp::to_f64(&b0).abs();
                b2 = b1;
                b1 = b0;
            }
            // After the loop b1 = b_0 and b2 = b_1.
            let (b0, b1) = (b1, b2);
            fin += mp::to_f64(&b0).abs() + mp::to_f64(&b1).abs();
            let s = match (odd, is_cos) {
                (false, true) => b0.sub(&b1.mul(&y_cos, p, RM), p, RM),
                (false, false) => b1.mul(&y_sin, p, RM),
                (true, true) => b0.sub(&b1, p, RM).mul(&y_cos, p, RM),
                (true, false) => b0.add(&b1, p, RM).mul(&y_sin, p, RM),
            };
            total = total.add(&s, p, RM);
        }
        let u = mp::unit_roundoff(p);
        let asum = w.a_abs + w.b_abs;
        let bound = 1.05 * (u * (8.0 * asum + 20.0 * bsum + 4.0 * fin) + w.rel_err * asum);
        CircleValue { value: mp::to_f64(&total), abs_error_bound: bound, ln_scale: w.ln_norm, digits }
    }

    /// Evaluates at the working precision, escalating until the sign is certified
    /// or the maximum precision is reached.
    pub fn eval(&mut self, theta: f64) -> CircleValue {
        let mut li = self.hint.min(self.levels.len() - 1);
        loop {
            let v = self.eval_level(theta, li);
            if v.certified_sign().is_some() || li + 1 == self.levels.len() {
                self.update_hint(li, &v);
                return v;
            }
            li += 1;
        }
    }

    fn update_hint(&mut self, li: usize, v: &CircleValue) {
        if v.certified_sign().is_none() {
            self.hint = li;
            return;
        }
        let margin = (v.value.abs() / v.abs_error_bound).log2();
        let bits = mp::bits_for_digits(self.levels[li]) as f64;
        let mut best = li;
        for k in (0..li).rev() {
            let drop = bits - mp::bits_for_digits(self.levels[k]) as f64;
            if margin - drop >= 40.0 {
                best = k;
            } else {
                break;
            }
        }
        self.hint = best;
    }

    fn sign(&mut self, theta: f64) -> Option<i8> {
        self.eval(theta).certified_sign()
    }

    pub fn max_digits(&self) -> u32 {
        self.prec.max_digits
    }
}

/// The real circle function `r(θ)` (up to a positive constant) with an error bound.
pub fn circle_function(p: &CirclePoly, theta: f64, prec: EvalPrecision) -> Result<CircleValue> {
    let mut ev = CircleEvaluator::new(p, prec)?;
    Ok(ev.eval(theta))
}

/// Normalizes an angle to `(-π, π]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut x = t.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

pub(crate) const ROOT_TOL: f64 = 1e-12;

/// All `n` zeros on the unit circle, each certified by a sign change.
pub fn find_roots(p: &CirclePoly, prec: EvalPrecision, grid_multiplier: usize) -> Result<EmpiricalCircleMeasure> {
    if !p.self_inversive {
        return domain("find_roots needs a self-inversive polynomial");
    }
    let n = p.n;
    if n == 0 {
        return Ok(EmpiricalCircleMeasure { angles: vec![], enclosure_width: 0.0 });
    }
    if p.hermite_parameter() == Some(0.0) {
        // (z - 1)^n: a single zero of known multiplicity.
        return Ok(EmpiricalCircleMeasure { angles: vec![0.0; n], enclosure_width: 0.0 });
    }
    let mut ev = CircleEvaluator::new(p, prec)?;
    let base_mult = grid_multiplier.max(1);
    let mut mult = base_mult;
    let mut found = 0;
    while mult <= base_mult * 64 {
        let big_n = (mult * n).max(16).next_multiple_of(2);
        let h = 2.0 * PI / big_n as f64;
        let half = big_n as f64 / 2.0;
        let node = |k: usize| (k as f64 + 0.5 - half) * h;
        let mut signs = Vec::with_capacity(big_n);
        let mut thetas = Vec::with_capacity(big_n);
        for k in 0..big_n {
            let mut t = node(k);
            let mut s = ev.sign(t);
            let mut tries = 0;
            while s.is_none() && tries < 3 {
                // A zero sits on the node itself: nudge it inside the cell.
                tries += 1;
                t = node(k) + h * 1e-3 * tries as f64;
                s = ev.sign(t);
            }
            let s = s.ok_or(Error::Certification { found: 0, expected: n, digits: ev.max_digits() })?;
            signs.push(s);
            thetas.push(t);
        }
        let wrap_sign = if n % 2 == 0 { signs[0] } else { -signs[0] };
        let mut brackets = Vec::new();
        for k in 0..big_n {
            let (t1, s1) = if k + 1 < big_n { (thetas[k + 1], signs[k + 1]) } else { (thetas[0] + 2.0 * PI, wrap_sign) };
            if signs[k] != s1 {
                brackets.push((thetas[k], signs[k], t1));
            }
        }
        found = brackets.len();
        if found > n {
            return Err(Error::Numeric(format!("{found} sign changes for a degree-{n} polynomial")));
        }
        if found == n {
            let mut width: f64 = 0.0;
            let mut angles = Vec::with_capacity(n);
            for (a, sa, b) in brackets {
                let (root, w) = refine(&mut |x| ev.eval(x), a, sa, b);
                width = width.max(w);
                angles.push(wrap_angle(root));
            }
            angles.sort_by(f64::total_cmp);
            return Ok(EmpiricalCircleMeasure { angles, enclosure_width: width });
        }
        mult *= 2;
    }
    Err(Error::Certification { found, expected: n, digits: ev.max_digits() })
}

/// Illinois-accelerated bisection inside a certified bracket, closed by a
/// secant step. Returns the root estimate and the final bracket width.
pub(crate) fn refine<F: FnMut(f64) -> CircleValue>(ev: &mut F, mut a: f64, sa: i8, mut b: f64) -> (f64, f64) {
    let mut fa = ev(a).value;
    let mut fb = ev(b).value;
    let mut side = 0i8;
    let mut stalls = 0;
    for _ in 0..200 {
        let w = b - a;
        if w <= ROOT_TOL {
            break;
        }
        let mut x = if stalls >= 3 || !(fa.is_finite() && fb.is_finite()) || fa == fb {
            stalls = 0;
            0.5 * (a + b)
        } else {
            a - fa * (b - a) / (fb - fa)
        };
        let guard = 0.25 * ROOT_TOL;
        x = x.clamp(a + guard, b - guard);
        if !(x > a && x < b) {
            break;
        }
        let v = ev(x);
        let Some(s) = v.certified_sign() else {
            // Unresolvable at the maximum precision: the zero is here.
            return (x, w);
        };
        if s == sa {
            a = x;
            fa = v.value;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = v.value;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if b - a > 0.5 * w {
            stalls += 1;
        } else {
            stalls = 0;
        }
    }
    let x = if fa.is_finite() && fb.is_finite() && fa != fb { a - fa * (b - a) / (fb - fa) } else { 0.5 * (a + b) };
    (x.clamp(a, b), b - a)
}

/// `(1/n) Σ e^{ikθ_j}`.
pub fn empirical_moment(m: &EmpiricalCircleMeasure, k: i64) -> Complex64 {
    if m.angles.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let s: Complex64 = m.angles.iter().map(|&t| Complex64::from_polar(1.0, k as f64 * t)).sum();
    s / m.angles.len() as f64
}

/// Power sums `p_{k:n} = (1/n) Σ z_j^k`, `k = 1..K`, of the zeros of
/// `H_n(·; σ²/n)` from its elementary symmetric polynomials
/// `e_k = C(n,k) exp(-σ² k(n-k)/(2n))` via the Newton-Girard recursion.
pub fn newton_girard_reference(n: usize, sigma2: f64, k_max: usize) -> Result<Vec<f64>> {
    if k_max > n {
        return domain(format!("K = {k_max} exceeds n = {n}"));
    }
    if !(sigma2 >= 0.0) {
        return domain("sigma2 must be nonnegative");
    }
    // The recursion cancels about n^(k-1); carry enough bits for that.
    let bits = (128.0 + 1.2 * k_max as f64 * (n.max(2) as f64).log2()).ceil() as usize;
    let p = bits.next_multiple_of(64);
    let mut cc = mp::consts();
    let row = crate::polycore::binomial_row(n);
    let e: Vec<BigFloat> = (0..=k_max)
        .map(|k| {
            // Form the exponent in full precision; rounding it to f64 first is
            // amplified by the recursion.
            let x = mp::f(-sigma2, p).mul(&mp::f((k * (n - k)) as f64, p), p, RM).div(&mp::f(2.0 * n as f64, p), p, RM);
            let w = x.exp(p, RM, &mut cc);
            let mut c = mp::from_bigint(&row[k]);
            c.set_precision(p, RM).expect("precision");
            c.mul(&w, p, RM)
        })
        .collect();
    let mut ps: Vec<BigFloat> = vec![mp::f(n as f64, p)];
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let sgn = |i: usize| if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut s = e[k].mul(&mp::f(sgn(k - 1) * k as f64, p), p, RM);
        for i in 1..k {
            let t = e[k - i].mul(&ps[i], p, RM).mul(&mp::f(sgn(k - 1 + i), p), p, RM);
            s = s.add(&t, p, RM);
        }
        out.push(mp::to_f64(&s) / n as f64);
        ps.push(s);
    }
    Ok(out)
}

/// `ψ(z) = -(z/n) P'(z)/P(z)` for `|z| < 1`, evaluated in multiprecision.
pub fn psi_empirical(p: &CirclePoly, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return domain("psi_empirical needs |z| < 1");
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let prec = EvalPrecision::default();
    let v = PreciseHorner::new(p, prec).eval(z)?;
    let d = PreciseHorner::new(&poly_derivative(p), prec).eval(z)?;
    Ok(-(z / p.n as f64) * (d.ln() - v.ln()).exp())
}

/// Kolmogorov distance between the empirical measure and a continuous CDF on `[-π, π]`.
pub fn kolmogorov_distance<F: FnMut(f64) -> f64>(m: &EmpiricalCircleMeasure, mut cdf: F) -> f64 {
    let n = m.angles.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &t) in m.angles.iter().enumerate() {
        let f = cdf(t);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::unitary_hermite;

    #[test]
    fn degree_one_and_two() {
        let r = find_roots(&unitary_hermite(1, 0.4).unwrap(), EvalPrecision::default(), 8).unwrap();
        assert_eq!(r.angles.len(), 1);
        assert!(r.angles[0].abs() < 1e-12);
        let r = find_roots(&unitary_hermite(2, 1.0).unwrap(), EvalPrecision::default(), 8).unwrap();
        let a = (-0.5f64).exp().acos();
        assert!((r.angles[0] + a).abs() < 1e-12 && (r.angles[1] - a).abs() < 1e-12, "{:?}", r.angles);
    }

    #[test]
    fn multiple_root_at_zero_flow() {
        let r = find_roots(&unitary_hermite(6, 0.0).unwrap(), EvalPrecision::default(), 8).unwrap();
        assert_eq!(r.angles, vec![0.0; 6]);
    }

    #[test]
    fn circle_function_sign_structure() {
        let h = unitary_hermite(3, 0.0).unwrap();
        let prec = EvalPrecision::default();
        // r ∝ sin(θ/2)^3
        let a = circle_function(&h, 0.5, prec).unwrap();
        let b = circle_function(&h, -0.5, prec).unwrap();
        assert!(a.value * b.value < 0.0);
        let ratio = a.value / (0.25f64).sin().powi(3);
        let c = circle_function(&h, 2.0, prec).unwrap();
        assert!((c.value / (1.0f64).sin().powi(3) - ratio).abs() < 1e-12 * ratio.abs());
    }

    #[test]
    fn newton_girard_first_power_sum() {
        let p = newton_girard_reference(50, 1.0, 3).unwrap();
        assert!((p[0] - (-(49.0 / 100.0f64)).exp()).abs() < 1e-15);
    }
}
