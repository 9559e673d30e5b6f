//! Saddle-point asymptotics of `H_n(z; σ²/n)` inside the unit disk.
//!
//! With `z = -e^{iθ}`, `Im θ > 0`, and `ζ = ζ_{σ²/4}(θ/2)`, everything is written
//! through `q = e^{2iζ}`, `|q| < 1`, which stays bounded as `z → 0`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::circleroots::EvalPrecision;
use crate::error::{domain, Result};
use crate::polycore::{poly_derivative, poly_eval, unitary_hermite, PreciseHorner};
use crate::quad;
use crate::zetasolver::{zeta, ZetaConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub t0: Complex64,
    pub s_at_saddle: Complex64,
    pub d2s: Complex64,
}

fn check_disk(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return domain(format!("|z| < 1 required, got {z}"));
    }
    Ok(())
}

fn check_s2(s2: f64) -> Result<()> {
    if !(s2 > 0.0) || !s2.is_finite() {
        return domain(format!("σ² must be positive, got {s2}"));
    }
    Ok(())
}

/// `θ = -i log(-z)`, so that `z = -e^{iθ}` with `Im θ > 0`.
pub fn theta_of(z: Complex64) -> Complex64 {
    -Complex64::i() * (-z).ln()
}

/// `ζ_{σ²/4}(θ/2)` and `q = e^{2iζ}`.
fn zeta_half(theta: Complex64, s2: f64) -> Result<(Complex64, Complex64)> {
    let zt = zeta(0.25 * s2, 0.5 * theta, &ZetaConfig::default())?.zeta;
    Ok((zt, (2.0 * Complex64::i() * zt).exp()))
}

/// `S(t; z) = log(1 - z e^t) - (t/σ + σ/2)²/2`.
#[allow(non_snake_case)]
pub fn S(t: Complex64, z: Complex64, s2: f64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    if !(t.re < 0.0) {
        return domain("S needs Re t < 0");
    }
    let s = s2.sqrt();
    let g = t / s + s / 2.0;
    Ok((1.0 - z * t.exp()).ln() - 0.5 * g * g)
}

/// `∂S/∂t = -z e^t/(1 - z e^t) - (t/σ + σ/2)/σ`.
pub fn ds_dt(t: Complex64, z: Complex64, s2: f64) -> Complex64 {
    let s = s2.sqrt();
    let w = z * t.exp();
    -w / (1.0 - w) - (t / s + s / 2.0) / s
}

/// Saddle point `t₀ = (iσ²/2) tan ζ`, from `θ` directly (any branch of `θ`).
pub fn t0_theta(theta: Complex64, s2: f64) -> Result<Complex64> {
    check_s2(s2)?;
    let (_, q) = zeta_half(theta, s2)?;
    // i tan ζ = -(1 - q)/(1 + q)
    Ok(-0.5 * s2 * (1.0 - q) / (1.0 + q))
}

pub fn t0(z: Complex64, s2: f64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(-0.5 * s2, 0.0));
    }
    t0_theta(theta_of(z), s2)
}

/// `lim (1/n) log(H_n(z;σ²/n)/(-1)^n) = log(1 + e^{2iζ}) - σ²/(2(1 + e^{-2iζ})²)`.
#[allow(non_snake_case)]
pub fn limit_logH(z: Complex64, s2: f64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (_, q) = zeta_half(theta_of(z), s2)?;
    let r = q / (1.0 + q);
    Ok((1.0 + q).ln() - 0.5 * s2 * r * r)
}

/// `lim (1/n) H_n'/H_n = -e^{-iθ}/(1 + e^{-2iζ})`.
pub fn limit_logderivative(z: Complex64, s2: f64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(-(-0.5 * s2).exp(), 0.0));
    }
    let th = theta_of(z);
    let (zt, q) = zeta_half(th, s2)?;
    Ok(-(Complex64::i() * (2.0 * zt - th)).exp() / (1.0 + q))
}

/// `∂²S/∂t²` at the saddle: `1/(4 cos² ζ) - 1/σ²`, which is `-w/(1 - w)² - 1/σ²`
/// with `w = z e^{t₀}`.
#[allow(non_snake_case)]
pub fn d2S(z: Complex64, s2: f64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(-1.0 / s2, 0.0));
    }
    let (_, q) = zeta_half(theta_of(z), s2)?;
    Ok(q / ((1.0 + q) * (1.0 + q)) - 1.0 / s2)
}

pub fn saddle_data(z: Complex64, s2: f64) -> Result<SaddleData> {
    let t = t0(z, s2)?;
    Ok(SaddleData { t0: t, s_at_saddle: limit_logH(z, s2)?, d2s: d2S(z, s2)? })
}

#[allow(non_snake_case)]
/// `H_n(z;σ²/n) = (-1)^n √(n/(2πσ²)) ∫ (1 - z e^t)^n e^{-(n/2)(t/σ + σ/2)²} dt`
/// on the real line, cut where the Gaussian drops below `1e-20` of its peak.
pub fn integral_Hn(n: usize, s2: f64, z: Complex64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    if n == 0 {
        return domain("integral_Hn needs n >= 1");
    }
    let s = s2.sqrt();
    let nf = n as f64;
    let c = -0.5 * s2;
    let w = s * (2.0 * 20.0 * std::f64::consts::LN_10 / nf).sqrt();
    let f = |t: f64| {
        let g = t / s + s / 2.0;
        (1.0 - z * t.exp()).powu(n as u32) * (-0.5 * nf * g * g).exp()
    };
    // Absolute scale of the integrand for the stopping rule.
    let scale = quad::integrate(|t| f(t).norm(), c - w, c + w, &[c], 1e-300, 1e-6)?.value;
    let r = quad::integrate(f, c - w, c + w, &[c], 1e-15 * scale, 1e-14)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (nf / (2.0 * PI * s2)).sqrt() * r.value)
}

/// Steps for following a function along the segment `[0, z]`.
fn radial_steps(n: usize, r: f64) -> usize {
    (n as f64 * r / (1.0 - r)).ceil() as usize + 16
}

/// `√(-1/(σ² ∂²S)) e^{n S(t₀)}`, the predicted `H_n(z;σ²/n)/(-1)^n`.
/// The square root is continued from the value `1` at `z = 0` along the radius.
pub fn prefactor_asymptotics(n: usize, s2: f64, z: Complex64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    let steps = 64;
    let mut arg = 0.0;
    let mut w = Complex64::new(1.0, 0.0);
    for k in 1..=steps {
        let zk = z * (k as f64 / steps as f64);
        w = -1.0 / (s2 * d2S(zk, s2)?);
        let a = w.arg();
        arg += wrap_pi(a - arg);
    }
    let root = Complex64::from_polar(w.norm().sqrt(), 0.5 * arg);
    Ok(root * (n as f64 * limit_logH(z, s2)?).exp())
}

fn wrap_pi(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// `log(H_n(z;σ²/n)/(-1)^n)` in multiprecision, with the branch fixed by
/// continuation from `log 1 = 0` at `z = 0` along the radius.
pub fn log_hn(n: usize, s2: f64, z: Complex64) -> Result<Complex64> {
    check_disk(z)?;
    check_s2(s2)?;
    let p = unitary_hermite(n, s2 / n as f64)?;
    let mut ev = PreciseHorner::new(&p, EvalPrecision::default());
    let shift = if n % 2 == 1 { PI } else { 0.0 };
    let steps = radial_steps(n, z.norm());
    let mut arg = 0.0;
    let mut ln_abs = 0.0;
    for k in 1..=steps {
        let zk = z * (k as f64 / steps as f64);
        let v = ev.eval(zk)?;
        arg += wrap_pi(v.arg + shift - arg);
        ln_abs = v.ln_abs;
    }
    Ok(Complex64::new(ln_abs, arg))
}

/// `(1/n) H_n'(z)/H_n(z)` in multiprecision.
pub fn empirical_logderivative(n: usize, s2: f64, z: Complex64) -> Result<Complex64> {
    check_disk(z)?;
    let p = unitary_hermite(n, s2 / n as f64)?;
    let prec = EvalPrecision::default();
    let v = PreciseHorner::new(&p, prec).eval(z)?;
    let d = PreciseHorner::new(&poly_derivative(&p), prec).eval(z)?;
    Ok((d.ln() - v.ln()).exp() / n as f64)
}

#[allow(non_snake_case)]
/// `H_n(z;σ²/n)` by the coefficient sum (double precision, for moderate `n`).
pub fn direct_Hn(n: usize, s2: f64, z: Complex64) -> Result<Complex64> {
    Ok(poly_eval(&unitary_hermite(n, s2 / n as f64)?, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(t0(z, 1.5).unwrap(), Complex64::new(-0.75, 0.0));
        assert_eq!(limit_logH(z, 1.5).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(limit_logderivative(z, 1.5).unwrap().re, -(-0.75f64).exp());
        assert_eq!(d2S(z, 2.0).unwrap(), Complex64::new(-0.5, 0.0));
        assert!(S(Complex64::new(-0.75, 0.0), z, 1.5).unwrap().norm() < 1e-16);
    }

    #[test]
    fn near_origin_is_continuous() {
        let z = Complex64::new(1e-9, 1e-9);
        assert!((t0(z, 1.0).unwrap() - Complex64::new(-0.5, 0.0)).norm() < 1e-8);
        assert!((limit_logderivative(z, 1.0).unwrap() + (-0.5f64).exp()).norm() < 1e-8);
    }

    #[test]
    fn degree_one_integral() {
        let z = Complex64::new(0.2, -0.1);
        let v = integral_Hn(1, 1.0, z).unwrap();
        assert!((v - (z - 1.0)).norm() < 1e-12, "{v}");
        let v0 = integral_Hn(7, 1.0, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v0 + 1.0).norm() < 1e-12);
    }

    #[test]
    fn closed_forms_match_derivatives() {
        let s2 = 1.0;
        for k in 0..12 {
            let z = Complex64::from_polar(0.2, 0.5 * k as f64);
            let t = t0(z, s2).unwrap();
            assert!(t.re < 0.0);
            assert!(ds_dt(t, z, s2).norm() < 1e-13);
            assert!((S(t, z, s2).unwrap() - limit_logH(z, s2).unwrap()).norm() < 1e-12);
            let h = 1e-4;
            let fd = (S(t + h, z, s2).unwrap() - 2.0 * S(t, z, s2).unwrap() + S(t - h, z, s2).unwrap()) / (h * h);
            assert!((fd - d2S(z, s2).unwrap()).norm() < 1e-6);
            let dz = z * 1e-6;
            let fz = (limit_logH(z + dz, s2).unwrap() - limit_logH(z - dz, s2).unwrap()) / (2.0 * dz);
            assert!((fz - limit_logderivative(z, s2).unwrap()).norm() < 1e-6);
            let c = limit_logH(z.conj(), s2).unwrap() - limit_logH(z, s2).unwrap().conj();
            assert!(c.norm() < 1e-12);
        }
    }

    #[test]
    fn branch_of_theta() {
        let th = theta_of(Complex64::from_polar(0.3, 0.7));
        let a = t0_theta(th, 4.0).unwrap();
        let b = t0_theta(th + 2.0 * PI, 4.0).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
