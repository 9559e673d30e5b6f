//! The Curie-Weiss model at complex external field.
//!
//! `Z_n(β, h) = Σ_j C(n, j) exp((β/(2n))(2j - n)² + h(2j - n))`, which equals
//! `(-1)^n e^{βn/2 - hn} H_n(-e^{2h}; 4β/n)`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::circleroots::{find_roots, EvalPrecision};
use crate::error::{domain, Error, Result};
use crate::freenormal::{self, FreeNormalParams};
use crate::polycore::{unitary_hermite, PreciseHorner};
use crate::scaledarith::log_binomial;
use crate::zetasolver::{zeta, ZetaConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CWParams {
    pub beta: f64,
    pub h: Complex64,
}

impl CWParams {
    pub fn new(beta: f64, h: Complex64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return domain(format!("β must be positive, got {beta}"));
        }
        if !h.re.is_finite() || !h.im.is_finite() {
            return domain("h must be finite");
        }
        Ok(CWParams { beta, h })
    }
}

/// `Z_n = e^{ln_max} · sum`, with the largest term magnitude normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPartition {
    pub ln_max: f64,
    pub sum: Complex64,
    /// `Σ |term|` in the same units.
    pub abs_sum: f64,
}

/// `ln cosh w`, even in `w` bit for bit; `None` at a zero of `cosh`.
fn ln_cosh(w: Complex64) -> Option<Complex64> {
    let w = if w.re > 0.0 || (w.re == 0.0 && w.im >= 0.0) { w } else { -w };
    let c = 1.0 + (-2.0 * w).exp();
    if c == Complex64::new(0.0, 0.0) {
        return None;
    }
    Some(w + c.ln() - std::f64::consts::LN_2)
}

/// The binomial sum, terms `j` and `n - j` merged through `cosh`.
pub fn scaled_partition(n: usize, p: &CWParams) -> Result<ScaledPartition> {
    if n == 0 {
        return domain("log_partition needs n >= 1");
    }
    let nf = n as f64;
    let mut logs = Vec::with_capacity(n / 2 + 1);
    for j in 0..=n / 2 {
        let k = (n - 2 * j) as f64;
        let base = log_binomial(n as u64, j as u64)? + p.beta / (2.0 * nf) * k * k;
        if 2 * j == n {
            logs.push(Complex64::new(base, 0.0));
        } else if let Some(lc) = ln_cosh(p.h * k) {
            logs.push(lc + base + std::f64::consts::LN_2);
        }
    }
    let ln_max = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for l in &logs {
        let t = (l - ln_max).exp();
        sum += t;
        abs_sum += t.norm();
    }
    Ok(ScaledPartition { ln_max, sum, abs_sum })
}

/// Principal `log Z_n(β, h)`; continuity across zeros of `Z_n` is not tracked.
///
/// When the double-precision sum cancels too much, `H_n(-e^{2h}; 4β/n)` is
/// evaluated in multiprecision instead, at the sign of `h` with `Re h <= 0`.
pub fn log_partition(n: usize, p: &CWParams) -> Result<Complex64> {
    let s = scaled_partition(n, p)?;
    if s.sum.norm() >= 1e-3 * s.abs_sum {
        let l = s.sum.ln();
        return Ok(Complex64::new(s.ln_max + l.re, l.im));
    }
    let h = if p.h.re < 0.0 || (p.h.re == 0.0 && p.h.im >= 0.0) { p.h } else { -p.h };
    let nf = n as f64;
    let hp = unitary_hermite(n, 4.0 * p.beta / nf)?;
    let v = PreciseHorner::new(&hp, EvalPrecision::default())
        .eval(-(2.0 * h).exp())
        .map_err(|_| Error::Pole(format!("Z_{n} vanishes at h = {}", p.h)))?;
    let l = v.ln() + 0.5 * p.beta * nf - h * nf + Complex64::new(0.0, if n % 2 == 1 { PI } else { 0.0 });
    Ok(Complex64::new(l.re, l.im - 2.0 * PI * (l.im / (2.0 * PI)).round()))
}

/// `lim (1/n) log Z_n = β/2 + h + log(1 + e^{2iζ}) - 2β/(1 + e^{-2iζ})²`, `ζ = ζ_β(ih)`.
/// For `Re h < 0` the value at `-h` is returned.
pub fn free_energy(p: &CWParams) -> Result<Complex64> {
    if p.h.re == 0.0 {
        return domain("free_energy is undefined on Re h = 0");
    }
    let h = if p.h.re > 0.0 { p.h } else { -p.h };
    let zt = zeta(p.beta, Complex64::i() * h, &ZetaConfig::default())?.zeta;
    let q = (2.0 * Complex64::i() * zt).exp();
    let r = q / (1.0 + q);
    Ok(0.5 * p.beta + h + (1.0 + q).ln() - 2.0 * p.beta * r * r)
}

/// `y ∈ (-π/2, π/2]` with `-e^{2iy} = e^{iθ}`.
pub fn angle_to_y(theta: f64) -> f64 {
    let y = 0.5 * (theta - PI);
    let r = y - PI * (y / PI).round();
    if r <= -0.5 * PI {
        r + PI
    } else {
        r
    }
}

/// Zeros `iy_j` of `Z_n(β, ·)` on the imaginary axis, one period, sorted.
pub fn lee_yang_zeros(n: usize, beta: f64, prec: EvalPrecision) -> Result<Vec<f64>> {
    if n == 0 {
        return domain("lee_yang_zeros needs n >= 1");
    }
    if !(beta > 0.0) {
        return domain(format!("β must be positive, got {beta}"));
    }
    let p = unitary_hermite(n, 4.0 * beta / n as f64)?;
    let m = find_roots(&p, prec, 8)?;
    let mut ys: Vec<f64> = m.angles.iter().map(|&t| angle_to_y(t)).collect();
    ys.sort_by(f64::total_cmp);
    Ok(ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeeYangSupport {
    /// `[π/2 - w, π/2 + w] + πℓ`.
    Intervals { halfwidth: f64 },
    FullLine,
}

pub fn lee_yang_support(beta: f64) -> Result<LeeYangSupport> {
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("β must be positive, got {beta}"));
    }
    if beta >= 1.0 {
        return Ok(LeeYangSupport::FullLine);
    }
    Ok(LeeYangSupport::Intervals { halfwidth: beta.sqrt().asin() + (beta - beta * beta).sqrt() })
}

/// `(1/(πβ)) Im ζ_β(y)`, π-periodic in `y`.
pub fn lee_yang_density(beta: f64, y: f64) -> Result<f64> {
    if let LeeYangSupport::Intervals { halfwidth } = lee_yang_support(beta)? {
        let d = y - 0.5 * PI;
        if (d - PI * (d / PI).round()).abs() >= halfwidth {
            return Ok(0.0);
        }
    }
    let z = zeta(beta, Complex64::new(y, 0.0), &ZetaConfig::default())?;
    Ok((z.zeta.im / (PI * beta)).max(0.0))
}

/// The same density through `y ↦ 2 f_{4β}(-e^{2iy})`.
pub fn lee_yang_density_via_circle(beta: f64, y: f64) -> Result<f64> {
    let p = FreeNormalParams::new(4.0 * beta)?;
    Ok(2.0 * freenormal::density(&p, 2.0 * y + PI)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw(beta: f64, h: Complex64) -> CWParams {
        CWParams::new(beta, h).unwrap()
    }

    #[test]
    fn one_spin() {
        let h = Complex64::new(0.3, -0.8);
        let z = log_partition(1, &cw(0.7, h)).unwrap().exp();
        let want = 2.0 * (0.35f64).exp() * h.cosh();
        assert!((z - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn field_sign_symmetry() {
        for &n in &[5usize, 6, 101] {
            let h = Complex64::new(0.21, 1.3);
            assert_eq!(log_partition(n, &cw(0.4, h)).unwrap(), log_partition(n, &cw(0.4, -h)).unwrap());
        }
    }

    #[test]
    fn y_mapping() {
        assert_eq!(angle_to_y(0.0), 0.5 * PI);
        assert!(angle_to_y(PI).abs() < 1e-16);
        assert!((angle_to_y(-PI + 1e-9) - 0.5e-9).abs() < 1e-15);
        let y = lee_yang_zeros(1, 0.5, EvalPrecision::default()).unwrap();
        assert_eq!(y, vec![0.5 * PI]);
    }

    #[test]
    fn support_examples() {
        assert_eq!(lee_yang_support(1.0).unwrap(), LeeYangSupport::FullLine);
        let LeeYangSupport::Intervals { halfwidth } = lee_yang_support(0.25).unwrap() else { panic!() };
        assert!((halfwidth - (PI / 6.0 + 0.1875f64.sqrt())).abs() < 1e-15);
        let LeeYangSupport::Intervals { halfwidth } = lee_yang_support(1e-8).unwrap() else { panic!() };
        assert!((halfwidth - 2e-4).abs() < 1e-6);
        assert_eq!(lee_yang_density(0.25, 0.0).unwrap(), 0.0);
        assert!(lee_yang_density(0.25, 0.5 * PI).unwrap() > 0.0);
    }

    #[test]
    fn large_field() {
        let h = Complex64::new(20.0, 0.4);
        let f = free_energy(&cw(1.0, h)).unwrap();
        assert!((f - (0.5 + h)).norm() < 1e-8);
        assert!(free_energy(&cw(1.0, Complex64::new(0.0, 1.0))).is_err());
    }
}
