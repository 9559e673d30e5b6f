//! `ζ_t(θ)`: the solution of `ζ - t tan ζ = θ` in the upper half-plane.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaConfig {
    pub max_fixed_point_iters: usize,
    /// Residual bound, scaled by `max(1, |θ|)`.
    pub newton_tol: f64,
    /// Strictly decreasing positive offsets for the approach to the real axis.
    pub boundary_descent: Vec<f64>,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        ZetaConfig {
            max_fixed_point_iters: 200,
            newton_tol: 1e-14,
            boundary_descent: (1..=12).map(|k| 10f64.powi(-k)).collect(),
        }
    }
}

impl ZetaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) {
            return domain("newton_tol must be positive");
        }
        if self.boundary_descent.iter().any(|&d| !(d > 0.0)) || self.boundary_descent.windows(2).any(|w| w[1] >= w[0]) {
            return domain("boundary_descent must be positive and strictly decreasing");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub zeta: Complex64,
    pub residual: f64,
    pub iterations_used: usize,
}

/// Relaxed residual accepted where the solution is a near-double root (support edges).
const EDGE_RESIDUAL: f64 = 1e-10;

/// `tan z`, stable for large `|Im z|`.
pub fn tan(z: Complex64) -> Complex64 {
    if z.im.abs() < 5.0 {
        return z.tan();
    }
    // tan z = i (1 - q) / (1 + q), q = e^{2iz}, |q| < 1 in the upper half-plane.
    let (w, s) = if z.im > 0.0 { (z, 1.0) } else { (z.conj(), -1.0) };
    let q = (Complex64::i() * 2.0 * w).exp();
    let t = Complex64::i() * (1.0 - q) / (1.0 + q);
    if s > 0.0 {
        t
    } else {
        t.conj()
    }
}

fn g(t: f64, th: Complex64, z: Complex64) -> (Complex64, Complex64) {
    let tz = tan(z);
    (z - t * tz - th, 1.0 - t * (1.0 + tz * tz))
}

struct Newton {
    zeta: Complex64,
    residual: f64,
    iters: usize,
    deriv: f64,
}

/// Newton's method kept in the closed upper half-plane by reflection.
fn newton(t: f64, th: Complex64, z0: Complex64, tol: f64, max_iter: usize) -> Newton {
    let mut z = z0;
    let (mut r, mut d) = g(t, th, z);
    let mut best = Newton { zeta: z, residual: r.norm(), iters: 0, deriv: d.norm() };
    for it in 1..=max_iter {
        if r.norm() <= tol {
            break;
        }
        let mut step = r / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        // Damp steps that would grossly overshoot.
        let cap = 1.0 + z.norm();
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        if z.im < 0.0 {
            // The equation has real coefficients; the conjugate root is the wrong one.
            z = z.conj();
        }
        let (r2, d2) = g(t, th, z);
        r = r2;
        d = d2;
        if r.norm() < best.residual {
            best = Newton { zeta: z, residual: r.norm(), iters: it, deriv: d.norm() };
        }
    }
    best
}

/// `ζ_t(θ)` for `t > 0`, `Im θ >= 0`.
pub fn zeta(t: f64, theta: Complex64, cfg: &ZetaConfig) -> Result<ZetaValue> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("zeta needs t > 0, got {t}"));
    }
    if theta.im < 0.0 || !theta.re.is_finite() || !theta.im.is_finite() {
        return domain(format!("zeta needs Im θ >= 0, got {theta}"));
    }
    // ζ(θ + kπ) = ζ(θ) + kπ: solve in the principal strip.
    let k = (theta.re / PI).round();
    let th = Complex64::new(theta.re - k * PI, theta.im);
    let tol = cfg.newton_tol * th.norm().max(1.0);
    let v = if th.im > 0.0 { interior(t, th, cfg, tol)? } else { boundary(t, th.re, cfg, tol)? };
    Ok(ZetaValue { zeta: v.zeta + k * PI, ..v })
}

fn interior(t: f64, th: Complex64, cfg: &ZetaConfig, tol: f64) -> Result<ZetaValue> {
    let mut z = th + Complex64::new(0.0, t);
    let mut used = 0;
    for _ in 0..cfg.max_fixed_point_iters {
        let next = th + t * tan(z);
        used += 1;
        let step = (next - z).norm();
        z = next;
        if z.im <= 0.0 || !z.re.is_finite() {
            z = th + Complex64::new(0.0, t);
            break;
        }
        if step < 1e-3 * (1.0 + z.norm()) {
            break;
        }
    }
    let nw = newton(t, th, z, tol, 60);
    if nw.residual <= tol && nw.zeta.im > 0.0 {
        return Ok(ZetaValue { zeta: nw.zeta, residual: nw.residual, iterations_used: used + nw.iters });
    }
    // Fall back to the plain iteration, then polish once more.
    let mut z = th + Complex64::new(0.0, t);
    for _ in 0..cfg.max_fixed_point_iters {
        z = th + t * tan(z);
        used += 1;
    }
    let nw = newton(t, th, z, tol, 60);
    if nw.residual <= tol || (nw.residual <= EDGE_RESIDUAL && nw.deriv < 1e-2) {
        return Ok(ZetaValue { zeta: nw.zeta, residual: nw.residual, iterations_used: used + nw.iters });
    }
    Err(Error::Solver { msg: format!("zeta_{t}({th}) did not converge"), residual: nw.residual })
}

/// Real `θ`: continuation along `θ + iδ_k`, `δ_k ↓ 0`.
fn boundary(t: f64, x: f64, cfg: &ZetaConfig, tol: f64) -> Result<ZetaValue> {
    let deltas = &cfg.boundary_descent;
    let first = deltas.first().copied().unwrap_or(0.1);
    let mut v = interior(t, Complex64::new(x, first), cfg, tol)?;
    let mut z = v.zeta;
    let mut used = v.iterations_used;
    let mut prev = first;
    let mut targets: Vec<f64> = deltas.iter().copied().skip(1).collect();
    targets.push(0.0);
    for &d in &targets {
        let mut cur = prev;
        let mut goal = d;
        let mut refinements = 0;
        // Walk from `cur` to `goal`, halving the stride whenever Newton stalls.
        while cur > goal || (goal == 0.0 && cur > 0.0) {
            let target = goal;
            let th = Complex64::new(x, target);
            let nw = newton(t, th, z, tol, 40);
            used += nw.iters;
            let ok = nw.residual <= tol || (target == 0.0 && nw.residual <= EDGE_RESIDUAL && nw.deriv < 1e-2);
            if ok {
                z = nw.zeta;
                cur = target;
                goal = d;
                v = ZetaValue { zeta: z, residual: nw.residual, iterations_used: used };
            } else {
                refinements += 1;
                if refinements > 60 {
                    return Err(Error::Solver {
                        msg: format!("zeta_{t}({x}) continuation stalled at δ = {target:e}"),
                        residual: nw.residual,
                    });
                }
                goal = if target == 0.0 { cur * 1e-2 } else { (cur * target).sqrt() };
                if goal < 1e-300 {
                    goal = 0.0;
                }
            }
        }
        prev = cur;
    }
    Ok(v)
}

/// The positive root `ỹ` of `ỹ - t coth ỹ = τ`.
pub fn zeta_boundary_line(t: f64, tau: f64) -> Result<f64> {
    if !(t > 0.0) || !(tau >= 0.0) {
        return domain("zeta_boundary_line needs t > 0 and τ >= 0");
    }
    let f = |y: f64| y - t / y.tanh() - tau;
    let df = |y: f64| {
        let s = y.sinh();
        1.0 + t / (s * s)
    };
    let mut lo = 1e-3 * t.sqrt().min(1.0).min(tau + t);
    while f(lo) >= 0.0 {
        lo *= 0.5;
    }
    let mut hi = tau + t + 1.0;
    let mut y = (t.sqrt().min(tau + t)).clamp(lo, hi);
    for _ in 0..200 {
        let fy = f(y);
        if fy == 0.0 {
            return Ok(y);
        }
        if fy < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let mut next = y - fy / df(y);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == y || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        y = next;
    }
    Ok(y)
}
