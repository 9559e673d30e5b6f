//! The free unitary normal distribution `N_{σ²}` on the unit circle.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::mp::{self, RM};
use crate::quad;
use crate::scaledarith::SignedScaled;
use crate::zetasolver::{zeta, ZetaConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct FreeNormalParams {
    pub s2: f64,
    pub zeta_cfg: ZetaConfig,
    pub quad_tol: f64,
}

impl FreeNormalParams {
    pub fn new(s2: f64) -> Result<Self> {
        if !(s2 > 0.0) || !s2.is_finite() {
            return domain(format!("σ² must be positive, got {s2}"));
        }
        Ok(FreeNormalParams { s2, zeta_cfg: ZetaConfig::default(), quad_tol: 1e-10 })
    }

    fn t(&self) -> f64 {
        0.25 * self.s2
    }
}

/// Density with respect to arc length, `θ` taken mod `2π`.
pub fn density(p: &FreeNormalParams, theta: f64) -> Result<f64> {
    let th = crate::circleroots::wrap_angle(theta);
    if p.s2 < 4.0 && th.abs() >= support_halfwidth(p) {
        return Ok(0.0);
    }
    let z = zeta(p.t(), Complex64::new(0.5 * (th - PI), 0.0), &p.zeta_cfg)?;
    Ok((2.0 / (PI * p.s2) * z.zeta.im).max(0.0))
}

/// `m_{σ²}`: the support is `[-m, m]`, the whole circle once `σ² >= 4`.
pub fn support_halfwidth(p: &FreeNormalParams) -> f64 {
    if p.s2 >= 4.0 {
        return PI;
    }
    let s = p.s2.sqrt();
    2.0 * (0.5 * s).asin() + 0.5 * s * (4.0 - p.s2).sqrt()
}

/// Exact `q_m(x) * m! * D^m` as an integer, where `x = M / D` with `D` a power of two.
fn q_poly_integer(m: usize, x: f64) -> (BigInt, BigInt) {
    let (mant, exp, sign) = num_traits::float::FloatCore::integer_decode(x);
    let mut num = BigInt::from(mant) * i64::from(sign);
    let mut den = BigInt::one();
    if exp >= 0 {
        num <<= exp as usize;
    } else {
        den <<= (-exp) as usize;
    }
    // c_j = C(m+1, j+1) m!/j!, built downward from c_m = 1.
    let mut c = BigInt::one();
    let mut acc = BigInt::one();
    let mut dpow = BigInt::one();
    for j in (0..m).rev() {
        // c_j / c_{j+1} = (j+1)(j+2) / (m - j)
        c = c * BigInt::from((j + 1) * (j + 2)) / BigInt::from(m - j);
        dpow *= &den;
        acc = acc * &num + &c * &dpow;
    }
    let mut scale = crate::polycore::factorial(m);
    for _ in 0..m {
        scale *= &den;
    }
    (acc, scale)
}

/// `q_m(x) = Σ_j x^j/j! C(m+1, j+1)`, evaluated exactly and rounded once.
pub fn q_poly(m: usize, x: f64) -> f64 {
    let (a, s) = q_poly_integer(m, x);
    if a.is_zero() {
        return 0.0;
    }
    let p = 128;
    mp::to_f64(&mp::from_bigint(&a).div(&mp::from_bigint(&s), p, RM))
}

/// `q_m(x)` in log-scaled form, for arguments where the value leaves double range.
pub fn q_poly_scaled(m: usize, x: f64) -> SignedScaled {
    let (a, s) = q_poly_integer(m, x);
    if a.is_zero() {
        return SignedScaled::ZERO;
    }
    let sign = if a < BigInt::zero() { -1 } else { 1 };
    let l2 = mp::log2_abs(&mp::from_bigint(&a)) - mp::log2_abs(&mp::from_bigint(&s));
    SignedScaled::new(sign, l2 * std::f64::consts::LN_2)
}

/// `m_ℓ = ∫ e^{iℓθ} dN_{σ²} = (1/ℓ) e^{-ℓσ²/2} q_{ℓ-1}(-ℓσ²)`, real and even in `ℓ`.
pub fn moment(p: &FreeNormalParams, ell: i64) -> f64 {
    let l = ell.unsigned_abs() as usize;
    if l == 0 {
        return 1.0;
    }
    let lf = l as f64;
    let q = q_poly_scaled(l - 1, -lf * p.s2);
    q.scale_exp(-0.5 * lf * p.s2 - lf.ln()).to_f64()
}

/// `m_1..m_L` through the Laguerre form `q_m(x) = L_m^{(1)}(-x)`, in double precision.
pub fn moments_fast(p: &FreeNormalParams, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|l| {
            let y = l as f64 * p.s2;
            // (k+1) L_{k+1} = (2k + 2 - y) L_k - (k+1) L_{k-1}, L_0 = 1, L_1 = 2 - y.
            let (mut a, mut b) = (1.0f64, 2.0 - y);
            let mut ln_off = 0.0;
            if l == 1 {
                b = a;
            }
            for k in 1..l.saturating_sub(1) {
                let kf = k as f64;
                let c = ((2.0 * kf + 2.0 - y) * b - (kf + 1.0) * a) / (kf + 1.0);
                a = b;
                b = c;
                let big = b.abs().max(a.abs());
                if big > 1e100 {
                    a /= big;
                    b /= big;
                    ln_off += big.ln();
                }
            }
            let sign = b.signum();
            if b == 0.0 {
                return 0.0;
            }
            sign * (b.abs().ln() + ln_off - 0.5 * y - (l as f64).ln()).exp()
        })
        .collect()
}

/// The Fourier series truncated after `terms` harmonics.
pub fn density_series(p: &FreeNormalParams, theta: f64, terms: usize) -> f64 {
    let m = moments_fast(p, terms);
    let s: f64 = m.iter().enumerate().map(|(i, &ml)| ml * ((i + 1) as f64 * theta).cos()).sum();
    1.0 / (2.0 * PI) + s / PI
}

/// Limit of the Fourier series by Abel summation: the damped sums
/// `1/(2π) + (1/π) Σ m_ℓ e^{-τℓ} cos ℓθ` are analytic in `τ` wherever the density
/// is, and are extrapolated polynomially to `τ = 0`. Uses only the moments.
pub struct SeriesOracle {
    moments: Vec<f64>,
    taus: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

const ABEL_TAU_MIN: f64 = 0.002;
const ABEL_TAU_MAX: f64 = 0.04;
const ABEL_NODES: usize = 10;

impl SeriesOracle {
    pub fn new(p: &FreeNormalParams) -> Self {
        let taus: Vec<f64> = (0..ABEL_NODES)
            .map(|i| ABEL_TAU_MIN * (ABEL_TAU_MAX / ABEL_TAU_MIN).powf(i as f64 / (ABEL_NODES - 1) as f64))
            .collect();
        // e^{-τ ℓ} < 1e-17 beyond this.
        let len = (39.2 / ABEL_TAU_MIN) as usize;
        let moments = moments_fast(p, len);
        let weights = taus
            .iter()
            .map(|&t| (1..=len).map(|l| (-t * l as f64).exp()).take_while(|&w| w > 1e-17).collect())
            .collect();
        SeriesOracle { moments, taus, weights }
    }

    pub fn density(&self, theta: f64) -> f64 {
        let cosines: Vec<f64> = (1..=self.moments.len()).map(|l| (l as f64 * theta).cos()).collect();
        let ys: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                let s: f64 = w.iter().zip(&self.moments).zip(&cosines).map(|((w, m), c)| w * m * c).sum();
                1.0 / (2.0 * PI) + s / PI
            })
            .collect();
        neville_at_zero(&self.taus, &ys)
    }
}

fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (x[i] * p[i + 1] - x[i + k] * p[i]) / (x[i] - x[i + k]);
        }
    }
    p[0]
}

/// `∫_{-π}^{θ} f`, clamped to `[0, 1]`.
pub fn cdf(p: &FreeNormalParams, theta: f64) -> Result<f64> {
    if !(-PI..=PI).contains(&theta) {
        return domain(format!("cdf needs θ in [-π, π], got {theta}"));
    }
    let v = integrate_density(p, -PI, theta)?;
    Ok(v.clamp(0.0, 1.0))
}

fn integrate_density(p: &FreeNormalParams, a: f64, b: f64) -> Result<f64> {
    let m = support_halfwidth(p);
    let (a, b) = (a.max(-m), b.min(m));
    if b <= a {
        return Ok(0.0);
    }
    let mut err = None;
    let r = quad::integrate(
        |x| match density(p, x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        &[0.0],
        p.quad_tol,
        0.0,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

/// CDF for a nondecreasing sequence of angles, integrating only the gaps.
pub struct CdfSweep<'a> {
    p: &'a FreeNormalParams,
    last: f64,
    value: f64,
}

impl<'a> CdfSweep<'a> {
    pub fn new(p: &'a FreeNormalParams) -> Self {
        CdfSweep { p, last: -PI, value: 0.0 }
    }

    pub fn at(&mut self, theta: f64) -> Result<f64> {
        if theta < self.last {
            self.last = -PI;
            self.value = 0.0;
        }
        // Per-gap tolerance small enough that the running sum keeps quad_tol.
        let piece = FreeNormalParams { quad_tol: self.p.quad_tol * 1e-3, ..self.p.clone() };
        self.value += integrate_density(&piece, self.last, theta.min(PI))?;
        self.last = theta.min(PI);
        Ok(self.value.clamp(0.0, 1.0))
    }
}

/// `ψ(-e^{iθ}) = i(θ - 2ζ_{σ²/4}(θ/2))/σ² - 1/2`.
pub fn psi(p: &FreeNormalParams, theta: Complex64) -> Result<Complex64> {
    if theta.im < 0.0 {
        return domain("psi needs Im θ >= 0");
    }
    let z = zeta(p.t(), 0.5 * theta, &p.zeta_cfg)?.zeta;
    Ok(Complex64::i() * (theta - 2.0 * z) / p.s2 - 0.5)
}

/// `S(z) = e^{σ²(z + 1/2)}`.
pub fn s_transform(p: &FreeNormalParams, z: Complex64) -> Complex64 {
    (p.s2 * (z + 0.5)).exp()
}

/// `c` in `f(m - ε) ≈ c √ε` at the support edge, `σ² < 4`.
pub fn sqrt_edge_constant(p: &FreeNormalParams) -> Result<f64> {
    if p.s2 >= 4.0 {
        return domain("square-root edges exist only for σ² < 4");
    }
    Ok((4.0 * p.s2 / (4.0 - p.s2)).powf(0.25) / (PI * p.s2))
}

/// `f(π - ε) ≈ (√3/(4π)) (3ε/2)^{1/3}` at `σ² = 4`.
pub fn cubic_edge_law(eps: f64) -> f64 {
    3f64.sqrt() / (4.0 * PI) * (1.5 * eps).cbrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_poly_examples() {
        assert_eq!(q_poly(0, 3.7), 1.0);
        assert_eq!(q_poly(1, -2.0), 0.0);
        let x = 0.3;
        assert!((q_poly(2, x) - (3.0 + 3.0 * x + x * x / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn support_examples() {
        let w = |s2| support_halfwidth(&FreeNormalParams::new(s2).unwrap());
        assert_eq!(w(4.0), PI);
        assert!((w(1.0) - (PI / 3.0 + 3f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((w(1e-6) / 2e-3 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn low_moments() {
        let p = FreeNormalParams::new(1.3).unwrap();
        let s = p.s2;
        assert!((moment(&p, 1) - (-s / 2.0).exp()).abs() < 1e-15);
        let m3 = 0.5 * (-1.5 * s).exp() * (2.0 - 6.0 * s + 3.0 * s * s);
        assert!((moment(&p, 3) - m3).abs() < 1e-14);
        assert_eq!(moment(&p, -3), moment(&p, 3));
        assert_eq!(moment(&p, 0), 1.0);
    }

    #[test]
    fn laguerre_route_matches_exact() {
        for s2 in [0.5, 1.0, 4.0, 6.0] {
            let p = FreeNormalParams::new(s2).unwrap();
            let fast = moments_fast(&p, 60);
            for (i, f) in fast.iter().enumerate() {
                let e = moment(&p, i as i64 + 1);
                assert!((f - e).abs() < 1e-13, "σ²={s2} ℓ={} {f} {e}", i + 1);
            }
        }
    }

    #[test]
    fn outside_support_is_zero() {
        let p = FreeNormalParams::new(1.0).unwrap();
        let m = PI / 3.0 + 3f64.sqrt() / 2.0 + 0.1;
        assert_eq!(density(&p, m).unwrap(), 0.0);
        assert_eq!(density(&p, -m).unwrap(), 0.0);
    }

    #[test]
    fn s_transform_points() {
        let p = FreeNormalParams::new(2.0).unwrap();
        assert_eq!(s_transform(&p, Complex64::new(-0.5, 0.0)), Complex64::new(1.0, 0.0));
        assert!((s_transform(&p, Complex64::new(0.0, 0.0)).re - 1f64.exp()).abs() < 1e-15);
    }
}
