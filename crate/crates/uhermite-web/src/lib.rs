//! Browser bindings: density curves, zeros of H_n on the circle, Lee-Yang zeros.
//!
//! Every export returns a flat `Float64Array`; pairs are interleaved as `x0, y0, x1, y1, ...`.

use std::f64::consts::PI;

use unitary_hermite::circleroots::{find_roots, EvalPrecision};
use unitary_hermite::curieweiss;
use unitary_hermite::freenormal::{self, FreeNormalParams};
use unitary_hermite::polycore::unitary_hermite;
use wasm_bindgen::prelude::*;

const MAX_DEGREE: usize = 400;

fn check_n(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_DEGREE {
        return Err(format!("degree must be between 1 and {MAX_DEGREE}"));
    }
    Ok(())
}

/// `(θ, f(θ))` on `points` equally spaced angles in `[-π, π]`.
pub fn density_pairs(sigma2: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = FreeNormalParams::new(sigma2).map_err(|e| e.to_string())?;
    let points = points.clamp(2, 20_000);
    let mut out = Vec::with_capacity(2 * points);
    for k in 0..points {
        let t = -PI + 2.0 * PI * k as f64 / (points - 1) as f64;
        out.push(t);
        out.push(freenormal::density(&p, t).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Angles of the zeros of `H_n(z; σ²/n)`.
pub fn root_angles(n: usize, sigma2: f64) -> Result<Vec<f64>, String> {
    check_n(n)?;
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err("σ² must be nonnegative".into());
    }
    let p = unitary_hermite(n, sigma2 / n as f64).map_err(|e| e.to_string())?;
    Ok(find_roots(&p, EvalPrecision::default(), 8).map_err(|e| e.to_string())?.angles)
}

/// Lee-Yang zeros `y_j ∈ (-π/2, π/2]`, then the limiting density at `points`
/// equally spaced `y`: `[m, y_1..y_m, y'_1, ν(y'_1), ...]`.
pub fn lee_yang_pairs(n: usize, beta: f64, points: usize) -> Result<Vec<f64>, String> {
    check_n(n)?;
    let ys = curieweiss::lee_yang_zeros(n, beta, EvalPrecision::default()).map_err(|e| e.to_string())?;
    let points = points.clamp(2, 20_000);
    let mut out = Vec::with_capacity(1 + ys.len() + 2 * points);
    out.push(ys.len() as f64);
    out.extend_from_slice(&ys);
    for k in 0..points {
        let y = -0.5 * PI + PI * k as f64 / (points - 1) as f64;
        out.push(y);
        out.push(curieweiss::lee_yang_density(beta, y).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn density(sigma2: f64, points: usize) -> Result<Vec<f64>, JsError> {
    density_pairs(sigma2, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn roots(n: usize, sigma2: f64) -> Result<Vec<f64>, JsError> {
    root_angles(n, sigma2).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lee_yang(n: usize, beta: f64, points: usize) -> Result<Vec<f64>, JsError> {
    lee_yang_pairs(n, beta, points).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let d = density_pairs(1.0, 11).unwrap();
        assert_eq!(d.len(), 22);
        assert_eq!(d[0], -PI);
        assert_eq!(d[1], 0.0);
        assert_eq!(root_angles(12, 2.0).unwrap().len(), 12);
        let l = lee_yang_pairs(10, 0.5, 5).unwrap();
        assert_eq!(l[0], 10.0);
        assert_eq!(l.len(), 1 + 10 + 10);
        assert!(root_angles(0, 1.0).is_err());
        assert!(density_pairs(-1.0, 5).is_err());
    }
}
