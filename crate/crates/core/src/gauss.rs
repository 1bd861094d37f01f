//! Standard Gaussian density and measure.

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::math::{exp, sqrt, PI, TAU};

const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

/// Error function.
///
/// A positive-term series `erf x = (2/√π) e^{−x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!`
/// below `|x| = 2.5`, and `1 − erfc` with a continued fraction above.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < 2.5 { erf_series(ax) } else { 1.0 - erfc_cf(ax) };
    v.copysign(x)
}

/// Complementary error function, accurate in relative terms for large `x`
/// (the continued fraction takes over from `x = 1`).
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x < 1.0 {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * exp(-x2) * sum
}

/// `erfc x = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`, modified
/// Lentz evaluation.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    exp(-x * x) / (sqrt(PI) * f)
}

/// Standard normal CDF `Φ(a)`.
pub fn normal_cdf(a: f64) -> f64 {
    0.5 * erfc(-a / core::f64::consts::SQRT_2)
}

/// `(2π)^{−n/2} e^{−|x|²/2}` with `n = x.len()`.
pub fn gaussian_density(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    exp(-0.5 * r2) / libm::pow(TAU, 0.5 * x.len() as f64)
}

/// Gaussian weight on R¹ or R²; the density itself lives in
/// [`gaussian_density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussWeight {
    pub dim: usize,
}

impl GaussWeight {
    pub fn density(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        gaussian_density(x)
    }
}

/// Midpoint-rule Gaussian measure of `body` on cells of side `≤ resolution`.
///
/// A cell with every corner inside counts fully; a cell with mixed corners is
/// split 4× per axis and its sub-cells are classified by their centres.
pub fn gaussian_measure(body: &ConvexBody, resolution: f64) -> Result<f64> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidArgument("resolution must be positive"));
    }
    const SUB: usize = 4;
    let (lo, hi) = body.bounding_box();
    let dim = body.dim();
    let cells = |a: f64, b: f64| -> (usize, f64) {
        let n = libm::ceil((b - a) / resolution).max(1.0) as usize;
        (n, (b - a) / n as f64)
    };
    let (nx, hx) = cells(lo[0], hi[0]);
    if dim == 1 {
        let mut total = 0.0;
        for i in 0..nx {
            let x0 = lo[0] + i as f64 * hx;
            let (a, b) = (body.contains(&[x0], 0.0), body.contains(&[x0 + hx], 0.0));
            if a && b {
                total += gaussian_density(&[x0 + 0.5 * hx]) * hx;
            } else if a || b {
                let hs = hx / SUB as f64;
                for s in 0..SUB {
                    let xm = x0 + (s as f64 + 0.5) * hs;
                    if body.contains(&[xm], 0.0) {
                        total += gaussian_density(&[xm]) * hs;
                    }
                }
            }
        }
        return Ok(total);
    }
    let (ny, hy) = cells(lo[1], hi[1]);
    let mut total = 0.0;
    // corner classification shared between neighbouring cells
    let inside: alloc::vec::Vec<bool> = (0..=ny)
        .flat_map(|j| (0..=nx).map(move |i| (i, j)))
        .map(|(i, j)| body.contains(&[lo[0] + i as f64 * hx, lo[1] + j as f64 * hy], 0.0))
        .collect();
    let corner = |i: usize, j: usize| inside[j * (nx + 1) + i];
    for j in 0..ny {
        for i in 0..nx {
            let k = [corner(i, j), corner(i + 1, j), corner(i, j + 1), corner(i + 1, j + 1)];
            let (x0, y0) = (lo[0] + i as f64 * hx, lo[1] + j as f64 * hy);
            if k.iter().all(|c| *c) {
                total += gaussian_density(&[x0 + 0.5 * hx, y0 + 0.5 * hy]) * hx * hy;
            } else if k.iter().any(|c| *c) {
                let (sx, sy) = (hx / SUB as f64, hy / SUB as f64);
                for q in 0..SUB {
                    for p in 0..SUB {
                        let x = [x0 + (p as f64 + 0.5) * sx, y0 + (q as f64 + 0.5) * sy];
                        if body.contains(&x, 0.0) {
                            total += gaussian_density(&x) * sx * sy;
                        }
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Offset `a` of the half-space `{x₁ < a}` whose Gaussian measure is `mass`,
/// i.e. `Φ(a) = mass`, by bisection to `|Φ(a) − mass| ≤ 1e−12`.
pub fn halfspace_offset_for_measure(mass: f64) -> Result<f64> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::InvalidArgument("mass must lie strictly between 0 and 1"));
    }
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = normal_cdf(mid);
        if (v - mass).abs() <= 1e-12 && hi - lo < 1e-12 {
            return Ok(mid);
        }
        if v < mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
