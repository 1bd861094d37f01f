//! Small symmetric positive definite matrices and the convexity of
//! `M ↦ tr(M⁻¹)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Dense symmetric positive definite `n×n` matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SpdMatrix {
    /// Checks exact symmetry and positive definiteness (Cholesky).
    pub fn new(n: usize, a: Vec<f64>) -> Result<Self> {
        if n == 0 || a.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: a.len() });
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotSpd);
        }
        for i in 0..n {
            for j in 0..i {
                if a[i * n + j] != a[j * n + i] {
                    return Err(Error::NotSpd);
                }
            }
        }
        let m = Self { n, a };
        m.cholesky()?;
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n]).expect("identity is SPD")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut a = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            a[i * n + i] = *v;
        }
        Self::new(n, a)
    }

    /// `GGᵀ + δI` with `G` uniform in `[−1, 1]` and `δ` uniform in `[0.05, 1]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let delta = rng.random_range(0.05..=1.0);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..n).map(|k| g[i * n + k] * g[j * n + k]).sum();
                a[i * n + j] = s;
                a[j * n + i] = s;
            }
            a[i * n + i] += delta;
        }
        Self::new(n, a).expect("Gram matrix plus a positive shift is SPD")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.a.iter().zip(&other.a).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Lower Cholesky factor.
    fn cholesky(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotSpd);
                    }
                    l[i * n + i] = sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(l)
    }

    /// Inverse by cofactors for `n ≤ 3`, by Cholesky above.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let a = |i: usize, j: usize| self.a[i * n + j];
        let inv = match n {
            1 => vec![1.0 / a(0, 0)],
            2 => {
                let det = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
                let off = -a(0, 1) / det;
                vec![a(1, 1) / det, off, off, a(0, 0) / det]
            }
            3 => {
                let c00 = a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2);
                let c01 = a(0, 2) * a(1, 2) - a(0, 1) * a(2, 2);
                let c02 = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
                let c11 = a(0, 0) * a(2, 2) - a(0, 2) * a(0, 2);
                let c12 = a(0, 1) * a(0, 2) - a(0, 0) * a(1, 2);
                let c22 = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
                let det = a(0, 0) * c00 + a(0, 1) * c01 + a(0, 2) * c02;
                vec![c00 / det, c01 / det, c02 / det, c01 / det, c11 / det, c12 / det, c02 / det, c12 / det, c22 / det]
            }
            _ => {
                let l = self.cholesky()?;
                // L⁻¹ column by column, then A⁻¹ = L⁻ᵀL⁻¹
                let mut li = vec![0.0; n * n];
                for c in 0..n {
                    for i in c..n {
                        let mut s = if i == c { 1.0 } else { 0.0 };
                        for k in c..i {
                            s -= l[i * n + k] * li[k * n + c];
                        }
                        li[i * n + c] = s / l[i * n + i];
                    }
                }
                let mut inv = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..=i {
                        let s: f64 = (i..n).map(|k| li[k * n + i] * li[k * n + j]).sum();
                        inv[i * n + j] = s;
                        inv[j * n + i] = s;
                    }
                }
                inv
            }
        };
        Self::new(n, inv)
    }
}

/// `(tr(((1−t)A⁻¹ + tB⁻¹)⁻¹), (1−t)tr A + t tr B)`. Convexity of `tr(M⁻¹)`
/// on SPD matrices gives `lhs ≤ rhs`.
pub fn trace_inverse_convexity(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<(f64, f64)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument("t must lie in [0, 1]"));
    }
    let ai = a.inverse()?;
    let bi = b.inverse()?;
    // A⁻¹ + t(B⁻¹ − A⁻¹): the bracket vanishes exactly when A = B
    let mix: Vec<f64> = ai.a.iter().zip(&bi.a).map(|(x, y)| x + t * (y - x)).collect();
    let lhs = SpdMatrix::new(a.dim(), mix)?.inverse()?.trace();
    let rhs = (1.0 - t) * a.trace() + t * b.trace();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn matmul(a: &SpdMatrix, b: &SpdMatrix) -> Vec<f64> {
        let n = a.dim();
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] = (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum();
            }
        }
        c
    }

    #[test]
    fn hand_case() {
        let (l, r) = trace_inverse_convexity(&SpdMatrix::identity(2), &SpdMatrix::diagonal(&[4.0, 1.0]).unwrap(), 0.5).unwrap();
        assert!((l - 2.6).abs() < 1e-15);
        assert!((r - 3.5).abs() < 1e-15);
    }

    #[test]
    fn inverses_are_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            for _ in 0..20 {
                let a = SpdMatrix::random(n, &mut rng);
                let p = matmul(&a, &a.inverse().unwrap());
                for i in 0..n {
                    for j in 0..n {
                        let e = if i == j { 1.0 } else { 0.0 };
                        assert!((p[i * n + j] - e).abs() < 1e-9, "n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn equal_matrices_give_equality() {
        let d = SpdMatrix::diagonal(&[2.0, 0.5, 4.0]).unwrap();
        let (l, r) = trace_inverse_convexity(&d, &d, 0.3).unwrap();
        assert_eq!(l, r);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            let a = SpdMatrix::random(n, &mut rng);
            let (l, r) = trace_inverse_convexity(&a, &a, 0.7).unwrap();
            assert!((l - r).abs() <= 1e-12 * r);
        }
    }

    #[test]
    fn rejects_non_spd() {
        assert_eq!(SpdMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]), Err(Error::NotSpd));
        assert_eq!(SpdMatrix::new(2, vec![1.0, 0.1, 0.2, 1.0]), Err(Error::NotSpd));
        assert!(SpdMatrix::new(2, vec![1.0; 3]).is_err());
        let a = SpdMatrix::identity(2);
        assert!(trace_inverse_convexity(&a, &SpdMatrix::identity(3), 0.5).is_err());
        assert!(trace_inverse_convexity(&a, &a, 1.5).is_err());
    }
}
