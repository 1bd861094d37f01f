//! First Dirichlet eigenpair of the discrete Ornstein-Uhlenbeck form.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::form::{assemble, DiscreteOUForm};
use crate::geometry::ConvexBody;
use crate::grid::{build_grid, GridFunction};
use crate::math::{dot, log, sqrt};

/// Default residual tolerance `‖Au − λMu‖ / ‖Mu‖`.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Outer iteration cap for inverse iteration.
pub const MAX_ITERATIONS: usize = 500;
/// Outer iterations before switching to a shifted solve.
pub const STALL_ITERATIONS: usize = 50;
const SHIFT_FRACTION: f64 = 0.9;
const MAX_CG_ITERATIONS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub lambda: f64,
    /// Positive, normalised to `max = 1`.
    pub eigenfunction: GridFunction,
    pub iterations: usize,
    pub residual: f64,
    pub h: f64,
}

/// Discretisation-error estimate `ε = safety·|λ_h − λ_{h/2}|` from the two
/// finest levels of a refinement sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceBudget {
    pub epsilon: f64,
    pub lambda_coarse: f64,
    pub lambda_fine: f64,
    pub safety: f64,
}

impl ToleranceBudget {
    pub fn from_pair(lambda_coarse: f64, lambda_fine: f64, safety: f64) -> Self {
        Self { epsilon: safety * (lambda_coarse - lambda_fine).abs(), lambda_coarse, lambda_fine, safety }
    }
}

/// `(fᵀAf)/(fᵀMf)`.
pub fn rayleigh_quotient(form: &DiscreteOUForm, f: &GridFunction) -> Result<f64> {
    if f.values().len() != form.len() {
        return Err(Error::InvalidArgument("grid function does not belong to this form"));
    }
    let den = form.mass_norm2(f.values());
    if den <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(form.bilinear(f.values(), f.values()) / den)
}

/// Jacobi-preconditioned conjugate gradients for `(A − σM) x = b`, started
/// from the supplied `x`. Returns the iteration count, or `None` if the
/// shifted matrix shows non-positive curvature.
fn pcg(form: &DiscreteOUForm, sigma: f64, b: &[f64], x: &mut [f64], rel_tol: f64) -> Option<usize> {
    let n = b.len();
    let inv_diag: Vec<f64> = form.diag().iter().zip(form.mass()).map(|(d, m)| 1.0 / (d - sigma * m)).collect();
    if inv_diag.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let mut r = vec![0.0; n];
    form.apply_shifted(sigma, x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }
    let target = rel_tol * sqrt(dot(b, b));
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..MAX_CG_ITERATIONS {
        if sqrt(dot(&r, &r)) <= target {
            return Some(it);
        }
        form.apply_shifted(sigma, &p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return None;
        }
        let alpha = rz / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Some(MAX_CG_ITERATIONS)
}

fn m_normalize(form: &DiscreteOUForm, u: &mut [f64]) {
    let s = sqrt(form.mass_norm2(u));
    u.iter_mut().for_each(|v| *v /= s);
}

/// Rayleigh quotient and relative residual of an M-normalised vector.
fn rho_residual(form: &DiscreteOUForm, u: &[f64], au: &mut [f64]) -> (f64, f64) {
    form.apply(u, au);
    let rho = dot(u, au);
    let mut r2 = 0.0;
    let mut m2 = 0.0;
    for (k, m) in form.mass().iter().enumerate() {
        let mu = m * u[k];
        let d = au[k] - rho * mu;
        r2 += d * d;
        m2 += mu * mu;
    }
    (rho, sqrt(r2 / m2))
}

/// Smallest generalised eigenpair of `Au = λMu` by inverse iteration.
///
/// Starts unshifted; if the residual has not reached `tol` after
/// [`STALL_ITERATIONS`] it continues with the shift `0.9·ρ`, falling back to
/// no shift if that matrix turns out indefinite.
pub fn first_eigenpair(form: &DiscreteOUForm, tol: f64) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let n = form.len();
    let mut u = vec![1.0; n];
    m_normalize(form, &mut u);
    let mut au = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let (mut rho, mut residual) = rho_residual(form, &u, &mut au);
    let mut sigma = 0.0;
    let mut iterations = 0;
    while residual > tol {
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NoConvergence { iterations, residual });
        }
        if iterations == STALL_ITERATIONS {
            sigma = SHIFT_FRACTION * rho;
        }
        for k in 0..n {
            rhs[k] = form.mass()[k] * u[k];
        }
        // warm start: u is close to an eigenvector, so y ≈ u/(ρ − σ)
        let mut y: Vec<f64> = u.iter().map(|v| v / (rho - sigma)).collect();
        if pcg(form, sigma, &rhs, &mut y, 0.1 * tol).is_none() {
            sigma = 0.0;
            y = u.iter().map(|v| v / rho).collect();
            pcg(form, 0.0, &rhs, &mut y, 0.1 * tol).ok_or(Error::NotSpd)?;
        }
        m_normalize(form, &mut y);
        u = y;
        (rho, residual) = rho_residual(form, &u, &mut au);
        iterations += 1;
    }
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    let max = u.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    u.iter_mut().for_each(|v| *v /= max);
    let min = u.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if min < -tol {
        return Err(Error::ModeMixing { min_value: min });
    }
    let h = form.grid().h();
    let eigenfunction = GridFunction::new(form.grid().clone(), u)?;
    Ok(EigenResult { lambda: rho, eigenfunction, iterations, residual, h })
}

/// Build, assemble and solve in one step.
pub fn solve_body(body: &ConvexBody, h: f64, tol: f64) -> Result<EigenResult> {
    let grid = Arc::new(build_grid(body, h)?);
    first_eigenpair(&assemble(grid), tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub tol: f64,
    pub safety: f64,
    /// Smallest acceptable empirical order over the last three levels.
    pub min_order: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, safety: 2.0, min_order: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedEigenvalue {
    pub lambda: f64,
    pub budget: ToleranceBudget,
    /// Empirical order from the last three levels.
    pub order: f64,
    /// `(h, λ_h)` for every level, coarse to fine.
    pub levels: Vec<(f64, f64)>,
    pub finest: EigenResult,
}

/// Eigenvalue on the finest spacing of `h_seq` with its error budget.
pub fn converged_eigenvalue(body: &ConvexBody, h_seq: &[f64]) -> Result<ConvergedEigenvalue> {
    converged_eigenvalue_with(body, h_seq, &ConvergenceOptions::default())
}

pub fn converged_eigenvalue_with(body: &ConvexBody, h_seq: &[f64], opts: &ConvergenceOptions) -> Result<ConvergedEigenvalue> {
    if h_seq.len() < 3 {
        return Err(Error::InvalidArgument("need at least three spacings"));
    }
    if h_seq.windows(2).any(|w| !(w[1] < w[0])) || !(h_seq[h_seq.len() - 1] > 0.0) {
        return Err(Error::InvalidArgument("spacings must be positive and strictly decreasing"));
    }
    if !(opts.safety >= 2.0) {
        return Err(Error::InvalidArgument("safety factor must be at least 2"));
    }
    let mut levels = Vec::with_capacity(h_seq.len());
    let mut finest = None;
    for &h in h_seq {
        let r = solve_body(body, h, opts.tol)?;
        levels.push((h, r.lambda));
        finest = Some(r);
    }
    let finest = finest.expect("at least three levels");
    let k = levels.len();
    let (h0, l0) = levels[k - 3];
    let (h1, l1) = levels[k - 2];
    let (h2, l2) = levels[k - 1];
    let d1 = (l0 - l1).abs();
    let d2 = (l1 - l2).abs();
    // rounding-level differences count as converged
    let noise = 1e3 * f64::EPSILON * l2.abs().max(1.0);
    let order = if d2 <= noise {
        f64::INFINITY
    } else if d2 >= d1 {
        return Err(Error::Stagnation);
    } else {
        // ratio of successive differences against the mean spacing ratio
        log(d1 / d2) / (0.5 * log((h0 / h1) * (h1 / h2)))
    };
    if order < opts.min_order {
        return Err(Error::SlowConvergence { order });
    }
    let mut budget = ToleranceBudget::from_pair(l1, l2, opts.safety);
    budget.epsilon = budget.epsilon.max(noise);
    Ok(ConvergedEigenvalue { lambda: l2, budget, order, levels, finest })
}
