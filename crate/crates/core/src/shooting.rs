//! Shooting-method oracles for the one-dimensional reductions of
//! `Δu − ⟨∇u, x⟩ + λu = 0`:
//!
//! * on an interval, `u'' − x u' + λu = 0` with `u(a) = u(b) = 0`;
//! * on a half-line `{x < a}`, the same equation on `(−T, a)` with a hard wall
//!   at `−T`;
//! * on a centred ball in `Rⁿ`, `u'' + ((n−1)/r − r) u' + λu = 0` with
//!   `u'(0) = 0`, `u(R) = 0`.
//!
//! Each problem is integrated with fixed-step RK4 and the first eigenvalue is
//! located by bisection on `λ`. The bisection predicate is "the shot solution
//! reaches zero before the far endpoint"; by Sturm comparison it is false
//! below the first eigenvalue and true above it, so the bracket always
//! closes on the first mode and never on a higher one.

use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_BRACKET: (f64, f64) = (1e-6, 50.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeKind {
    Interval { a: f64, b: f64 },
    /// `{x < a}`, truncated at `−truncation`.
    HalfLine { a: f64, truncation: f64 },
    RadialBall { dim: usize, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeProblem {
    pub kind: OdeKind,
    pub step: f64,
    pub bracket: (f64, f64),
}

impl OdeProblem {
    pub fn new(kind: OdeKind) -> Self {
        Self { kind, step: DEFAULT_STEP, bracket: DEFAULT_BRACKET }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidArgument("step must be positive"));
        }
        if !(self.bracket.0 < self.bracket.1) {
            return Err(Error::InvalidArgument("empty eigenvalue bracket"));
        }
        match self.kind {
            OdeKind::Interval { a, b } if !(a < b) => Err(Error::InvalidArgument("interval needs a < b")),
            OdeKind::HalfLine { a, truncation } if !(truncation >= 6.0 && -truncation < a) => {
                Err(Error::InvalidArgument("half-line truncation must satisfy T ≥ 6 and −T < a"))
            }
            OdeKind::RadialBall { dim, .. } if dim < 2 => {
                Err(Error::InvalidArgument("radial problem needs dimension ≥ 2; use the interval solver"))
            }
            OdeKind::RadialBall { radius, .. } if !(radius > 0.0) => {
                Err(Error::InvalidArgument("radius must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Integration range `(start, end)`.
    fn span(&self) -> (f64, f64) {
        match self.kind {
            OdeKind::Interval { a, b } => (a, b),
            OdeKind::HalfLine { a, truncation } => (-truncation, a),
            OdeKind::RadialBall { radius, .. } => (0.0, radius),
        }
    }
}

/// Eigenpair of a 1D reduction. `values` are normalised to `max = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeEigenResult {
    pub lambda: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Max of the pointwise ODE residual (5-point second derivative) and the
    /// far-endpoint mismatch, both relative to `max u = 1`.
    pub residual: f64,
}

struct Shot {
    crossed: bool,
    nodes: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
}

/// `u'' = f(x, u, u')` for the problem.
#[inline]
fn accel(kind: &OdeKind, x: f64, u: f64, du: f64, lambda: f64) -> f64 {
    match kind {
        OdeKind::RadialBall { dim, .. } => -((*dim as f64 - 1.0) / x - x) * du - lambda * u,
        _ => x * du - lambda * u,
    }
}

fn shoot(problem: &OdeProblem, lambda: f64, keep: bool) -> Shot {
    let (start, end) = problem.span();
    let kind = &problem.kind;
    // Regular singular point at r = 0: start from the Taylor expansion
    // u = 1 + c₂r² + c₄r⁴.
    let (x0, mut u, mut du) = match kind {
        OdeKind::RadialBall { dim, .. } => {
            let n = *dim as f64;
            let r0 = problem.step.min(0.01 * (end - start));
            let c2 = -lambda / (2.0 * n);
            let c4 = c2 * (2.0 - lambda) / (4.0 * n + 8.0);
            let r2 = r0 * r0;
            (r0, 1.0 + c2 * r2 + c4 * r2 * r2, 2.0 * c2 * r0 + 4.0 * c4 * r2 * r0)
        }
        _ => (start, 0.0, 1.0),
    };
    let steps = libm::ceil((end - x0) / problem.step).max(4.0) as usize;
    let dx = (end - x0) / steps as f64;
    let mut shot = Shot { crossed: false, nodes: Vec::new(), u: Vec::new(), du: Vec::new() };
    if keep {
        shot.nodes.reserve(steps + 2);
        if matches!(kind, OdeKind::RadialBall { .. }) {
            shot.nodes.push(0.0);
            shot.u.push(1.0);
            shot.du.push(0.0);
        }
        shot.nodes.push(x0);
        shot.u.push(u);
        shot.du.push(du);
    }
    let f = |x: f64, u: f64, du: f64| accel(kind, x, u, du, lambda);
    for i in 0..steps {
        let x = x0 + i as f64 * dx;
        let k1u = du;
        let k1v = f(x, u, du);
        let k2u = du + 0.5 * dx * k1v;
        let k2v = f(x + 0.5 * dx, u + 0.5 * dx * k1u, k2u);
        let k3u = du + 0.5 * dx * k2v;
        let k3v = f(x + 0.5 * dx, u + 0.5 * dx * k2u, k3u);
        let k4u = du + dx * k3v;
        let k4v = f(x + dx, u + dx * k3u, k4u);
        u += dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += dx / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if keep {
            shot.nodes.push(if i + 1 == steps { end } else { x0 + (i + 1) as f64 * dx });
            shot.u.push(u);
            shot.du.push(du);
        }
        if u <= 0.0 {
            shot.crossed = true;
            if !keep {
                return shot;
            }
        }
    }
    shot
}

/// First eigenvalue and eigenfunction of the problem, with the eigenvalue
/// bracketed to relative width `tol`.
pub fn solve(problem: &OdeProblem, tol: f64) -> Result<OdeEigenResult> {
    problem.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let (mut lo, mut hi) = problem.bracket;
    if shoot(problem, lo, false).crossed || !shoot(problem, hi, false).crossed {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > 0.5 * tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shoot(problem, mid, false).crossed {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    // The lower end never crosses, so its profile is the positive one.
    let mut shot = shoot(problem, lambda, true);
    if shot.u[1..shot.u.len() - 1].iter().any(|v| *v <= 0.0) {
        shot = shoot(problem, lo, true);
    }
    let peak = shot.u.iter().fold(0.0_f64, |m, v| m.max(*v));
    let values: Vec<f64> = shot.u.iter().map(|v| v / peak).collect();
    let du: Vec<f64> = shot.du.iter().map(|v| v / peak).collect();
    let residual = ode_residual(&problem.kind, lambda, &shot.nodes, &values, &du)
        .max(values.last().copied().unwrap_or(0.0).abs());
    Ok(OdeEigenResult { lambda, nodes: shot.nodes, values, residual })
}

/// Max over interior samples of `|u'' − f(x, u, u')|`, with `u''` from a
/// 5-point stencil on the (uniform) integration grid.
fn ode_residual(kind: &OdeKind, lambda: f64, x: &[f64], u: &[f64], du: &[f64]) -> f64 {
    // The radial grid starts with the extra r = 0 node; skip it.
    let first = if matches!(kind, OdeKind::RadialBall { .. }) { 1 } else { 0 };
    let x = &x[first..];
    let u = &u[first..];
    let du = &du[first..];
    if x.len() < 6 {
        return 0.0;
    }
    let dx = x[1] - x[0];
    (2..x.len() - 2)
        .map(|i| {
            let d2 = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / (12.0 * dx * dx);
            (d2 - accel(kind, x[i], u[i], du[i], lambda)).abs()
        })
        .fold(0.0, f64::max)
}

pub fn solve_interval(a: f64, b: f64, tol: f64) -> Result<OdeEigenResult> {
    solve(&OdeProblem::new(OdeKind::Interval { a, b }), tol)
}

/// Half-line `{x < a}` proxied by `(−T, a)`. Fails with
/// [`Error::TruncationUnstable`] when moving the wall to `−T − 2` changes
/// the eigenvalue by more than `tol` (relative).
pub fn solve_halfline(a: f64, truncation: f64, tol: f64) -> Result<OdeEigenResult> {
    let base = OdeProblem::new(OdeKind::HalfLine { a, truncation });
    let result = solve(&base, tol)?;
    let wider = solve(&OdeProblem { kind: OdeKind::HalfLine { a, truncation: truncation + 2.0 }, ..base }, tol)?;
    if (wider.lambda - result.lambda).abs() > tol * result.lambda.max(1.0) {
        return Err(Error::TruncationUnstable { lambda: result.lambda, lambda_wider: wider.lambda });
    }
    Ok(result)
}

pub fn solve_radial(dim: usize, radius: f64, tol: f64) -> Result<OdeEigenResult> {
    solve(&OdeProblem::new(OdeKind::RadialBall { dim, radius }), tol)
}
