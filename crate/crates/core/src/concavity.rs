//! Discrete checks of log-concavity and related shape properties of
//! positive grid functions.
//!
//! Every check runs on the core `{u ≥ τ·max u}` and returns a report with the
//! worst margin it saw; thresholds belong to the caller.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, Link};
use crate::math::{log, sqrt};

pub const DEFAULT_CORE_FRACTION: f64 = 0.01;
/// Pair budget for the midpoint check before it switches to sampling.
pub const MAX_PAIRS: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// `W = −ln u` on the core `{u ≥ τ·max u, u > 0}`; `+∞` elsewhere. `τ = 0`
/// takes every node where `u` is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LogField {
    u: GridFunction,
    w: Vec<f64>,
    core: Vec<bool>,
    tau: f64,
}

impl LogField {
    pub fn new(u: &GridFunction, tau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::InvalidArgument("core fraction must lie in [0, 1)"));
        }
        let cut = tau * u.max();
        let core: Vec<bool> = u.values().iter().map(|v| *v > 0.0 && *v >= cut).collect();
        if !core.iter().any(|c| *c) {
            return Err(Error::EmptyCore);
        }
        let w = u.values().iter().zip(&core).map(|(v, c)| if *c { -log(*v) } else { f64::INFINITY }).collect();
        Ok(Self { u: u.clone(), w, core, tau })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    /// `−ln u` at every node where `u > 0`, core or not.
    pub fn full_values(&self) -> Vec<f64> {
        self.u.values().iter().map(|v| if *v > 0.0 { -log(*v) } else { f64::INFINITY }).collect()
    }

    pub fn in_core(&self, k: usize) -> bool {
        self.core[k]
    }

    pub fn core_nodes(&self) -> Vec<usize> {
        (0..self.core.len()).filter(|k| self.core[*k]).collect()
    }

    /// `W` at a lattice offset from node `k`, if that node is in the core.
    pub fn at_offset(&self, k: usize, di: i64, dj: i64) -> Option<f64> {
        self.grid().offset(k, di, dj).filter(|m| self.core[*m]).map(|m| self.w[m])
    }
}

/// Symmetric 2×2 (or 1×1) matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian {
    pub dim: usize,
    pub m: [[f64; 2]; 2],
}

impl Hessian {
    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim == 1 {
            return self.m[0][0];
        }
        let [[a, b], [_, d]] = self.m;
        let mean = 0.5 * (a + d);
        let rad = sqrt(0.25 * (a - d) * (a - d) + b * b);
        mean - rad
    }

    pub fn max_eigenvalue(&self) -> f64 {
        if self.dim == 1 {
            return self.m[0][0];
        }
        let [[a, b], [_, d]] = self.m;
        0.5 * (a + d) + sqrt(0.25 * (a - d) * (a - d) + b * b)
    }
}

/// Central second differences of `W` at node `k`; `None` if the 3×3 (or
/// 3-point) stencil leaves the core.
pub fn discrete_hessian(w: &LogField, k: usize) -> Option<Hessian> {
    if !w.in_core(k) {
        return None;
    }
    let h2 = w.grid().h() * w.grid().h();
    let c = w.values()[k];
    let xx = (w.at_offset(k, 1, 0)? - 2.0 * c + w.at_offset(k, -1, 0)?) / h2;
    if w.grid().dim() == 1 {
        return Some(Hessian { dim: 1, m: [[xx, 0.0], [0.0, 0.0]] });
    }
    let yy = (w.at_offset(k, 0, 1)? - 2.0 * c + w.at_offset(k, 0, -1)?) / h2;
    let xy = (w.at_offset(k, 1, 1)? - w.at_offset(k, 1, -1)? - w.at_offset(k, -1, 1)? + w.at_offset(k, -1, -1)?) / (4.0 * h2);
    Some(Hessian { dim: 2, m: [[xx, xy], [xy, yy]] })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidpointReport {
    pub pairs_checked: usize,
    /// Whether the pairs were sampled rather than enumerated.
    pub sampled: bool,
    pub violations: usize,
    /// Minimum of `ln u(mid) − ½(ln u(x) + ln u(y))`.
    pub worst_margin: f64,
    pub worst_pair: Option<([f64; 2], [f64; 2])>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointOptions {
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for MidpointOptions {
    fn default() -> Self {
        Self { max_pairs: MAX_PAIRS, seed: DEFAULT_SEED }
    }
}

pub fn check_midpoint_logconcavity(u: &GridFunction, tau: f64, tol: f64) -> Result<MidpointReport> {
    check_midpoint_logconcavity_with(u, tau, tol, &MidpointOptions::default())
}

/// Midpoint log-concavity over core pairs whose midpoint is a lattice node.
///
/// A midpoint outside the interior mask counts as `u = 0`, i.e. a violation.
pub fn check_midpoint_logconcavity_with(u: &GridFunction, tau: f64, tol: f64, opts: &MidpointOptions) -> Result<MidpointReport> {
    let field = LogField::new(u, tau)?;
    let grid = u.grid();
    let core = field.core_nodes();
    let parity = |k: usize| {
        let [i, j] = grid.lattice(k);
        (i & 1) | ((j & 1) << 1)
    };
    let mut classes: [Vec<usize>; 4] = Default::default();
    for &k in &core {
        classes[parity(k)].push(k);
    }
    let total: usize = classes.iter().map(|c| c.len() * c.len().saturating_sub(1) / 2).sum();
    let mut report = MidpointReport { pairs_checked: 0, sampled: false, violations: 0, worst_margin: f64::INFINITY, worst_pair: None };
    let mut visit = |a: usize, b: usize| {
        let [ia, ja] = grid.lattice(a);
        let [ib, jb] = grid.lattice(b);
        let mid = grid.index((ia + ib) / 2, (ja + jb) / 2);
        let lm = match mid {
            Some(m) if u.values()[m] > 0.0 => log(u.values()[m]),
            _ => f64::NEG_INFINITY,
        };
        let margin = lm + 0.5 * (field.w[a] + field.w[b]);
        report.pairs_checked += 1;
        if margin < -tol {
            report.violations += 1;
        }
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_pair = Some((grid.point(a), grid.point(b)));
        }
    };
    if total <= opts.max_pairs {
        for class in &classes {
            for (p, &a) in class.iter().enumerate() {
                for &b in &class[p + 1..] {
                    visit(a, b);
                }
            }
        }
    } else {
        report.sampled = true;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        // pick a class with probability proportional to its pair count,
        // then a uniform pair inside it
        let weights: Vec<usize> = classes.iter().map(|c| c.len() * c.len().saturating_sub(1) / 2).collect();
        for _ in 0..opts.max_pairs {
            let mut r = rng.random_range(0..total);
            let mut c = 0;
            while r >= weights[c] {
                r -= weights[c];
                c += 1;
            }
            let class = &classes[c];
            let a = rng.random_range(0..class.len());
            let mut b = rng.random_range(0..class.len() - 1);
            if b >= a {
                b += 1;
            }
            visit(class[a], class[b]);
        }
    }
    if report.pairs_checked == 0 {
        report.worst_margin = 0.0;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumReport {
    /// The reported extreme value (a minimum or a maximum, per check).
    pub value: f64,
    pub location: Option<[f64; 2]>,
    pub nodes_checked: usize,
}

/// Smallest eigenvalue of the discrete Hessian of `−ln u` over core nodes
/// with a full stencil.
pub fn check_strong_logconcavity(u: &GridFunction, tau: f64) -> Result<ExtremumReport> {
    let field = LogField::new(u, tau)?;
    let mut rep = ExtremumReport { value: f64::INFINITY, location: None, nodes_checked: 0 };
    for k in field.core_nodes() {
        if let Some(hs) = discrete_hessian(&field, k) {
            rep.nodes_checked += 1;
            let e = hs.min_eigenvalue();
            if e < rep.value {
                rep.value = e;
                rep.location = Some(u.grid().point(k));
            }
        }
    }
    if rep.nodes_checked == 0 {
        return Err(Error::EmptyCore);
    }
    Ok(rep)
}

/// Neighbour distances and values along `axis` at node `k`: `(h₋, u₋, h₊, u₊)`.
/// An arm that leaves the body stops at the crossing point, where `u = 0`.
fn arms(u: &GridFunction, k: usize, axis: usize) -> (f64, f64, f64, f64) {
    let h = u.grid().h();
    let links = u.grid().links(k);
    let arm = |l: &Link| match *l {
        Link::Interior(m) => (h, u.values()[m as usize]),
        Link::Boundary(theta) => (theta * h, 0.0),
    };
    let (hm, um) = arm(&links[2 * axis]);
    let (hp, up) = arm(&links[2 * axis + 1]);
    (hm, um, hp, up)
}

/// Largest discrete Laplacian of `u` over core nodes: the 5-point (3-point
/// in 1D) stencil, with arms shortened to the boundary crossing next to the
/// boundary.
pub fn check_laplacian_sign(u: &GridFunction, tau: f64) -> Result<ExtremumReport> {
    let field = LogField::new(u, tau)?;
    let dim = u.grid().dim();
    let mut rep = ExtremumReport { value: f64::NEG_INFINITY, location: None, nodes_checked: 0 };
    for k in field.core_nodes() {
        let c = u.values()[k];
        let lap: f64 = (0..dim)
            .map(|axis| {
                let (hm, um, hp, up) = arms(u, k, axis);
                2.0 * ((up - c) / hp - (c - um) / hm) / (hp + hm)
            })
            .sum();
        rep.nodes_checked += 1;
        if lap > rep.value {
            rep.value = lap;
            rep.location = Some(u.grid().point(k));
        }
    }
    Ok(rep)
}

/// Largest `⟨x, ∇_h u(x)⟩` over core nodes; central differences, with the
/// same shortened arms as [`check_laplacian_sign`].
pub fn check_starshaped_gradient(u: &GridFunction, tau: f64) -> Result<ExtremumReport> {
    let field = LogField::new(u, tau)?;
    let dim = u.grid().dim();
    let mut rep = ExtremumReport { value: f64::NEG_INFINITY, location: None, nodes_checked: 0 };
    for k in field.core_nodes() {
        let x = u.grid().point(k);
        let c = u.values()[k];
        let v: f64 = (0..dim)
            .map(|axis| {
                let (hm, um, hp, up) = arms(u, k, axis);
                x[axis] * (hm * hm * (up - c) + hp * hp * (c - um)) / (hp * hm * (hp + hm))
            })
            .sum();
        rep.nodes_checked += 1;
        if v > rep.value {
            rep.value = v;
            rep.location = Some(x);
        }
    }
    Ok(rep)
}
