//! Discrete Legendre-Fenchel transforms and the sup-convolution
//! `u_t(x) = max{u₀(x₀)^{1−t} u₁(x₁)^t : x = (1−t)x₀ + t x₁}`.
//!
//! With `w_i = −ln u_i` the sup-convolution is `e^{−w_t}` where `w_t` is the
//! infimal convolution `inf{(1−t)w₀(x₀) + t w₁(x₁)}`, which for convex `w_i`
//! equals `((1−t)w₀* + t w₁*)*`. The transforms are computed on a product
//! grid of slopes, one axis at a time, with the linear-time hull walk.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::concavity::{discrete_hessian, LogField};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::math::{ceil, exp, log, sqrt};

/// Uniform slope spacing of [`SlopeGrid::graded`] near the origin.
pub const DEFAULT_SLOPE_SPACING: f64 = 0.02;
/// Past this magnitude [`SlopeGrid::graded`] spaces slopes geometrically.
pub const DEFAULT_SLOPE_CORE: f64 = 4.0;
pub const DEFAULT_SLOPE_GROWTH: f64 = 1.02;
/// Half-width of the dual difference stencil in units of `h·λ_max(D²W)`.
pub const DUAL_STENCIL_FACTOR: f64 = 4.0;

/// Product grid of sorted slopes, symmetric about zero on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeGrid {
    dim: usize,
    axes: [Vec<f64>; 2],
}

impl SlopeGrid {
    /// `{−Y, …, −δ, 0, δ, …, Y}` with `Y` rounded up to a multiple of `δ`.
    pub fn uniform(dim: usize, y_max: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && y_max > 0.0 && y_max.is_finite()) {
            return Err(Error::InvalidArgument("slope range and spacing must be positive"));
        }
        let n = libm::ceil(y_max / spacing - 1e-9) as i64;
        let axis: Vec<f64> = (-n..=n).map(|k| k as f64 * spacing).collect();
        Self::from_axis(dim, axis)
    }

    /// Spacing `δ` out to `y_core`, then growing by the factor `growth` until
    /// `y_max` is covered.
    pub fn graded_with(dim: usize, y_max: f64, spacing: f64, y_core: f64, growth: f64) -> Result<Self> {
        if !(spacing > 0.0 && y_max > 0.0 && y_max.is_finite() && y_core > 0.0 && growth > 1.0) {
            return Err(Error::InvalidArgument("invalid slope grid parameters"));
        }
        let mut half = vec![0.0];
        let mut y = 0.0;
        while y < y_max {
            y = if y < y_core { y + spacing } else { (y * growth).max(y + spacing) };
            half.push(y);
        }
        let mut axis: Vec<f64> = half.iter().rev().map(|v| -v).collect();
        axis.extend_from_slice(&half[1..]);
        Self::from_axis(dim, axis)
    }

    pub fn graded(dim: usize, y_max: f64) -> Result<Self> {
        Self::graded_with(dim, y_max, DEFAULT_SLOPE_SPACING, DEFAULT_SLOPE_CORE, DEFAULT_SLOPE_GROWTH)
    }

    fn from_axis(dim: usize, axis: Vec<f64>) -> Result<Self> {
        match dim {
            1 => Ok(Self { dim, axes: [axis, vec![0.0]] }),
            2 => Ok(Self { dim, axes: [axis.clone(), axis] }),
            _ => Err(Error::InvalidArgument("slope grids exist in one and two dimensions")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axis(&self, a: usize) -> &[f64] {
        &self.axes[a]
    }

    /// Largest slope magnitude covered on every axis.
    pub fn y_max(&self) -> f64 {
        let a = &self.axes[0];
        a[a.len() - 1].min(-a[0])
    }

    pub fn len(&self) -> usize {
        self.axes[0].len() * self.axes[1].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, a: usize, b: usize) -> [f64; 2] {
        [self.axes[0][a], self.axes[1][b]]
    }
}

/// Values on a [`SlopeGrid`], row major: `(a, b)` at `b·n₀ + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunction {
    slopes: SlopeGrid,
    values: Vec<f64>,
}

impl DualFunction {
    pub fn slopes(&self) -> &SlopeGrid {
        &self.slopes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.values[b * self.slopes.axes[0].len() + a]
    }
}

/// `out[k] = max_i (s_k x_i − f_i)` for increasing `xs` and `slopes`;
/// `+∞` values are skipped, an empty set gives `−∞`.
fn llt_1d(xs: &[f64], fs: &[f64], slopes: &[f64], out: &mut [f64]) {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for (&x, &f) in xs.iter().zip(fs) {
        if f == f64::INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (x1, f1) = hull[hull.len() - 2];
            let (x2, f2) = hull[hull.len() - 1];
            // drop the middle point if it lies on or above the chord
            if (f2 - f1) * (x - x1) >= (f - f1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, f));
    }
    if hull.is_empty() {
        out.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
        return;
    }
    let mut k = 0;
    for (s, o) in slopes.iter().zip(out.iter_mut()) {
        while k + 1 < hull.len() && *s * (hull[k + 1].0 - hull[k].0) >= hull[k + 1].1 - hull[k].1 {
            k += 1;
        }
        *o = s * hull[k].0 - hull[k].1;
    }
}

/// Conjugate of `f` sampled on the product lattice `xs × ys` (row major,
/// `+∞` allowed), evaluated on `sx × sy`.
fn conjugate_product(xs: &[f64], ys: &[f64], f: &[f64], sx: &[f64], sy: &[f64]) -> Vec<f64> {
    let (nx, ny, mx, my) = (xs.len(), ys.len(), sx.len(), sy.len());
    // phi[j][a] = max_i (sx_a xs_i − f(i, j))
    let mut phi = vec![0.0; ny * mx];
    for j in 0..ny {
        llt_1d(xs, &f[j * nx..(j + 1) * nx], sx, &mut phi[j * mx..(j + 1) * mx]);
    }
    let mut out = vec![0.0; mx * my];
    let mut g = vec![0.0; ny];
    let mut col = vec![0.0; my];
    for a in 0..mx {
        for j in 0..ny {
            g[j] = -phi[j * mx + a];
        }
        llt_1d(ys, &g, sy, &mut col);
        for b in 0..my {
            out[b * mx + a] = col[b];
        }
    }
    out
}

/// Lattice values of `f` over the grid's full box, `+∞` off the mask.
fn boxed_values(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let [nx, ny] = grid.shape();
    let mut out = vec![f64::INFINITY; nx * ny];
    for (k, v) in values.iter().enumerate() {
        let [i, j] = grid.lattice(k);
        out[j * nx + i] = *v;
    }
    out
}

fn grid_axes(grid: &Grid) -> (Vec<f64>, Vec<f64>) {
    let ys = if grid.dim() == 2 { grid.axis(1) } else { vec![0.0] };
    (grid.axis(0), ys)
}

fn check_dims(grid: &Grid, slopes: &SlopeGrid) -> Result<()> {
    if grid.dim() != slopes.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: slopes.dim() });
    }
    Ok(())
}

fn masked_conjugate(grid: &Grid, values: &[f64], slopes: &SlopeGrid) -> Result<DualFunction> {
    check_dims(grid, slopes)?;
    if !values.iter().any(|v| *v < f64::INFINITY) {
        return Err(Error::EmptyCore);
    }
    let (xs, ys) = grid_axes(grid);
    let boxed = boxed_values(grid, values);
    let values = conjugate_product(&xs, &ys, &boxed, slopes.axis(0), slopes.axis(1));
    Ok(DualFunction { slopes: slopes.clone(), values })
}

/// `f*(y) = max_x ⟨x, y⟩ − f(x)` over the interior nodes of `f`'s grid.
pub fn legendre_transform(f: &GridFunction, slopes: &SlopeGrid) -> Result<DualFunction> {
    masked_conjugate(f.grid(), f.values(), slopes)
}

/// Conjugate of `W` over its core (`+∞` elsewhere).
pub fn legendre_transform_field(w: &LogField, slopes: &SlopeGrid) -> Result<DualFunction> {
    masked_conjugate(w.grid(), w.values(), slopes)
}

/// Same as [`legendre_transform`] by direct maximisation, `O(N·M)`.
pub fn legendre_transform_brute(f: &GridFunction, slopes: &SlopeGrid) -> Result<DualFunction> {
    check_dims(f.grid(), slopes)?;
    let grid = f.grid();
    let mut values = Vec::with_capacity(slopes.len());
    for b in 0..slopes.axes[1].len() {
        for a in 0..slopes.axes[0].len() {
            let y = slopes.point(a, b);
            let best = (0..grid.len()).fold(f64::NEG_INFINITY, |m, k| {
                let x = grid.point(k);
                m.max(x[0] * y[0] + x[1] * y[1] - f.values()[k])
            });
            values.push(best);
        }
    }
    Ok(DualFunction { slopes: slopes.clone(), values })
}

/// `v*(x) = max_y ⟨x, y⟩ − v(y)` at the interior nodes of `target`.
pub fn inverse_transform(v: &DualFunction, target: &Grid) -> Result<Vec<f64>> {
    check_dims(target, &v.slopes)?;
    let (xs, ys) = grid_axes(target);
    let boxed = conjugate_product(v.slopes.axis(0), v.slopes.axis(1), &v.values, &xs, &ys);
    let nx = xs.len();
    Ok((0..target.len())
        .map(|k| {
            let [i, j] = target.lattice(k);
            boxed[j * nx + i]
        })
        .collect())
}

/// Largest one-sided difference quotient `|∂_k W|` between core neighbours.
pub fn max_gradient(w: &LogField) -> f64 {
    let h = w.grid().h();
    let dim = w.grid().dim();
    let mut m: f64 = 0.0;
    for k in w.core_nodes() {
        for (di, dj) in [(1, 0), (0, 1)].into_iter().take(dim) {
            if let Some(n) = w.at_offset(k, di, dj) {
                m = m.max((n - w.values()[k]).abs() / h);
            }
        }
    }
    m
}

/// Graded slope grid covering twice the largest discrete gradient of the
/// given fields.
pub fn slopes_for(fields: &[&LogField]) -> Result<SlopeGrid> {
    let dim = fields.first().ok_or(Error::InvalidArgument("no fields"))?.grid().dim();
    let y = fields.iter().map(|f| max_gradient(f)).fold(DEFAULT_SLOPE_CORE, f64::max);
    SlopeGrid::graded(dim, 2.0 * y)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument("t must lie in [0, 1]"));
    }
    Ok(())
}

fn check_inputs(u0: &GridFunction, u1: &GridFunction, t: f64, target: &Grid) -> Result<()> {
    check_t(t)?;
    let dim = target.dim();
    for g in [u0.grid(), u1.grid()] {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
    }
    if u0.values().iter().chain(u1.values()).any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("sup-convolution needs non-negative functions"));
    }
    Ok(())
}

/// `u₀(x₀)^{1−t} u₁(x₁)^t` maximised over node pairs whose combination
/// `(1−t)x₀ + t x₁` rounds to the target node. Nodes with no admissible pair
/// get zero. `O(N₀·N₁)`.
pub fn sup_convolution_direct(u0: &GridFunction, u1: &GridFunction, t: f64, target: &Arc<Grid>) -> Result<GridFunction> {
    check_inputs(u0, u1, t, target)?;
    let (g0, g1) = (u0.grid(), u1.grid());
    let logs = |u: &GridFunction| -> Vec<f64> {
        u.values().iter().map(|v| if *v > 0.0 { log(*v) } else { f64::NEG_INFINITY }).collect()
    };
    let (l0, l1) = (logs(u0), logs(u1));
    let mut best = vec![f64::NEG_INFINITY; target.len()];
    let dim = target.dim();
    for a in 0..g0.len() {
        if t < 1.0 && l0[a] == f64::NEG_INFINITY {
            continue;
        }
        let x0 = g0.point(a);
        let la = if t < 1.0 { (1.0 - t) * l0[a] } else { 0.0 };
        for b in 0..g1.len() {
            if t > 0.0 && l1[b] == f64::NEG_INFINITY {
                continue;
            }
            let x1 = g1.point(b);
            let i = target.nearest_index(0, (1.0 - t) * x0[0] + t * x1[0]);
            let j = if dim == 2 { target.nearest_index(1, (1.0 - t) * x0[1] + t * x1[1]) } else { 0 };
            if i < 0 || j < 0 {
                continue;
            }
            if let Some(k) = target.index(i as usize, j as usize) {
                let v = la + if t > 0.0 { t * l1[b] } else { 0.0 };
                if v > best[k] {
                    best[k] = v;
                }
            }
        }
    }
    GridFunction::new(target.clone(), best.iter().map(|v| exp(*v)).collect())
}

/// Lower convex hull boundary (counter-clockwise) of a point set.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: alloc::boxed::Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { alloc::boxed::Box::new(pts.iter()) } else { alloc::boxed::Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Membership test for `(1−t)·hull(P₀) + t·hull(P₁)` via the edge normals
/// of both hulls.
struct CombinedHull {
    normals: Vec<[f64; 2]>,
    offsets: Vec<f64>,
    slack: f64,
}

impl CombinedHull {
    fn new(p0: Vec<[f64; 2]>, p1: Vec<[f64; 2]>, t: f64, dim: usize) -> Self {
        let scale = p0.iter().chain(&p1).fold(1.0_f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        let slack = 1e-9 * scale;
        let (h0, h1) = (convex_hull(p0), convex_hull(p1));
        let mut normals: Vec<[f64; 2]> = if dim == 1 { vec![[1.0, 0.0], [-1.0, 0.0]] } else { Vec::new() };
        if dim == 2 {
            for h in [&h0, &h1] {
                if h.len() < 3 {
                    // degenerate hulls: fall back to the axis and diagonal directions
                    for d in [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]] {
                        normals.push(d);
                    }
                    continue;
                }
                for e in 0..h.len() {
                    let (a, b) = (h[e], h[(e + 1) % h.len()]);
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    let n = sqrt(dx * dx + dy * dy);
                    normals.push([dy / n, -dx / n]);
                }
            }
        }
        let support = |h: &[[f64; 2]], n: [f64; 2]| h.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p[0] * n[0] + p[1] * n[1]));
        let offsets = normals.iter().map(|n| (1.0 - t) * support(&h0, *n) + t * support(&h1, *n)).collect();
        Self { normals, offsets, slack }
    }

    fn contains(&self, x: [f64; 2]) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(n, o)| n[0] * x[0] + n[1] * x[1] <= o + self.slack)
    }
}

/// Sup-convolution through conjugates: `w_i = −ln u_i` on the nodes where
/// `u_i > 0`, `v_i = w_i*`, `u_t = exp(−((1−t)v₀ + t v₁)*)`. Target nodes
/// outside the combination of the two node hulls get zero.
///
/// Fails with [`Error::SlopeRangeTooSmall`] if either field has discrete
/// gradients beyond the slope range.
pub fn sup_convolution_fast(u0: &GridFunction, u1: &GridFunction, t: f64, target: &Arc<Grid>, slopes: &SlopeGrid) -> Result<GridFunction> {
    check_inputs(u0, u1, t, target)?;
    check_dims(target, slopes)?;
    let f0 = LogField::new(u0, 0.0)?;
    let f1 = LogField::new(u1, 0.0)?;
    let needed = max_gradient(&f0).max(max_gradient(&f1));
    if needed > slopes.y_max() {
        return Err(Error::SlopeRangeTooSmall { needed, available: slopes.y_max() });
    }
    let mut mix = vec![0.0; slopes.len()];
    for (f, weight) in [(&f0, 1.0 - t), (&f1, t)] {
        if weight == 0.0 {
            continue;
        }
        let v = legendre_transform_field(f, slopes)?;
        for (m, x) in mix.iter_mut().zip(v.values()) {
            *m += weight * x;
        }
    }
    let w_t = inverse_transform(&DualFunction { slopes: slopes.clone(), values: mix }, target)?;
    let nodes = |f: &LogField| -> Vec<[f64; 2]> { f.core_nodes().into_iter().map(|k| f.grid().point(k)).collect() };
    let hull = CombinedHull::new(nodes(&f0), nodes(&f1), t, target.dim());
    let values = (0..target.len())
        .map(|k| if hull.contains(target.point(k)) { exp(-w_t[k]) } else { 0.0 })
        .collect();
    GridFunction::new(target.clone(), values)
}

/// [`sup_convolution_fast`] on a graded slope grid sized from the inputs.
pub fn sup_convolution(u0: &GridFunction, u1: &GridFunction, t: f64, target: &Arc<Grid>) -> Result<GridFunction> {
    let f0 = LogField::new(u0, 0.0)?;
    let f1 = LogField::new(u1, 0.0)?;
    let slopes = slopes_for(&[&f0, &f1])?;
    sup_convolution_fast(u0, u1, t, target, &slopes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianConjugateReport {
    /// Largest `‖D²W(x)·D²v(∇W(x)) − I‖₂` over the samples.
    pub max_deviation: f64,
    pub location: Option<[f64; 2]>,
    pub samples: usize,
    pub skipped: usize,
}

/// Second differences of `v` at slope node `(a, b)` with index steps
/// `m = [mx, my]` on a possibly non-uniform grid; `None` if the stencil
/// leaves the grid.
fn dual_hessian(v: &DualFunction, a: usize, b: usize, m: [usize; 2]) -> Option<[[f64; 2]; 2]> {
    let s = &v.slopes;
    let (n0, n1) = (s.axes[0].len(), s.axes[1].len());
    let [mx, my] = m;
    if a < mx || a + mx >= n0 {
        return None;
    }
    let second = |m: f64, c: f64, p: f64, dm: f64, dp: f64| 2.0 * ((p - c) / dp - (c - m) / dm) / (dp + dm);
    let ax = &s.axes[0];
    let (al, ar) = (a - mx, a + mx);
    let xx = second(v.at(al, b), v.at(a, b), v.at(ar, b), ax[a] - ax[al], ax[ar] - ax[a]);
    if s.dim == 1 {
        return Some([[xx, 0.0], [0.0, 0.0]]);
    }
    if b < my || b + my >= n1 {
        return None;
    }
    let ay = &s.axes[1];
    let (bl, br) = (b - my, b + my);
    let yy = second(v.at(a, bl), v.at(a, b), v.at(a, br), ay[b] - ay[bl], ay[br] - ay[b]);
    let xy = (v.at(ar, br) - v.at(ar, bl) - v.at(al, br) + v.at(al, bl)) / ((ax[ar] - ax[al]) * (ay[br] - ay[bl]));
    Some([[xx, xy], [xy, yy]])
}

fn nearest(axis: &[f64], y: f64) -> (usize, f64) {
    let p = axis.partition_point(|v| *v < y);
    let cands = [p.saturating_sub(1), p.min(axis.len() - 1)];
    cands.into_iter().map(|i| (i, (axis[i] - y).abs())).fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
}

/// Spectral norm of a 2×2 matrix.
fn norm2x2(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    sqrt(0.5 * (s + sqrt((s * s - 4.0 * det * det).max(0.0))))
}

/// Compares `D²W(x)` with the inverse of `D²v` at the slope node nearest to
/// `∇W(x)`, `v = W*`, for every `stride`-th core node with a full stencil.
/// The conjugate runs over every node with `u > 0`, so the rim of the core
/// does not truncate it. Nodes whose gradient is farther than one slope
/// spacing from any slope node are skipped.
pub fn hessian_conjugate_check(w: &LogField, slopes: &SlopeGrid, stride: usize) -> Result<HessianConjugateReport> {
    hessian_conjugate_check_with(w, slopes, stride, DUAL_STENCIL_FACTOR)
}

/// [`hessian_conjugate_check`] with the dual stencil half-width set to
/// `factor·h·λ_max(D²W)`.
pub fn hessian_conjugate_check_with(w: &LogField, slopes: &SlopeGrid, stride: usize, factor: f64) -> Result<HessianConjugateReport> {
    let v = masked_conjugate(w.grid(), &w.full_values(), slopes)?;
    let h = w.grid().h();
    let dim = w.grid().dim();
    let mut rep = HessianConjugateReport { max_deviation: 0.0, location: None, samples: 0, skipped: 0 };
    for k in w.core_nodes().into_iter().step_by(stride.max(1)) {
        let Some(hw) = discrete_hessian(w, k) else { continue };
        let c = |di, dj| w.at_offset(k, di, dj);
        let (Some(xp), Some(xm)) = (c(1, 0), c(-1, 0)) else { continue };
        let mut grad = [(xp - xm) / (2.0 * h), 0.0];
        if dim == 2 {
            let (Some(yp), Some(ym)) = (c(0, 1), c(0, -1)) else { continue };
            grad[1] = (yp - ym) / (2.0 * h);
        }
        let mut idx = [0; 2];
        let mut steps = [1; 2];
        let mut far = false;
        // the sampled conjugate has kinks about h·|D²W| apart in slope space;
        // difference across several of them
        let reach = factor * h * hw.max_eigenvalue().max(0.0);
        for ax in 0..dim {
            let axis = slopes.axis(ax);
            let (i, d) = nearest(axis, grad[ax]);
            let local = if i + 1 < axis.len() { axis[i + 1] - axis[i] } else { axis[i] - axis[i - 1] };
            far |= d > local;
            idx[ax] = i;
            steps[ax] = (ceil(reach / local) as usize).max(1);
        }
        let Some(hv) = (!far).then(|| dual_hessian(&v, idx[0], idx[1], steps)).flatten() else {
            rep.skipped += 1;
            continue;
        };
        let hm = hw.m;
        let dev = if dim == 1 {
            (hm[0][0] * hv[0][0] - 1.0).abs()
        } else {
            let p = [
                [hm[0][0] * hv[0][0] + hm[0][1] * hv[1][0] - 1.0, hm[0][0] * hv[0][1] + hm[0][1] * hv[1][1]],
                [hm[1][0] * hv[0][0] + hm[1][1] * hv[1][0], hm[1][0] * hv[0][1] + hm[1][1] * hv[1][1] - 1.0],
            ];
            norm2x2(p)
        };
        rep.samples += 1;
        if rep.location.is_none() || dev > rep.max_deviation {
            rep.max_deviation = dev;
            rep.location = Some(w.grid().point(k));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexBody;
    use crate::grid::build_grid;

    fn grid(body: ConvexBody, h: f64) -> Arc<Grid> {
        Arc::new(build_grid(&body, h).unwrap())
    }

    #[test]
    fn llt_matches_brute_force_on_box() {
        // 11×11 lattice on [−1, 1]² (interior nodes of a slightly larger box)
        let g = grid(ConvexBody::rectangle(-1.1, 1.1, -1.1, 1.1).unwrap(), 0.2);
        assert_eq!(g.len(), 121);
        let c = [0.7, -0.4];
        let lin = GridFunction::from_fn(g.clone(), |x| c[0] * x[0] + c[1] * x[1]).unwrap();
        let s = SlopeGrid::uniform(2, 3.0, 0.1).unwrap();
        let fast = legendre_transform(&lin, &s).unwrap();
        let brute = legendre_transform_brute(&lin, &s).unwrap();
        for (a, b) in fast.values().iter().zip(brute.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        // f*(y) = Σ |y_k − c_k| on the box [−1, 1]²
        for b in 0..s.axis(1).len() {
            for a in 0..s.axis(0).len() {
                let y = s.point(a, b);
                let want = (y[0] - c[0]).abs() + (y[1] - c[1]).abs();
                assert!((fast.at(a, b) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_is_self_conjugate() {
        let h = 0.05;
        let g = grid(ConvexBody::rectangle(-3.0, 3.0, -3.0, 3.0).unwrap(), h);
        let q = GridFunction::from_fn(g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let s = SlopeGrid::uniform(2, 2.0, 0.037).unwrap();
        let v = legendre_transform(&q, &s).unwrap();
        for b in 0..s.axis(1).len() {
            for a in 0..s.axis(0).len() {
                let y = s.point(a, b);
                let exact = 0.5 * (y[0] * y[0] + y[1] * y[1]);
                // sampled envelope: off by at most h²/8 per axis
                assert!(v.at(a, b) <= exact + 1e-12);
                assert!(v.at(a, b) >= exact - h * h / 4.0 - 1e-12);
            }
        }
    }

    #[test]
    fn double_conjugate_reproduces_convex_data() {
        let g = grid(ConvexBody::interval(-1.0, 1.0).unwrap(), 0.05);
        let f = GridFunction::from_fn(g.clone(), |x| libm::cosh(2.0 * x[0])).unwrap();
        let s = SlopeGrid::uniform(1, 20.0, 0.01).unwrap();
        let back = inverse_transform(&legendre_transform(&f, &s).unwrap(), &g).unwrap();
        for (b, v) in back.iter().zip(f.values()) {
            assert!(*b <= v + 1e-12);
            assert!(v - b < 1e-4);
        }
    }

    #[test]
    fn graded_grid_shape() {
        let s = SlopeGrid::graded(1, 50.0).unwrap();
        let ax = s.axis(0);
        assert!(ax.windows(2).all(|w| w[1] > w[0]));
        assert!(s.y_max() >= 50.0);
        assert_eq!(ax[ax.len() / 2], 0.0);
        assert!((ax[ax.len() / 2 + 1] - DEFAULT_SLOPE_SPACING).abs() < 1e-15);
    }

    fn interval_eigen(a: f64, b: f64, h: f64) -> GridFunction {
        crate::eigen::solve_body(&ConvexBody::interval(a, b).unwrap(), h, 1e-10).unwrap().eigenfunction
    }

    #[test]
    fn fast_agrees_with_direct_on_coarse_intervals() {
        // 41-node grids with h = 0.05; the t = 1/2 combinations land on the
        // h/2 lattice, which is where the target lives
        let h = 0.05;
        let u0 = interval_eigen(-1.0, 1.0, h);
        let u1 = interval_eigen(-0.5, 1.5, h);
        assert_eq!(u0.values().len(), 39);
        let body_t = ConvexBody::interval(-0.75, 1.25).unwrap();
        let target = grid(body_t, h / 2.0);
        let direct = sup_convolution_direct(&u0, &u1, 0.5, &target).unwrap();
        let fast = sup_convolution(&u0, &u1, 0.5, &target).unwrap();
        let scale = direct.max();
        let err = direct.values().iter().zip(fast.values()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err / scale < 1e-3, "relative error {}", err / scale);
    }

    #[test]
    fn endpoints_reproduce_inputs() {
        let h = 0.05;
        let u0 = interval_eigen(-1.0, 1.0, h);
        let u1 = interval_eigen(0.0, 2.0, h);
        let d0 = sup_convolution_direct(&u0, &u1, 0.0, u0.grid()).unwrap();
        for (a, b) in d0.values().iter().zip(u0.values()) {
            assert!((a - b).abs() <= 1e-15 * b);
        }
        let f1 = sup_convolution(&u0, &u1, 1.0, u1.grid()).unwrap();
        for (a, b) in f1.values().iter().zip(u1.values()) {
            assert!((a - b).abs() < 1e-3, "{a} {b}");
        }
    }

    #[test]
    fn maximum_is_at_least_product_of_maxima() {
        let h = 0.05;
        let u0 = interval_eigen(-1.0, 1.0, h);
        let u1 = interval_eigen(-0.5, 2.5, h);
        let target = grid(ConvexBody::interval(-0.75, 1.75).unwrap(), h / 2.0);
        let d = sup_convolution_direct(&u0, &u1, 0.5, &target).unwrap();
        assert!(d.max() >= sqrt(u0.max() * u1.max()) - 1e-12);
    }

    #[test]
    fn slope_range_is_checked() {
        let u = interval_eigen(-1.0, 1.0, 0.05);
        let small = SlopeGrid::uniform(1, 1.0, 0.1).unwrap();
        assert!(matches!(sup_convolution_fast(&u, &u, 0.5, u.grid(), &small), Err(Error::SlopeRangeTooSmall { .. })));
    }

    #[test]
    fn hessian_conjugate_exact_for_unit_quadratic() {
        let h = 0.05;
        let g = grid(ConvexBody::rectangle(-1.5, 1.5, -1.5, 1.5).unwrap(), h);
        let u = GridFunction::from_fn(g, |x| exp(-0.5 * (x[0] * x[0] + x[1] * x[1]))).unwrap();
        let w = LogField::new(&u, 0.6).unwrap();
        let s = SlopeGrid::uniform(2, 1.5, h).unwrap();
        let r = hessian_conjugate_check(&w, &s, 1).unwrap();
        assert!(r.samples > 100);
        assert!(r.max_deviation < 1e-8, "{r:?}");
    }

    #[test]
    fn hessian_conjugate_for_general_quadratic() {
        let h = 0.02;
        let q = [[2.0, 0.5], [0.5, 1.0]];
        let g = grid(ConvexBody::rectangle(-2.5, 2.5, -2.5, 2.5).unwrap(), h);
        let u = GridFunction::from_fn(g, |x| {
            exp(-0.5 * (q[0][0] * x[0] * x[0] + 2.0 * q[0][1] * x[0] * x[1] + q[1][1] * x[1] * x[1]))
        })
        .unwrap();
        let w = LogField::new(&u, 0.5).unwrap();
        let s = SlopeGrid::uniform(2, 2.5, h).unwrap();
        let r = hessian_conjugate_check(&w, &s, 3).unwrap();
        assert!(r.samples > 50);
        assert!(r.max_deviation < 0.1, "{r:?}");
    }

    #[test]
    fn hulls() {
        let h = convex_hull(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]]);
        assert_eq!(h.len(), 4);
        let c = CombinedHull::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.5, 2);
        assert!(c.contains([0.75, 0.75]));
        assert!(c.contains([1.0, 0.5]));
        assert!(!c.contains([1.0, 0.6]));
    }
}
