//! Convex bodies in R¹ and R², described through their support functions.
//!
//! A body is one of four variants. Intervals are the only 1D bodies; every
//! planar operation rejects them. Minkowski combinations use an exact rule
//! whenever the operands share a representation that is closed under support
//! addition (interval, ball, H-polygon, trigonometric support function) and
//! otherwise fall back to a polygon whose facets sample the combined support
//! function on a [`DirectionGrid`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{atan2, cos, dot2, norm2, rotate, sin, sqrt, unit, PI, TAU};

/// Number of directions used for sampled support functions.
pub const DEFAULT_DIRECTIONS: usize = 720;

/// Angle grid on which curvature positivity of smooth bodies is tested.
const CURVATURE_SAMPLES: usize = 4096;

/// Unit directions used for support-function quadrature and sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    dim: usize,
    dirs: Vec<[f64; 2]>,
}

impl DirectionGrid {
    /// `m` equispaced directions at angles `2πk/m`.
    pub fn planar(m: usize) -> Self {
        assert!(m >= 3, "need at least three directions");
        let dirs = (0..m).map(|k| unit(TAU * k as f64 / m as f64)).collect();
        Self { dim: 2, dirs }
    }

    /// The two directions `−1, +1` of the real line.
    pub fn line() -> Self {
        Self { dim: 1, dirs: vec![[-1.0, 0.0], [1.0, 0.0]] }
    }

    /// Default grid for a body of dimension `dim`.
    pub fn for_dim(dim: usize) -> Self {
        if dim == 1 {
            Self::line()
        } else {
            Self::planar(DEFAULT_DIRECTIONS)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// Directions as slices of length [`dim`](Self::dim).
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        let d = self.dim;
        self.dirs.iter().map(move |u| &u[..d])
    }
}

/// Polygon given by outer unit normals and offsets: `{x : ⟨nᵢ, x⟩ ≤ hᵢ}`.
///
/// Normals are stored sorted by angle with duplicates merged. Vertices are
/// recovered once at construction so the support function is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    normals: Vec<[f64; 2]>,
    offsets: Vec<f64>,
    vertices: Vec<[f64; 2]>,
    redundant: Vec<usize>,
}

impl Polygon {
    pub fn new(normals: Vec<[f64; 2]>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::InvalidBody("normals and offsets differ in length"));
        }
        if normals.len() < 3 {
            return Err(Error::InvalidBody("a polygon needs at least three half-planes"));
        }
        let mut facets = Vec::with_capacity(normals.len());
        for (n, h) in normals.iter().zip(&offsets) {
            let len = norm2(*n);
            if !(len.is_finite() && len > 0.0 && h.is_finite()) {
                return Err(Error::InvalidBody("normals must be finite and nonzero"));
            }
            let n = [n[0] / len, n[1] / len];
            facets.push((atan2(n[1], n[0]), n, h / len));
        }
        facets.sort_by(|a, b| a.0.total_cmp(&b.0));

        // Merge parallel facets, keeping the tighter one.
        let mut merged: Vec<(f64, [f64; 2], f64)> = Vec::with_capacity(facets.len());
        for f in facets {
            match merged.last_mut() {
                Some(last) if (f.0 - last.0).abs() < 1e-12 => last.2 = last.2.min(f.2),
                _ => merged.push(f),
            }
        }
        if merged.len() > 1 {
            let first = merged[0];
            let last = merged[merged.len() - 1];
            if (first.0 + TAU - last.0).abs() < 1e-12 {
                merged[0].2 = first.2.min(last.2);
                merged.pop();
            }
        }
        let max_gap = merged
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .chain(core::iter::once(merged[0].0 + TAU - merged[merged.len() - 1].0))
            .fold(0.0_f64, f64::max);
        if max_gap >= PI - 1e-12 {
            return Err(Error::InvalidBody("half-planes do not bound a region"));
        }

        let normals: Vec<[f64; 2]> = merged.iter().map(|f| f.1).collect();
        let offsets: Vec<f64> = merged.iter().map(|f| f.2).collect();
        let vertices = clip_vertices(&normals, &offsets)?;

        let scale = 1.0 + offsets.iter().fold(0.0_f64, |m, h| m.max(h.abs()));
        let redundant = normals
            .iter()
            .zip(&offsets)
            .enumerate()
            .filter(|(_, (n, h))| **h > max_dot(&vertices, **n) + 1e-9 * scale)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { normals, offsets, vertices, redundant })
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Counter-clockwise vertex list.
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Indices (into [`normals`](Self::normals)) of half-planes that do not
    /// touch the polygon.
    pub fn redundant_facets(&self) -> &[usize] {
        &self.redundant
    }

    pub fn support(&self, dir: [f64; 2]) -> f64 {
        max_dot(&self.vertices, dir)
    }
}

fn max_dot(points: &[[f64; 2]], dir: [f64; 2]) -> f64 {
    points.iter().map(|p| dot2(*p, dir)).fold(f64::NEG_INFINITY, f64::max)
}

/// Clips a large box by every half-plane, tracking which facet each edge came
/// from, then recomputes each vertex as the exact intersection of its two
/// facet lines.
fn clip_vertices(normals: &[[f64; 2]], offsets: &[f64]) -> Result<Vec<[f64; 2]>> {
    const NONE: usize = usize::MAX;
    let b = 1e6 * (1.0 + offsets.iter().fold(0.0_f64, |m, h| m.max(h.abs())));
    // (vertex, label of the edge leaving it)
    let mut poly: Vec<([f64; 2], usize)> =
        vec![([-b, -b], NONE), ([b, -b], NONE), ([b, b], NONE), ([-b, b], NONE)];
    let mut next = Vec::with_capacity(poly.len() + 4);
    for (i, (&n, &h)) in normals.iter().zip(offsets).enumerate() {
        next.clear();
        let k = poly.len();
        for j in 0..k {
            let (p, label) = poly[j];
            let q = poly[(j + 1) % k].0;
            let dp = dot2(n, p) - h;
            let dq = dot2(n, q) - h;
            let cut = |s: f64| [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
            match (dp <= 0.0, dq <= 0.0) {
                (true, true) => next.push((p, label)),
                (true, false) => {
                    next.push((p, label));
                    next.push((cut(dp / (dp - dq)), i));
                }
                (false, true) => next.push((cut(dp / (dp - dq)), label)),
                (false, false) => {}
            }
        }
        core::mem::swap(&mut poly, &mut next);
        if poly.len() < 3 {
            return Err(Error::InvalidBody("half-planes have empty intersection"));
        }
    }
    if poly.iter().any(|(_, l)| *l == NONE) {
        return Err(Error::InvalidBody("half-planes do not bound a region"));
    }
    let k = poly.len();
    let mut vertices: Vec<[f64; 2]> = Vec::with_capacity(k);
    for j in 0..k {
        let (approx, lb) = poly[j];
        let la = poly[(j + k - 1) % k].1;
        let v = if la == lb { approx } else { intersect(normals[la], offsets[la], normals[lb], offsets[lb]).unwrap_or(approx) };
        if vertices.last().is_none_or(|w| norm2([w[0] - v[0], w[1] - v[1]]) > 1e-13 * b) {
            vertices.push(v);
        }
    }
    while vertices.len() > 1 {
        let (f, l) = (vertices[0], vertices[vertices.len() - 1]);
        if norm2([f[0] - l[0], f[1] - l[1]]) > 1e-13 * b {
            break;
        }
        vertices.pop();
    }
    let area = 0.5
        * (0..vertices.len())
            .map(|j| {
                let (p, q) = (vertices[j], vertices[(j + 1) % vertices.len()]);
                p[0] * q[1] - p[1] * q[0]
            })
            .sum::<f64>();
    let extent = vertices.iter().fold(0.0_f64, |m, v| m.max(norm2(*v)));
    if vertices.len() < 3 || area <= 1e-14 * (1.0 + extent * extent) {
        return Err(Error::InvalidBody("polygon has empty interior"));
    }
    Ok(vertices)
}

fn intersect(na: [f64; 2], ha: f64, nb: [f64; 2], hb: f64) -> Option<[f64; 2]> {
    let det = na[0] * nb[1] - na[1] * nb[0];
    if det.abs() < 1e-14 {
        return None;
    }
    Some([(ha * nb[1] - hb * na[1]) / det, (na[0] * hb - nb[0] * ha) / det])
}

/// Planar body whose support function is the trigonometric polynomial
/// `h(θ) = a₀ + Σₖ aₖ cos kθ + bₖ sin kθ`.
///
/// Valid data has `h'' + h > 0` (positive curvature radius) on a dense angle
/// grid. Membership and ray casting use the circumscribed polygon whose facets
/// sample `h` on the default direction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothBody {
    cos: Vec<f64>,
    sin: Vec<f64>,
    facet_normals: Vec<[f64; 2]>,
    facet_offsets: Vec<f64>,
}

impl SmoothBody {
    /// `cos[k] = aₖ` for `k ≥ 0`; `sin[k] = bₖ` (`sin[0]` is ignored).
    /// `sin` may be shorter than `cos`; missing entries are zero.
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.is_empty() {
            return Err(Error::InvalidBody("smooth body needs a constant coefficient"));
        }
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidBody("non-finite support coefficient"));
        }
        let k = cos.len().max(sin.len());
        let mut a = cos;
        let mut b = sin;
        a.resize(k, 0.0);
        b.resize(k, 0.0);
        b[0] = 0.0;
        let mut body = Self { cos: a, sin: b, facet_normals: Vec::new(), facet_offsets: Vec::new() };
        if body.min_curvature_radius() <= 0.0 {
            return Err(Error::InvalidBody("support function violates h'' + h > 0"));
        }
        let grid = DirectionGrid::planar(DEFAULT_DIRECTIONS);
        body.facet_normals = grid.dirs.clone();
        body.facet_offsets = grid.dirs.iter().map(|u| body.support_angle(atan2(u[1], u[0]))).collect();
        Ok(body)
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn support_angle(&self, theta: f64) -> f64 {
        self.eval(theta, |_, a, b, c, s| a * c + b * s)
    }

    /// `h'(θ)`.
    pub fn support_derivative(&self, theta: f64) -> f64 {
        self.eval(theta, |k, a, b, c, s| k * (b * c - a * s))
    }

    /// Radius of curvature `h''(θ) + h(θ)`.
    pub fn curvature_radius(&self, theta: f64) -> f64 {
        self.eval(theta, |k, a, b, c, s| (1.0 - k * k) * (a * c + b * s))
    }

    /// Boundary point with outer normal `(cos θ, sin θ)`.
    pub fn boundary_point(&self, theta: f64) -> [f64; 2] {
        let (h, dh) = (self.support_angle(theta), self.support_derivative(theta));
        let (c, s) = (cos(theta), sin(theta));
        [h * c - dh * s, h * s + dh * c]
    }

    pub fn min_curvature_radius(&self) -> f64 {
        (0..CURVATURE_SAMPLES)
            .map(|j| self.curvature_radius(TAU * j as f64 / CURVATURE_SAMPLES as f64))
            .fold(f64::INFINITY, f64::min)
    }

    fn eval(&self, theta: f64, term: impl Fn(f64, f64, f64, f64, f64) -> f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(k, (&a, &b))| {
                let kt = k as f64 * theta;
                term(k as f64, a, b, cos(kt), sin(kt))
            })
            .sum()
    }
}

/// A bounded convex body in R¹ or R².
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Interval { a: f64, b: f64 },
    Ball { radius: f64, center: [f64; 2] },
    Polygon(Polygon),
    Smooth(SmoothBody),
}

impl ConvexBody {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidBody("interval needs finite a < b"));
        }
        Ok(Self::Interval { a, b })
    }

    /// Planar disk.
    pub fn ball(radius: f64, center: [f64; 2]) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0 && center.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidBody("ball needs a finite positive radius"));
        }
        Ok(Self::Ball { radius, center })
    }

    pub fn polygon(normals: Vec<[f64; 2]>, offsets: Vec<f64>) -> Result<Self> {
        Polygon::new(normals, offsets).map(Self::Polygon)
    }

    /// Axis-parallel rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::polygon(
            vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
            vec![x1, y1, -x0, -y0],
        )
    }

    pub fn smooth(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        SmoothBody::new(cos, sin).map(Self::Smooth)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Interval { .. } => 1,
            _ => 2,
        }
    }

    fn require_planar(&self) -> Result<()> {
        if self.dim() == 2 {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        }
    }

    /// `h(dir) = sup_{x ∈ body} ⟨x, dir⟩`. `dir` need not be a unit vector.
    ///
    /// # Panics
    ///
    /// If `dir.len()` differs from the body dimension.
    pub fn support(&self, dir: &[f64]) -> f64 {
        assert_eq!(dir.len(), self.dim(), "direction has wrong dimension");
        match self {
            Self::Interval { a, b } => {
                if dir[0] >= 0.0 {
                    dir[0] * b
                } else {
                    dir[0] * a
                }
            }
            Self::Ball { radius, center } => {
                let d = [dir[0], dir[1]];
                radius * norm2(d) + dot2(*center, d)
            }
            Self::Polygon(p) => p.support([dir[0], dir[1]]),
            Self::Smooth(s) => {
                let r = norm2([dir[0], dir[1]]);
                if r == 0.0 {
                    0.0
                } else {
                    r * s.support_angle(atan2(dir[1], dir[0]))
                }
            }
        }
    }

    /// `⟨x, θ⟩ ≤ h(θ) + slack` for every stored (polygon) or sampled (smooth)
    /// direction; exact for intervals and balls.
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        assert_eq!(x.len(), self.dim(), "point has wrong dimension");
        match self {
            Self::Interval { a, b } => x[0] >= a - slack && x[0] <= b + slack,
            Self::Ball { radius, center } => {
                let d = [x[0] - center[0], x[1] - center[1]];
                norm2(d) <= radius + slack
            }
            Self::Polygon(p) => facets_contain(&p.normals, &p.offsets, [x[0], x[1]], slack),
            Self::Smooth(s) => facets_contain(&s.facet_normals, &s.facet_offsets, [x[0], x[1]], slack),
        }
    }

    /// Strict interior test with a relative margin of `1e-12`, so lattice
    /// points lying exactly on the boundary count as exterior.
    pub fn contains_open(&self, x: &[f64]) -> bool {
        let margin = 1e-12 * (1.0 + self.extent());
        self.contains(x, -margin)
    }

    /// Distance from the interior point `x` to the boundary along `±e_axis`
    /// (`forward` selects the sign).
    pub fn ray_exit(&self, x: &[f64], axis: usize, forward: bool) -> f64 {
        let sign = if forward { 1.0 } else { -1.0 };
        match self {
            Self::Interval { a, b } => {
                if forward {
                    b - x[0]
                } else {
                    x[0] - a
                }
            }
            Self::Ball { radius, center } => {
                let d = [x[0] - center[0], x[1] - center[1]];
                let p = sign * d[axis];
                let c = dot2(d, d) - radius * radius;
                -p + sqrt((p * p - c).max(0.0))
            }
            Self::Polygon(p) => facets_exit(&p.normals, &p.offsets, [x[0], x[1]], axis, sign),
            Self::Smooth(s) => facets_exit(&s.facet_normals, &s.facet_offsets, [x[0], x[1]], axis, sign),
        }
    }

    /// Lower and upper corners of the axis-aligned bounding box
    /// (second coordinate is zero for intervals).
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Self::Interval { a, b } => ([*a, 0.0], [*b, 0.0]),
            _ => (
                [-self.support(&[-1.0, 0.0]), -self.support(&[0.0, -1.0])],
                [self.support(&[1.0, 0.0]), self.support(&[0.0, 1.0])],
            ),
        }
    }

    /// Largest coordinate magnitude of the bounding box.
    pub fn extent(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().chain(&hi).fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn translate(&self, z: &[f64]) -> Result<Self> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: z.len() });
        }
        Ok(match self {
            Self::Interval { a, b } => Self::Interval { a: a + z[0], b: b + z[0] },
            Self::Ball { radius, center } => {
                Self::Ball { radius: *radius, center: [center[0] + z[0], center[1] + z[1]] }
            }
            Self::Polygon(p) => {
                let offsets = p.normals.iter().zip(&p.offsets).map(|(n, h)| h + dot2(*n, [z[0], z[1]])).collect();
                Self::polygon(p.normals.clone(), offsets)?
            }
            Self::Smooth(s) => {
                let mut a = s.cos.clone();
                let mut b = s.sin.clone();
                if a.len() < 2 {
                    a.resize(2, 0.0);
                    b.resize(2, 0.0);
                }
                a[1] += z[0];
                b[1] += z[1];
                Self::smooth(a, b)?
            }
        })
    }

    /// Rotation about the origin by `phi` radians.
    pub fn rotate(&self, phi: f64) -> Result<Self> {
        self.require_planar()?;
        Ok(match self {
            Self::Interval { .. } => unreachable!(),
            Self::Ball { radius, center } => Self::Ball { radius: *radius, center: rotate(*center, phi) },
            Self::Polygon(p) => Self::polygon(p.normals.iter().map(|n| rotate(*n, phi)).collect(), p.offsets.clone())?,
            Self::Smooth(s) => {
                // h_rot(θ) = h(θ − φ)
                let (a, b): (Vec<f64>, Vec<f64>) = s
                    .cos
                    .iter()
                    .zip(&s.sin)
                    .enumerate()
                    .map(|(k, (&a, &b))| {
                        let (c, sn) = (cos(k as f64 * phi), sin(k as f64 * phi));
                        (a * c - b * sn, a * sn + b * c)
                    })
                    .unzip();
                Self::smooth(a, b)?
            }
        })
    }

    /// Boundary points: polygon vertices, or `m` points along the boundary
    /// of a ball / smooth body, or the two endpoints of an interval.
    pub fn boundary_samples(&self, m: usize) -> Vec<[f64; 2]> {
        match self {
            Self::Interval { a, b } => vec![[*a, 0.0], [*b, 0.0]],
            Self::Ball { radius, center } => (0..m)
                .map(|k| {
                    let u = unit(TAU * k as f64 / m as f64);
                    [center[0] + radius * u[0], center[1] + radius * u[1]]
                })
                .collect(),
            Self::Polygon(p) => p.vertices.clone(),
            Self::Smooth(s) => (0..m).map(|k| s.boundary_point(TAU * k as f64 / m as f64)).collect(),
        }
    }

    /// Support function sampled on `dirs`.
    pub fn sample_support(&self, dirs: &DirectionGrid) -> Result<Vec<f64>> {
        if dirs.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dirs.dim() });
        }
        Ok(dirs.iter().map(|u| self.support(u)).collect())
    }

    /// `(1/|S|) Σ_u (h(u) + h(−u))` over the direction grid.
    pub fn mean_width(&self, dirs: &DirectionGrid) -> Result<f64> {
        if dirs.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dirs.dim() });
        }
        let total: f64 = dirs
            .iter()
            .map(|u| {
                let neg = [-u[0], -u.get(1).copied().unwrap_or(0.0)];
                self.support(u) + self.support(&neg[..u.len()])
            })
            .sum();
        Ok(total / dirs.len() as f64)
    }

    /// Minkowski average `(1/m) Σ ρ_k(body)` over rotations by the given angles.
    pub fn rotation_mean(&self, angles: &[f64]) -> Result<Self> {
        self.require_planar()?;
        if angles.is_empty() {
            return Err(Error::InvalidArgument("rotation mean needs at least one rotation"));
        }
        let w = 1.0 / angles.len() as f64;
        let rotated = angles.iter().map(|&phi| self.rotate(phi)).collect::<Result<Vec<_>>>()?;
        let parts: Vec<(f64, &Self)> = rotated.iter().map(|b| (w, b)).collect();
        minkowski_sum(&parts)
    }

    /// `|h(θ) − h(−θ)| ≤ tol` on the default direction grid.
    pub fn is_origin_symmetric(&self, tol: f64) -> bool {
        DirectionGrid::for_dim(self.dim()).iter().all(|u| {
            let neg = [-u[0], -u.get(1).copied().unwrap_or(0.0)];
            (self.support(u) - self.support(&neg[..u.len()])).abs() <= tol
        })
    }
}

fn facets_contain(normals: &[[f64; 2]], offsets: &[f64], x: [f64; 2], slack: f64) -> bool {
    normals.iter().zip(offsets).all(|(n, h)| dot2(*n, x) <= h + slack)
}

fn facets_exit(normals: &[[f64; 2]], offsets: &[f64], x: [f64; 2], axis: usize, sign: f64) -> f64 {
    normals
        .iter()
        .zip(offsets)
        .filter(|(n, _)| sign * n[axis] > 1e-15)
        .map(|(n, h)| (h - dot2(*n, x)) / (sign * n[axis]))
        .fold(f64::INFINITY, f64::min)
}

/// `(1 − t)·body0 + t·body1`.
pub fn minkowski_combine(t: f64, body0: &ConvexBody, body1: &ConvexBody) -> Result<ConvexBody> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument("t must lie in [0, 1]"));
    }
    minkowski_sum(&[(1.0 - t, body0), (t, body1)])
}

/// Weighted Minkowski sum `Σ wᵢ·Kᵢ` with nonnegative weights.
///
/// Parts with zero weight are dropped, so a single surviving part with unit
/// weight comes back unchanged.
pub fn minkowski_sum(parts: &[(f64, &ConvexBody)]) -> Result<ConvexBody> {
    if parts.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidArgument("Minkowski weights must be finite and nonnegative"));
    }
    let Some(first) = parts.first() else {
        return Err(Error::InvalidArgument("empty Minkowski sum"));
    };
    let dim = first.1.dim();
    if let Some((_, b)) = parts.iter().find(|(_, b)| b.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
    }
    let live: Vec<(f64, &ConvexBody)> = parts.iter().copied().filter(|(w, _)| *w > 0.0).collect();
    if live.is_empty() {
        return Err(Error::InvalidArgument("Minkowski sum with all weights zero"));
    }

    if dim == 1 {
        let (mut a, mut b) = (0.0, 0.0);
        for (w, body) in &live {
            let ConvexBody::Interval { a: ai, b: bi } = body else { unreachable!() };
            a += w * ai;
            b += w * bi;
        }
        return ConvexBody::interval(a, b);
    }

    let all = |pred: fn(&ConvexBody) -> bool| live.iter().all(|(_, b)| pred(b));
    if all(|b| matches!(b, ConvexBody::Ball { .. })) {
        let (mut r, mut c) = (0.0, [0.0, 0.0]);
        for (w, body) in &live {
            let ConvexBody::Ball { radius, center } = body else { unreachable!() };
            r += w * radius;
            c[0] += w * center[0];
            c[1] += w * center[1];
        }
        return ConvexBody::ball(r, c);
    }
    if all(|b| matches!(b, ConvexBody::Ball { .. } | ConvexBody::Smooth(_))) {
        let mut a: Vec<f64> = vec![0.0; 2];
        let mut s: Vec<f64> = vec![0.0; 2];
        for (w, body) in &live {
            match body {
                ConvexBody::Ball { radius, center } => {
                    a[0] += w * radius;
                    a[1] += w * center[0];
                    s[1] += w * center[1];
                }
                ConvexBody::Smooth(sb) => {
                    if sb.cos.len() > a.len() {
                        a.resize(sb.cos.len(), 0.0);
                        s.resize(sb.cos.len(), 0.0);
                    }
                    for (k, (ak, bk)) in sb.cos.iter().zip(&sb.sin).enumerate() {
                        a[k] += w * ak;
                        s[k] += w * bk;
                    }
                }
                _ => unreachable!(),
            }
        }
        return ConvexBody::smooth(a, s);
    }

    // Polygon facets: the sum's normals lie in the union of the parts'
    // normals, so this is exact when every part is a polygon.
    let mut normals: Vec<[f64; 2]> = Vec::new();
    for (_, body) in &live {
        if let ConvexBody::Polygon(p) = body {
            normals.extend_from_slice(&p.normals);
        }
    }
    if !all(|b| matches!(b, ConvexBody::Polygon(_))) {
        normals.extend_from_slice(&DirectionGrid::planar(DEFAULT_DIRECTIONS).dirs);
    }
    let offsets = normals.iter().map(|n| live.iter().map(|(w, b)| w * b.support(n)).sum()).collect();
    ConvexBody::polygon(normals, offsets)
}

/// `max_θ |h_a(θ) − h_b(θ)|` on the default direction grid.
pub fn hausdorff_distance(a: &ConvexBody, b: &ConvexBody) -> Result<f64> {
    hausdorff_distance_on(a, b, &DirectionGrid::for_dim(a.dim()))
}

pub fn hausdorff_distance_on(a: &ConvexBody, b: &ConvexBody, dirs: &DirectionGrid) -> Result<f64> {
    let ha = a.sample_support(dirs)?;
    let hb = b.sample_support(dirs)?;
    Ok(ha.iter().zip(&hb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square() -> ConvexBody {
        ConvexBody::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    fn brute_support(points: &[[f64; 2]], dir: [f64; 2]) -> f64 {
        points.iter().map(|p| p[0] * dir[0] + p[1] * dir[1]).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn support_examples() {
        let ball = ConvexBody::ball(1.0, [0.0, 0.0]).unwrap();
        for k in 0..16 {
            assert_abs_diff_eq!(ball.support(&unit(0.3 * k as f64)), 1.0, epsilon = 1e-15);
        }
        let iv = ConvexBody::interval(-1.0, 1.0).unwrap();
        assert_eq!(iv.support(&[1.0]), 1.0);
        let d = unit(PI / 4.0);
        let corners = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        assert_abs_diff_eq!(square().support(&d), brute_support(&corners, d), epsilon = 1e-14);
        assert_abs_diff_eq!(square().support(&d), 2.0_f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn combine_examples() {
        let sq = square();
        let mid = minkowski_combine(0.5, &sq, &sq).unwrap();
        assert_abs_diff_eq!(hausdorff_distance(&mid, &sq).unwrap(), 0.0, epsilon = 1e-14);

        let b = minkowski_combine(0.3, &ConvexBody::ball(1.0, [0.0, 0.0]).unwrap(), &ConvexBody::ball(2.0, [0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(b, ConvexBody::Ball { radius: 0.7 + 0.6, center: [0.0, 0.0] });

        let iv = minkowski_combine(0.5, &ConvexBody::interval(-1.0, 1.0).unwrap(), &ConvexBody::interval(1.0, 3.0).unwrap()).unwrap();
        assert_eq!(iv, ConvexBody::Interval { a: 0.0, b: 2.0 });

        let err = minkowski_combine(0.5, &sq, &ConvexBody::interval(0.0, 1.0).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        assert!(minkowski_combine(1.5, &sq, &sq).is_err());
    }

    #[test]
    fn combine_endpoints_return_operands() {
        let sq = square();
        let disk = ConvexBody::ball(1.2, [0.1, 0.0]).unwrap();
        assert_eq!(minkowski_combine(0.0, &sq, &disk).unwrap(), sq);
        assert_eq!(minkowski_combine(1.0, &sq, &disk).unwrap(), disk);
    }

    #[test]
    fn contains_examples() {
        assert!(ConvexBody::ball(1.0, [0.0, 0.0]).unwrap().contains(&[0.0, 0.0], 0.0));
        assert!(!ConvexBody::interval(-1.0, 1.0).unwrap().contains(&[1.5], 0.0));
        assert!(square().contains(&[0.999, 0.999], 0.0));
        assert!(!square().contains_open(&[1.0, 0.0]));
        assert!(square().contains(&[1.0, 0.0], 0.0));
    }

    #[test]
    fn mean_width_examples() {
        let dirs = DirectionGrid::planar(DEFAULT_DIRECTIONS);
        let ball = ConvexBody::ball(1.0, [0.3, -0.2]).unwrap();
        assert_abs_diff_eq!(ball.mean_width(&dirs).unwrap(), 2.0, epsilon = 1e-13);
        // closed form (1/2π)∫ 2(|cos θ| + |sin θ|) dθ = 8/π, plus a dense
        // midpoint quadrature of the same integrand
        let n = 200_000;
        let dense: f64 = (0..n)
            .map(|k| {
                let th = TAU * (k as f64 + 0.5) / n as f64;
                2.0 * (cos(th).abs() + sin(th).abs())
            })
            .sum::<f64>()
            / n as f64;
        assert_abs_diff_eq!(dense, 8.0 / PI, epsilon = 1e-9);
        // on m equally spaced directions (4 | m) the sum is exactly
        // 8·cot(π/m)/m, within O(m⁻²) of the limit
        let m = DEFAULT_DIRECTIONS as f64;
        let discrete = 8.0 * cos(PI / m) / sin(PI / m) / m;
        assert_abs_diff_eq!(square().mean_width(&dirs).unwrap(), discrete, epsilon = 1e-12);
        assert_abs_diff_eq!(discrete, 8.0 / PI, epsilon = 2e-5);
        let iv = ConvexBody::interval(-0.5, 2.0).unwrap();
        assert_abs_diff_eq!(iv.mean_width(&DirectionGrid::line()).unwrap(), 2.5, epsilon = 1e-15);
        assert!(iv.mean_width(&dirs).is_err());
    }

    #[test]
    fn rotation_mean_examples() {
        let sq = square();
        let same = sq.rotation_mean(&[0.0]).unwrap();
        assert_abs_diff_eq!(hausdorff_distance(&same, &sq).unwrap(), 0.0, epsilon = 1e-14);

        let ball = ConvexBody::ball(0.7, [0.0, 0.0]).unwrap();
        let angles: Vec<f64> = (0..5).map(|k| 0.37 * k as f64).collect();
        assert_abs_diff_eq!(hausdorff_distance(&ball.rotation_mean(&angles).unwrap(), &ball).unwrap(), 0.0, epsilon = 1e-14);

        let angles: Vec<f64> = (0..64).map(|k| TAU * k as f64 / 64.0).collect();
        let avg = sq.rotation_mean(&angles).unwrap();
        let h = avg.sample_support(&DirectionGrid::planar(DEFAULT_DIRECTIONS)).unwrap();
        let (lo, hi) = h.iter().fold((f64::INFINITY, 0.0_f64), |(l, u), v| (l.min(*v), u.max(*v)));
        let mean = h.iter().sum::<f64>() / h.len() as f64;
        assert!((hi - lo) / mean < 3e-3, "spread {}", (hi - lo) / mean);

        assert!(ConvexBody::interval(0.0, 1.0).unwrap().rotation_mean(&[0.0]).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let b1 = ConvexBody::ball(1.0, [0.0, 0.0]).unwrap();
        let b2 = ConvexBody::ball(2.0, [0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(hausdorff_distance(&b1, &b1).unwrap(), 0.0);
        assert_abs_diff_eq!(hausdorff_distance(&b1, &b2).unwrap(), 1.0, epsilon = 1e-14);
        let i1 = ConvexBody::interval(-1.0, 1.0).unwrap();
        let i2 = ConvexBody::interval(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(hausdorff_distance(&i1, &i2).unwrap(), 1.0);
    }

    #[test]
    fn symmetry_examples() {
        assert!(square().is_origin_symmetric(1e-12));
        assert!(!ConvexBody::interval(0.0, 2.0).unwrap().is_origin_symmetric(1e-12));
        assert!(!ConvexBody::ball(1.0, [0.1, 0.0]).unwrap().is_origin_symmetric(1e-12));
        let ellipse = ConvexBody::smooth(vec![1.0, 0.0, 0.2], vec![]).unwrap();
        assert!(ellipse.is_origin_symmetric(1e-12));
    }

    #[test]
    fn polygon_flags_redundant_facets() {
        let p = Polygon::new(
            vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]],
            vec![1.0, 1.0, 1.0, 1.0, 5.0],
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.redundant_facets().len(), 1);
        let n = p.normals()[p.redundant_facets()[0]];
        assert_abs_diff_eq!(n[0], core::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(n[1], core::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn polygon_rejects_bad_data() {
        let open = Polygon::new(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 1.0]], vec![1.0, 1.0, 1.0]);
        assert!(open.is_err());
        let empty = Polygon::new(
            vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
            vec![-1.0, -1.0, 1.0, 1.0],
        );
        assert!(empty.is_err());
    }

    #[test]
    fn smooth_body_curvature_and_boundary() {
        assert!(ConvexBody::smooth(vec![1.0, 0.0, 0.5], vec![]).is_err());
        let ConvexBody::Smooth(s) = ConvexBody::smooth(vec![1.0, 0.1, 0.2, 0.03], vec![0.0, -0.05, 0.0, 0.02]).unwrap() else {
            unreachable!()
        };
        // Boundary points from the gradient parametrisation attain the support.
        for j in 0..360 {
            let th = TAU * j as f64 / 360.0;
            let x = s.boundary_point(th);
            assert_abs_diff_eq!(dot2(x, unit(th)), s.support_angle(th), epsilon = 1e-12);
        }
        let samples = ConvexBody::Smooth(s.clone()).boundary_samples(4000);
        for j in 0..100 {
            let th = TAU * j as f64 / 100.0 + 0.01;
            assert_abs_diff_eq!(brute_support(&samples, unit(th)), s.support_angle(th), epsilon = 1e-5);
        }
    }

    #[test]
    fn rotation_and_translation_act_on_support() {
        let body = ConvexBody::smooth(vec![1.0, 0.0, 0.1, 0.03], vec![0.0, 0.0, 0.05]).unwrap();
        let rot = body.rotate(0.7).unwrap();
        for j in 0..50 {
            let th = 0.13 * j as f64;
            assert_abs_diff_eq!(rot.support(&unit(th)), body.support(&unit(th - 0.7)), epsilon = 1e-12);
        }
        let moved = square().translate(&[0.5, -0.25]).unwrap();
        for j in 0..50 {
            let u = unit(0.13 * j as f64);
            assert_abs_diff_eq!(moved.support(&u), square().support(&u) + 0.5 * u[0] - 0.25 * u[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn ray_exit_matches_boundary() {
        let bodies = [
            square(),
            ConvexBody::ball(1.0, [0.2, 0.1]).unwrap(),
            ConvexBody::smooth(vec![1.0, 0.0, 0.2], vec![]).unwrap(),
        ];
        for body in &bodies {
            for axis in 0..2 {
                for forward in [false, true] {
                    let s = body.ray_exit(&[0.1, 0.05], axis, forward);
                    let mut p = [0.1, 0.05];
                    p[axis] += if forward { s } else { -s };
                    assert!(body.contains(&p, 1e-9));
                    p[axis] += if forward { 1e-6 } else { -1e-6 };
                    assert!(!body.contains(&p, 0.0));
                }
            }
        }
    }
}
