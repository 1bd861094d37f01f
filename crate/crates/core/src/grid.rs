//! Uniform lattices over convex bodies and functions sampled on them.

use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;

/// Smallest boundary fraction admitted on a boundary link. Keeps the
/// stiffness diagonal bounded when a node sits almost on the boundary.
pub const MIN_BOUNDARY_FRACTION: f64 = 1e-3;

const NONE: u32 = u32::MAX;

/// Neighbour of an interior node in one of the axis directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    Interior(u32),
    /// Exterior neighbour; the boundary is crossed at this fraction of `h`.
    Boundary(f64),
}

/// Uniform lattice `shift + k·h` covering a body's bounding box, with the
/// interior mask and boundary-crossing fractions of each boundary link.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    h: f64,
    shift: [f64; 2],
    first: [i64; 2],
    shape: [usize; 2],
    lookup: Vec<u32>,
    nodes: Vec<[usize; 2]>,
    links: Vec<[Link; 4]>,
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Lattice extent `[nx, ny]` (`ny = 1` in 1D).
    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    /// Number of interior nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Coordinate of lattice index `i` along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.shift[axis] + (self.first[axis] + i as i64) as f64 * self.h
    }

    /// Integer multiple of `h` (before the shift) of lattice index `i`.
    #[inline]
    pub fn coord_index(&self, axis: usize, i: usize) -> i64 {
        self.first[axis] + i as i64
    }

    #[inline]
    pub fn shift_of(&self, axis: usize) -> f64 {
        self.shift[axis]
    }

    /// Coordinates of every lattice line along `axis`.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        (0..self.shape[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// Position of interior node `k` (second entry zero in 1D).
    #[inline]
    pub fn point(&self, k: usize) -> [f64; 2] {
        let [i, j] = self.nodes[k];
        if self.dim == 1 {
            [self.coord(0, i), 0.0]
        } else {
            [self.coord(0, i), self.coord(1, j)]
        }
    }

    #[inline]
    pub fn lattice(&self, k: usize) -> [usize; 2] {
        self.nodes[k]
    }

    /// Interior index of lattice node `(i, j)`, if it is interior.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.shape[0] || j >= self.shape[1] {
            return None;
        }
        match self.lookup[j * self.shape[0] + i] {
            NONE => None,
            k => Some(k as usize),
        }
    }

    /// Interior index at a signed lattice offset from node `k`.
    pub fn offset(&self, k: usize, di: i64, dj: i64) -> Option<usize> {
        let [i, j] = self.nodes[k];
        let (i, j) = (i as i64 + di, j as i64 + dj);
        if i < 0 || j < 0 {
            return None;
        }
        self.index(i as usize, j as usize)
    }

    /// Links in the order `−x, +x, −y, +y`; only the first two are used in 1D.
    #[inline]
    pub fn links(&self, k: usize) -> &[Link] {
        &self.links[k][..2 * self.dim]
    }

    /// Lattice index of the node nearest to `x` along `axis` (may be out of range).
    pub fn nearest_index(&self, axis: usize, x: f64) -> i64 {
        libm::round((x - self.shift[axis]) / self.h) as i64 - self.first[axis]
    }
}

/// Values at interior nodes; zero is implied everywhere else.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("value count differs from interior node count"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid function values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.point(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) })
            .0
    }

    /// Value at lattice node `(i, j)`, zero off the interior mask.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.grid.index(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Value at a signed lattice offset from interior node `k`.
    pub fn at_offset(&self, k: usize, di: i64, dj: i64) -> f64 {
        self.grid.offset(k, di, dj).map_or(0.0, |m| self.values[m])
    }

    /// Scaled copy with `max = 1`.
    pub fn normalized(&self) -> Self {
        let m = self.max();
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v / m).collect() }
    }
}

/// Lattice on multiples of `h` (through the origin) over the bounding box
/// inflated by `2h`.
pub fn build_grid(body: &ConvexBody, h: f64) -> Result<Grid> {
    build_grid_shifted(body, h, [0.0, 0.0])
}

/// Lattice `shift + k·h`. Interior nodes are lattice points strictly inside
/// the body; each link to an exterior neighbour records where the segment
/// leaves the body.
pub fn build_grid_shifted(body: &ConvexBody, h: f64, shift: [f64; 2]) -> Result<Grid> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument("grid spacing must be positive"));
    }
    let dim = body.dim();
    let (lo, hi) = body.bounding_box();
    let mut first = [0_i64; 2];
    let mut shape = [1_usize; 2];
    for axis in 0..dim {
        let a = libm::floor((lo[axis] - 2.0 * h - shift[axis]) / h) as i64;
        let b = libm::ceil((hi[axis] + 2.0 * h - shift[axis]) / h) as i64;
        first[axis] = a;
        shape[axis] = (b - a + 1) as usize;
    }
    let shift = if dim == 1 { [shift[0], 0.0] } else { shift };
    let mut grid = Grid { dim, h, shift, first, shape, lookup: vec![NONE; shape[0] * shape[1]], nodes: Vec::new(), links: Vec::new() };

    for j in 0..shape[1] {
        for i in 0..shape[0] {
            let x = [grid.coord(0, i), grid.coord(1, j)];
            if body.contains_open(&x[..dim]) {
                grid.lookup[j * shape[0] + i] = grid.nodes.len() as u32;
                grid.nodes.push([i, j]);
            }
        }
    }
    if grid.nodes.is_empty() {
        return Err(Error::EmptyMask);
    }

    let steps: [(usize, i64, bool); 4] = [(0, -1, false), (0, 1, true), (1, -1, false), (1, 1, true)];
    grid.links = Vec::with_capacity(grid.nodes.len());
    for k in 0..grid.nodes.len() {
        let mut links = [Link::Boundary(1.0); 4];
        let x = grid.point(k);
        for (slot, &(axis, step, forward)) in steps.iter().enumerate().take(2 * dim) {
            let [i, j] = grid.nodes[k];
            let (ni, nj) = if axis == 0 { (i as i64 + step, j as i64) } else { (i as i64, j as i64 + step) };
            links[slot] = match grid.index(ni as usize, nj as usize) {
                Some(m) if ni >= 0 && nj >= 0 => Link::Interior(m as u32),
                _ => {
                    let s = body.ray_exit(&x[..dim], axis, forward);
                    Link::Boundary((s / h).clamp(MIN_BOUNDARY_FRACTION, 1.0))
                }
            };
        }
        grid.links.push(links);
    }

    let components = count_components(&grid);
    if components > 1 {
        return Err(Error::DisconnectedMask { components });
    }
    Ok(grid)
}

fn count_components(grid: &Grid) -> usize {
    let mut seen = vec![false; grid.len()];
    let mut queue = VecDeque::new();
    let mut components = 0;
    for start in 0..grid.len() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            for link in grid.links(k) {
                if let Link::Interior(m) = *link {
                    let m = m as usize;
                    if !seen[m] {
                        seen[m] = true;
                        queue.push_back(m);
                    }
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_node_count() {
        let g = build_grid(&ConvexBody::interval(-1.0, 1.0).unwrap(), 0.01).unwrap();
        assert_eq!(g.len(), 199);
        // end nodes sit exactly one step from the boundary
        assert_eq!(g.links(0)[0], Link::Boundary(1.0));
    }

    #[test]
    fn coarse_disk_is_connected() {
        let g = build_grid(&ConvexBody::ball(1.0, [0.0, 0.0]).unwrap(), 0.5).unwrap();
        assert!(!g.is_empty());
    }

    #[test]
    fn tiny_disk_has_empty_mask() {
        let e = build_grid(&ConvexBody::ball(0.01, [0.2, 0.2]).unwrap(), 0.5);
        assert_eq!(e, Err(Error::EmptyMask));
    }

    #[test]
    fn symmetric_body_gives_symmetric_mask() {
        let g = build_grid(&ConvexBody::ball(1.0, [0.0, 0.0]).unwrap(), 0.1).unwrap();
        for k in 0..g.len() {
            let p = g.point(k);
            let i = g.nearest_index(0, -p[0]);
            let j = g.nearest_index(1, -p[1]);
            assert!(g.index(i as usize, j as usize).is_some());
        }
    }

    #[test]
    fn boundary_fractions_in_range() {
        let g = build_grid(&ConvexBody::smooth(alloc::vec![1.0, 0.0, 0.2], alloc::vec![]).unwrap(), 0.05).unwrap();
        for k in 0..g.len() {
            for l in g.links(k) {
                if let Link::Boundary(t) = l {
                    assert!((MIN_BOUNDARY_FRACTION..=1.0).contains(t));
                }
            }
        }
    }
}
