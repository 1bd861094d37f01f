//! Weighted stiffness and mass for the Dirichlet problem on a lattice.
//!
//! The operator is discretised in divergence form,
//! `−Lu = −e^{|x|²/2} div(e^{−|x|²/2} ∇u)`, so the stiffness is a graph
//! Laplacian with face weights `e^{−|x_f|²/2}` and the mass is diagonal with
//! node weights `e^{−|x_i|²/2}`. Both carry the cell volume `hⁿ`; the common
//! factor `(2π)^{−n/2}` cancels in every quotient and is dropped.
//!
//! Links that cross the boundary at fraction `θ` of the spacing contribute
//! `w/(θh²)` to the diagonal only (the boundary value is zero at the crossing
//! point), which keeps the matrix symmetric.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::grid::{Grid, GridFunction, Link};
use crate::math::exp;

#[derive(Debug, Clone)]
pub struct DiscreteOUForm {
    grid: Arc<Grid>,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    mass: Vec<f64>,
}

/// Face-midpoint coordinate on `axis` for the link from lattice index `i`
/// in direction `step`. Computed from an integer so both endpoints of a face
/// agree bit for bit.
#[inline]
fn face_coord(grid: &Grid, axis: usize, i: usize, step: i64) -> f64 {
    let twice = 2 * (grid.coord_index(axis, i)) + step;
    grid.shift_of(axis) + twice as f64 * (0.5 * grid.h())
}

pub fn assemble(grid: Arc<Grid>) -> DiscreteOUForm {
    let n = grid.len();
    let h = grid.h();
    let dim = grid.dim();
    let volume = libm::pow(h, dim as f64);
    let scale = volume / (h * h);
    let mut diag = alloc::vec![0.0; n];
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(2 * dim * n);
    let mut vals = Vec::with_capacity(2 * dim * n);
    let mut mass = Vec::with_capacity(n);
    row_ptr.push(0);
    for k in 0..n {
        let x = grid.point(k);
        mass.push(exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) * volume);
        let [i, j] = grid.lattice(k);
        for (slot, link) in grid.links(k).iter().enumerate() {
            let axis = slot / 2;
            let step = if slot % 2 == 0 { -1 } else { 1 };
            let mid = if axis == 0 {
                [face_coord(&grid, 0, i, step), x[1]]
            } else {
                [x[0], face_coord(&grid, 1, j, step)]
            };
            let w = exp(-0.5 * (mid[0] * mid[0] + mid[1] * mid[1])) * scale;
            match *link {
                Link::Interior(m) => {
                    diag[k] += w;
                    cols.push(m);
                    vals.push(-w);
                }
                Link::Boundary(theta) => diag[k] += w / theta,
            }
        }
        row_ptr.push(cols.len());
    }
    DiscreteOUForm { grid, diag, row_ptr, cols, vals, mass }
}

impl DiscreteOUForm {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Off-diagonal entries `(column, value)` of row `k`.
    pub fn row(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[k]..self.row_ptr[k + 1];
        self.cols[r.clone()].iter().zip(&self.vals[r]).map(|(c, v)| (*c as usize, *v))
    }

    /// `y = (A − σM) x`.
    pub fn apply_shifted(&self, sigma: f64, x: &[f64], y: &mut [f64]) {
        for k in 0..self.len() {
            let mut acc = (self.diag[k] - sigma * self.mass[k]) * x[k];
            for idx in self.row_ptr[k]..self.row_ptr[k + 1] {
                acc += self.vals[idx] * x[self.cols[idx] as usize];
            }
            y[k] = acc;
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_shifted(0.0, x, y);
    }

    /// `fᵀ A g`.
    pub fn bilinear(&self, f: &[f64], g: &[f64]) -> f64 {
        let mut ag = alloc::vec![0.0; self.len()];
        self.apply(g, &mut ag);
        crate::math::dot(f, &ag)
    }

    /// `fᵀ M f`.
    pub fn mass_norm2(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.mass).map(|(v, m)| v * v * m).sum()
    }

    /// `Σ_faces w (f_i − f_j)² + Σ_boundary links (w/θ) f_i²`, summed face by
    /// face; equals `fᵀ A f` up to rounding.
    pub fn dirichlet_energy(&self, f: &GridFunction) -> f64 {
        let v = f.values();
        let mut total = 0.0;
        for k in 0..self.len() {
            let mut interior = 0.0;
            for (m, a) in self.row(k) {
                // each face is visited from both ends
                if m > k {
                    total += -a * (v[k] - v[m]) * (v[k] - v[m]);
                }
                interior += -a;
            }
            total += (self.diag[k] - interior) * v[k] * v[k];
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexBody;
    use crate::grid::build_grid;
    use approx::assert_relative_eq;

    #[test]
    fn hand_assembled_interval() {
        // (−2h, 2h) with h = 0.5: interior nodes −0.5, 0, 0.5, walls at ±1
        let h = 0.5;
        let grid = Arc::new(build_grid(&ConvexBody::interval(-1.0, 1.0).unwrap(), h).unwrap());
        let form = assemble(grid);
        assert_eq!(form.len(), 3);
        let w = |x: f64| libm::exp(-0.5 * x * x) / h;
        let faces = [-0.75, -0.25, 0.25, 0.75];
        let diag = [w(faces[0]) + w(faces[1]), w(faces[1]) + w(faces[2]), w(faces[2]) + w(faces[3])];
        for k in 0..3 {
            assert_relative_eq!(form.diag()[k], diag[k], max_relative = 1e-15);
        }
        let r0: Vec<_> = form.row(0).collect();
        assert_eq!(r0.len(), 1);
        assert_eq!(r0[0].0, 1);
        assert_relative_eq!(r0[0].1, -w(-0.25), max_relative = 1e-15);
        let r1: Vec<_> = form.row(1).collect();
        assert_relative_eq!(r1[0].1, -w(-0.25), max_relative = 1e-15);
        assert_relative_eq!(r1[1].1, -w(0.25), max_relative = 1e-15);
        for (k, x) in [-0.5_f64, 0.0, 0.5].iter().enumerate() {
            assert_relative_eq!(form.mass()[k], libm::exp(-0.5 * x * x) * h, max_relative = 1e-15);
        }
    }

    #[test]
    fn stiffness_is_exactly_symmetric() {
        for body in [
            ConvexBody::ball(1.0, [0.13, -0.2]).unwrap(),
            ConvexBody::smooth(alloc::vec![1.0, 0.0, 0.25], alloc::vec![]).unwrap(),
            ConvexBody::interval(-0.7, 1.9).unwrap(),
        ] {
            let h = if body.dim() == 1 { 0.01 } else { 0.05 };
            let form = assemble(Arc::new(build_grid(&body, h).unwrap()));
            for k in 0..form.len() {
                for (m, a) in form.row(k) {
                    let back = form.row(m).find(|(c, _)| *c == k).unwrap().1;
                    assert_eq!(a.to_bits(), back.to_bits());
                }
            }
            assert!(form.mass().iter().all(|m| *m > 0.0));
        }
    }

    #[test]
    fn quadratic_form_equals_energy_for_constant() {
        let grid = Arc::new(build_grid(&ConvexBody::ball(1.0, [0.0, 0.0]).unwrap(), 0.05).unwrap());
        let form = assemble(grid.clone());
        let one = GridFunction::from_fn(grid, |_| 1.0).unwrap();
        let q = form.bilinear(one.values(), one.values());
        assert_relative_eq!(q, form.dirichlet_energy(&one), max_relative = 1e-12);
        assert!(q > 0.0);
    }
}
