//! First Dirichlet eigenvalue of the Ornstein-Uhlenbeck operator
//! `Lu = Δu − ⟨∇u, x⟩` on convex bodies in one and two dimensions, together
//! with the geometric machinery used to test its convexity under Minkowski
//! combination and the log-concavity of its eigenfunction.
//!
//! The crate is `no_std` (it needs `alloc`). Everything in here is pure
//! computation: IO, configuration and reporting live in the `ou-brunn`
//! companion crate.
//!
//! Layout:
//!
//! * [`geometry`]: convex bodies described by support functions, Minkowski
//!   combinations, mean width, rotation means.
//! * [`gauss`]: Gaussian density and measure, `erf`, half-space calibration.
//! * [`shooting`]: 1D and radial ODE eigenvalue oracles.
//! * [`grid`], [`form`], [`eigen`]: the lattice discretisation, the weighted
//!   stiffness/mass pair and the inverse-iteration eigensolver.
//! * [`concavity`]: midpoint log-concavity, discrete Hessians of `−ln u`,
//!   Laplacian sign and star-shapedness checks.
//! * [`legendre`]: discrete Legendre-Fenchel transforms and sup-convolution.
//! * [`spd`]: small SPD matrices and the trace-inverse convexity lemma.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is the NaN-rejecting form; index loops mirror grid indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod concavity;
pub mod eigen;
mod error;
pub mod form;
pub mod gauss;
pub mod geometry;
pub mod grid;
pub mod legendre;
mod math;
pub mod shooting;
pub mod spd;

pub use eigen::{converged_eigenvalue, first_eigenpair, rayleigh_quotient, EigenResult, ToleranceBudget};
pub use error::{Error, Result};
pub use form::{assemble, DiscreteOUForm};
pub use geometry::{ConvexBody, DirectionGrid};
pub use grid::{build_grid, Grid, GridFunction};
