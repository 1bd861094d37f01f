//! Thin wrappers over `libm` so call sites read like `std`.

pub(crate) use libm::{atan2, ceil, cos, exp, log, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;

#[inline]
pub(crate) fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn norm2(a: [f64; 2]) -> f64 {
    sqrt(dot2(a, a))
}

#[inline]
pub(crate) fn unit(theta: f64) -> [f64; 2] {
    [cos(theta), sin(theta)]
}

#[inline]
pub(crate) fn rotate(v: [f64; 2], phi: f64) -> [f64; 2] {
    let (c, s) = (cos(phi), sin(phi));
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
