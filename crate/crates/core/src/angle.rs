//! Angle helpers. Headings are stored in `[0, 2π)`.

use core::f64::consts::TAU;

/// Tolerance used when comparing headings on the circle.
pub const ANGLE_TOL: f64 = 1e-9;

/// Wraps `theta` into `[0, 2π)`.
pub fn normalize(theta: f64) -> f64 {
    let mut r = theta % TAU;
    if r < 0.0 {
        r += TAU;
    }
    // `-tiny + TAU` rounds to TAU
    if r >= TAU {
        r = 0.0;
    }
    r
}

/// Shortest distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = normalize(a - b);
    d.min(TAU - d)
}

pub fn unit(theta: f64) -> nalgebra::Vector2<f64> {
    nalgebra::Vector2::new(libm::cos(theta), libm::sin(theta))
}
