//! Workspace geometry and collision checking.

use alloc::vec::Vec;

use nalgebra::Vector2;

use crate::dynamics::Trajectory;
use crate::error::{invalid, Result};

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Vector2<f64>,
    pub max: Vector2<f64>,
}

impl Rect {
    pub fn new(min: Vector2<f64>, max: Vector2<f64>) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y) || !(min.iter().chain(max.iter()).all(|v| v.is_finite())) {
            return Err(invalid("bounds need min < max and finite corners"));
        }
        Ok(Rect { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Closed containment after shrinking every side by `margin`.
    pub fn contains_inset(&self, p: &Vector2<f64>, margin: f64) -> bool {
        p.x >= self.min.x + margin
            && p.x <= self.max.x - margin
            && p.y >= self.min.y + margin
            && p.y <= self.max.y - margin
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vector2<f64>,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Vector2<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.iter().all(|v| v.is_finite()) {
            return Err(invalid("obstacle needs a finite center and positive radius"));
        }
        Ok(Circle { center, radius })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    bounds: Rect,
    obstacles: Vec<Circle>,
    robot_radius: f64,
    min_separation: Option<f64>,
}

impl Environment {
    pub fn new(bounds: Rect, obstacles: Vec<Circle>) -> Result<Self> {
        for (i, c) in obstacles.iter().enumerate() {
            let lo = bounds.min + Vector2::repeat(c.radius);
            let hi = bounds.max - Vector2::repeat(c.radius);
            if c.center.x < lo.x || c.center.x > hi.x || c.center.y < lo.y || c.center.y > hi.y {
                return Err(invalid(alloc::format!("obstacle {} leaves the bounds", i + 1)));
            }
        }
        Ok(Environment {
            bounds,
            obstacles,
            robot_radius: 0.0,
            min_separation: None,
        })
    }

    /// Obstacle-free square `[0, side]^2`.
    pub fn open_square(side: f64) -> Result<Self> {
        Self::new(Rect::new(Vector2::zeros(), Vector2::repeat(side))?, Vec::new())
    }

    pub fn with_robot_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(invalid("robot radius must be nonnegative"));
        }
        self.robot_radius = radius;
        Ok(self)
    }

    pub fn with_min_separation(mut self, sep: Option<f64>) -> Result<Self> {
        if let Some(s) = sep {
            if !(s > 0.0 && s.is_finite()) {
                return Err(invalid("min separation must be positive"));
            }
        }
        self.min_separation = sep;
        Ok(self)
    }

    pub fn bounds(&self) -> &Rect {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Circle] {
        &self.obstacles
    }

    pub fn robot_radius(&self) -> f64 {
        self.robot_radius
    }

    pub fn min_separation(&self) -> Option<f64> {
        self.min_separation
    }

    /// Whether a robot disc centred at `p` is inside the bounds and outside
    /// every obstacle. Touching counts as free.
    pub fn point_free(&self, p: &Vector2<f64>) -> bool {
        self.segment_free(p, p)
    }

    /// Same test for the whole segment `a`–`b`.
    pub fn segment_free(&self, a: &Vector2<f64>, b: &Vector2<f64>) -> bool {
        let rr = self.robot_radius;
        if !self.bounds.contains_inset(a, rr) || !self.bounds.contains_inset(b, rr) {
            return false;
        }
        self.obstacles.iter().all(|c| {
            let reach = c.radius + rr;
            segment_dist2(a, b, &c.center) >= reach * reach
        })
    }

    fn separated(&self, positions: &[Vector2<f64>]) -> bool {
        let Some(sep) = self.min_separation else {
            return true;
        };
        let s2 = sep * sep;
        positions.iter().enumerate().all(|(i, p)| {
            positions[i + 1..]
                .iter()
                .all(|q| (p - q).norm_squared() >= s2)
        })
    }
}

/// Squared distance from `p` to the segment `a`–`b`.
fn segment_dist2(a: &Vector2<f64>, b: &Vector2<f64>, p: &Vector2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm_squared();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (a + ab * t - p).norm_squared()
}

/// True iff every robot stays inside the bounds and outside every obstacle
/// along the straight pieces between consecutive samples, and (when enabled)
/// all pairs keep the minimum separation at every sample.
pub fn collision_check(traj: &Trajectory, env: &Environment) -> bool {
    let samples = traj.samples();
    let Some(first) = samples.first() else {
        return true;
    };
    if !env.separated(first.positions()) || !first.positions().iter().all(|p| env.point_free(p)) {
        return false;
    }
    samples.windows(2).all(|w| {
        env.separated(w[1].positions())
            && w[0]
                .positions()
                .iter()
                .zip(w[1].positions())
                .all(|(a, b)| a == b || env.segment_free(a, b))
    })
}
