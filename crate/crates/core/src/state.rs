use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::Vector2;

use crate::angle;
use crate::error::{invalid, Error, Result};

/// Physical parameters shared by the swarm.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmParams {
    n: usize,
    radius: f64,
    radius_overrides: Option<Vec<f64>>,
    speed: f64,
}

impl SwarmParams {
    /// `n` robots with common turning radius `radius` and unit speed.
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        let p = SwarmParams {
            n,
            radius,
            radius_overrides: None,
            speed: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_radius_overrides(mut self, radii: Vec<f64>) -> Result<Self> {
        self.radius_overrides = Some(radii);
        self.validate()?;
        Ok(self)
    }

    pub fn with_speed(mut self, speed: f64) -> Result<Self> {
        self.speed = speed;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(invalid("robot count must be at least 1"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(invalid("turning radius must be positive and finite"));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(invalid("nominal speed must be positive and finite"));
        }
        if let Some(r) = &self.radius_overrides {
            if r.len() != self.n {
                return Err(invalid(alloc::format!(
                    "expected {} radius overrides, got {}",
                    self.n,
                    r.len()
                )));
            }
            if r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(invalid("every radius override must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Common turning radius `r`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radius_overrides(&self) -> Option<&[f64]> {
        self.radius_overrides.as_deref()
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Turning radius of robot `i`, honoring overrides.
    pub fn turning_radius(&self, i: usize) -> f64 {
        match &self.radius_overrides {
            Some(r) => r[i],
            None => self.radius,
        }
    }

    /// True when every robot turns with the common radius.
    pub fn is_uniform(&self) -> bool {
        match &self.radius_overrides {
            None => true,
            Some(r) => r.iter().all(|&x| x == self.radius),
        }
    }
}

/// Positions and headings of all robots. Headings live in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    positions: Vec<Vector2<f64>>,
    headings: Vec<f64>,
}

impl SwarmState {
    pub fn new(positions: Vec<Vector2<f64>>, headings: Vec<f64>) -> Result<Self> {
        if positions.len() != headings.len() {
            return Err(invalid(alloc::format!(
                "{} positions but {} orientations",
                positions.len(),
                headings.len()
            )));
        }
        if positions.is_empty() {
            return Err(invalid("state has no robots"));
        }
        if positions.iter().any(|p| !(p.x.is_finite() && p.y.is_finite()))
            || headings.iter().any(|h| !h.is_finite())
        {
            return Err(Error::Validation(String::from("state contains non-finite values")));
        }
        let headings = headings.into_iter().map(angle::normalize).collect();
        Ok(SwarmState { positions, headings })
    }

    /// All robots at `p` facing `heading`.
    pub fn uniform(n: usize, p: Vector2<f64>, heading: f64) -> Result<Self> {
        Self::new(alloc::vec![p; n], alloc::vec![heading; n])
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, i: usize) -> Vector2<f64> {
        self.positions[i]
    }

    pub fn heading(&self, i: usize) -> f64 {
        self.headings[i]
    }

    pub fn positions(&self) -> &[Vector2<f64>] {
        &self.positions
    }

    pub fn headings(&self) -> &[f64] {
        &self.headings
    }

    pub(crate) fn translate_robot(&mut self, i: usize, delta: Vector2<f64>) {
        self.positions[i] += delta;
    }

    pub(crate) fn rotate_robot(&mut self, i: usize, dtheta: f64) {
        self.headings[i] = angle::normalize(self.headings[i] + dtheta);
    }

    /// Applies the rigid motion "rotate by `phi` about the origin, then shift
    /// by `offset`" to every robot.
    pub fn transformed(&self, phi: f64, offset: Vector2<f64>) -> Self {
        let (s, c) = (libm::sin(phi), libm::cos(phi));
        let positions = self
            .positions
            .iter()
            .map(|p| Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y) + offset)
            .collect();
        let headings = self
            .headings
            .iter()
            .map(|h| angle::normalize(h + phi))
            .collect();
        SwarmState { positions, headings }
    }

    /// Largest position difference over robots.
    pub fn max_position_error(&self, other: &SwarmState) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
