//! Force-feedback straight-line pushing controller.
//!
//! The pusher moves at constant speed; only its heading is controlled:
//! `theta_p = (k_f + 1) theta_f + k_y y_c`, with `theta_f` the heading of the
//! measured contact force and `y_c` the lateral offset of the contact point,
//! both measured in the path frame.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec2;

pub const DEFAULT_FORCE_DEADBAND: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControllerError {
    #[error("{name} must be > 0, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("path direction must be non-zero and finite")]
    BadDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub k_f: f64,
    /// rad/m
    pub k_y: f64,
    /// Pusher speed, m/s.
    pub speed: f64,
}

impl Gains {
    pub fn new(k_f: f64, k_y: f64, speed: f64) -> Result<Self, ControllerError> {
        let g = Self { k_f, k_y, speed };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ControllerError> {
        for (name, value) in [("k_f", self.k_f), ("k_y", self.k_y), ("speed", self.speed)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ControllerError::NonPositive { name, value });
            }
        }
        Ok(())
    }
}

impl Default for Gains {
    /// Gains that stabilise every slider in the standard robustness grid.
    fn default() -> Self {
        Self {
            k_f: 0.1,
            k_y: 0.01,
            speed: 0.1,
        }
    }
}

/// The desired path: a ray through `origin` along unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFrame {
    origin: Vec2,
    direction: Vec2,
}

impl PathFrame {
    pub fn new(origin: Vec2, direction: Vec2) -> Result<Self, ControllerError> {
        let norm = direction.norm();
        if !(norm > 0.0 && norm.is_finite()) || !origin.iter().all(|v| v.is_finite()) {
            return Err(ControllerError::BadDirection);
        }
        Ok(Self {
            origin,
            direction: direction / norm,
        })
    }

    /// The world x-axis.
    pub fn x_axis() -> Self {
        Self {
            origin: Vec2::zeros(),
            direction: Vec2::x(),
        }
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn direction(&self) -> Vec2 {
        self.direction
    }

    /// Rotates a world vector into path coordinates.
    pub fn vector_to_path(&self, v: Vec2) -> Vec2 {
        let d = self.direction;
        Vec2::new(d.x * v.x + d.y * v.y, -d.y * v.x + d.x * v.y)
    }

    pub fn vector_to_world(&self, v: Vec2) -> Vec2 {
        let d = self.direction;
        Vec2::new(d.x * v.x - d.y * v.y, d.y * v.x + d.x * v.y)
    }

    pub fn point_to_path(&self, p: Vec2) -> Vec2 {
        self.vector_to_path(p - self.origin)
    }

    /// Signed lateral distance of a world point from the path.
    pub fn lateral(&self, p: Vec2) -> f64 {
        self.point_to_path(p).y
    }
}

/// Heading of a path-frame force in `(-pi, pi]`. Forces below `deadband`
/// return `prev` unchanged.
pub fn force_angle(f_path: Vec2, prev: f64, deadband: f64) -> f64 {
    if f_path.norm() < deadband {
        return prev;
    }
    let a = f_path.y.atan2(f_path.x);
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

pub fn pushing_angle(theta_f: f64, lateral: f64, gains: &Gains) -> f64 {
    (gains.k_f + 1.0) * theta_f + gains.k_y * lateral
}

/// World-frame pusher velocity for heading `theta_p` in the path frame.
pub fn pusher_velocity(theta_p: f64, gains: &Gains, path: &PathFrame) -> Vec2 {
    let (sin, cos) = theta_p.sin_cos();
    path.vector_to_world(Vec2::new(gains.speed * cos, gains.speed * sin))
}

/// One control decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub theta_f: f64,
    pub theta_p: f64,
    pub lateral: f64,
    /// World frame.
    pub velocity: Vec2,
}

/// Per-run controller instance; holds the last valid force heading.
#[derive(Debug, Clone)]
pub struct Controller {
    gains: Gains,
    path: PathFrame,
    deadband: f64,
    prev_theta_f: f64,
}

impl Controller {
    pub fn new(gains: Gains, path: PathFrame, deadband: f64) -> Self {
        Self {
            gains,
            path,
            deadband,
            prev_theta_f: 0.0,
        }
    }

    pub fn gains(&self) -> &Gains {
        &self.gains
    }

    pub fn path(&self) -> &PathFrame {
        &self.path
    }

    /// Computes the pusher velocity from the measured world force and the
    /// world position of the contact point.
    pub fn command(&mut self, force_world: Vec2, contact_world: Vec2) -> Command {
        let theta_f = force_angle(
            self.path.vector_to_path(force_world),
            self.prev_theta_f,
            self.deadband,
        );
        self.prev_theta_f = theta_f;
        let lateral = self.path.lateral(contact_world);
        let theta_p = pushing_angle(theta_f, lateral, &self.gains);
        Command {
            theta_f,
            theta_p,
            lateral,
            velocity: pusher_velocity(theta_p, &self.gains, &self.path),
        }
    }
}
