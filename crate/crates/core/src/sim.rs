//! Closed-loop simulation of a pusher driven by the force-feedback
//! controller against a quasistatic slider.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{Controller, Gains, PathFrame, DEFAULT_FORCE_DEADBAND};
use crate::dynamics::{self, solve_motion, wrap_angle, ContactMode, LimitSurface};
use crate::geometry::{EdgeId, SliderShape, Vec2};

/// Distance kept from an edge end when the contact is clamped at a corner.
pub const CORNER_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &'static str, message: impl Into<String>) -> Self {
        Self {
            key,
            message: message.into(),
        }
    }
}

/// Slider pose in the world frame plus the contact parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub s: f64,
}

impl SimState {
    pub fn new(x: f64, y: f64, phi: f64, s: f64) -> Self {
        Self {
            x,
            y,
            phi: wrap_angle(phi),
            s,
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn body_to_world(&self, v: Vec2) -> Vec2 {
        let (sin, cos) = self.phi.sin_cos();
        Vec2::new(cos * v.x - sin * v.y, sin * v.x + cos * v.y)
    }

    pub fn world_to_body(&self, v: Vec2) -> Vec2 {
        let (sin, cos) = self.phi.sin_cos();
        Vec2::new(cos * v.x + sin * v.y, -sin * v.x + cos * v.y)
    }

    /// World position of a body-frame point.
    pub fn point_to_world(&self, p: Vec2) -> Vec2 {
        self.position() + self.body_to_world(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub x0: f64,
    pub y0: f64,
    pub phi0: f64,
    pub s0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub shape: SliderShape,
    /// `None` selects the shape's default edge.
    pub edge: Option<EdgeId>,
    pub f_max: f64,
    pub tau_max: f64,
    pub mu_c: f64,
    pub gains: Gains,
    pub path: PathFrame,
    pub initial: InitialState,
    pub dt: f64,
    pub duration: f64,
    /// Amplitude of uniform noise added to each measured force component, N.
    pub force_noise: f64,
    pub force_deadband: f64,
    pub seed: u64,
}

impl SimConfig {
    /// A slider with the standard gains, a 10 ms step and a ten minute run,
    /// pushed along the world x-axis from the origin.
    pub fn new(shape: SliderShape, tau_max: f64, mu_c: f64) -> Self {
        Self {
            shape,
            edge: None,
            f_max: 1.0,
            tau_max,
            mu_c,
            gains: Gains::default(),
            path: PathFrame::x_axis(),
            initial: InitialState {
                x0: 0.0,
                y0: 0.0,
                phi0: 0.0,
                s0: 0.0,
            },
            dt: 0.01,
            duration: 600.0,
            force_noise: 0.0,
            force_deadband: DEFAULT_FORCE_DEADBAND,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key, name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("{name} must be > 0")))
            }
        };
        positive("sim.dt", "dt", self.dt)?;
        positive("sim.duration", "duration", self.duration)?;
        positive("limit_surface.f_max", "f_max", self.f_max)?;
        positive("limit_surface.tau_max", "tau_max", self.tau_max)?;
        positive("gains.k_f", "k_f", self.gains.k_f)?;
        positive("gains.k_y", "k_y", self.gains.k_y)?;
        positive("gains.speed", "speed", self.gains.speed)?;
        if !(self.mu_c >= 0.0 && self.mu_c.is_finite()) {
            return Err(ConfigError::new("contact.mu", "mu must be >= 0"));
        }
        if !(self.force_noise >= 0.0 && self.force_noise.is_finite()) {
            return Err(ConfigError::new("sensor.noise", "noise must be >= 0"));
        }
        if self.force_deadband.is_nan() || self.force_deadband < 0.0 {
            return Err(ConfigError::new("sensor.deadband", "deadband must be >= 0"));
        }
        let i = &self.initial;
        if ![i.x0, i.y0, i.phi0, i.s0].iter().all(|v| v.is_finite()) {
            return Err(ConfigError::new("sim", "initial state must be finite"));
        }
        let edge = self.edge();
        let span = self
            .shape
            .edge_span(edge)
            .map_err(|e| ConfigError::new("contact.edge", e.to_string()))?;
        if !span.contains(i.s0) {
            return Err(ConfigError::new(
                "sim.s0",
                format!(
                    "s0 = {} outside edge bounds [{}, {}]",
                    i.s0, span.lo, span.hi
                ),
            ));
        }
        Ok(())
    }

    pub fn edge(&self) -> EdgeId {
        self.edge.unwrap_or_else(|| self.shape.default_edge())
    }

    /// Number of integration steps; the trajectory holds one more record.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }
}

/// One sample of the closed loop at time `t`: the state, and the control
/// and contact solution applied from `t` to `t + dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub s: f64,
    /// Contact force on the slider, world frame.
    pub fx: f64,
    pub fy: f64,
    pub theta_f: f64,
    pub theta_p: f64,
    pub alpha: f64,
    pub mode: ContactMode,
    /// Lateral offset of the contact point from the path.
    pub lateral: f64,
    /// `p^T M p - 1` for the applied wrench; zero while separating.
    pub load_residual: f64,
    /// Approach speed `n . v_p` in the body frame.
    pub approach: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TerminalStatus {
    Completed,
    /// Contact was lost during the step ending at `t`.
    ContactLost {
        t: f64,
    },
    /// The contact reached an edge end first at `t` and was clamped;
    /// `continued` is true when the run then completed.
    CornerReached {
        t: f64,
        continued: bool,
    },
}

impl TerminalStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, TerminalStatus::Completed)
    }

    pub fn is_contact_lost(&self) -> bool {
        matches!(self, TerminalStatus::ContactLost { .. })
    }
}

impl std::fmt::Display for TerminalStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TerminalStatus::Completed => f.write_str("completed"),
            TerminalStatus::ContactLost { t } => write!(f, "contact_lost@{t}"),
            TerminalStatus::CornerReached { t, .. } => write!(f, "corner_reached@{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub status: TerminalStatus,
    pub corner_events: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Record {
        self.records
            .last()
            .expect("trajectory always holds the initial record")
    }

    /// Fraction of records with a sliding contact.
    pub fn slip_fraction(&self) -> f64 {
        let n = self.records.len();
        self.records.iter().filter(|r| r.mode.is_sliding()).count() as f64 / n as f64
    }

    pub fn stick_fraction(&self) -> f64 {
        let n = self.records.len();
        self.records
            .iter()
            .filter(|r| r.mode == ContactMode::Sticking)
            .count() as f64
            / n as f64
    }
}

/// Runs the closed loop for `config.duration` seconds or until contact is
/// lost.
pub fn run(config: &SimConfig) -> Result<Trajectory, ConfigError> {
    config.validate()?;
    let ls = LimitSurface::new(config.f_max, config.tau_max)
        .map_err(|e| ConfigError::new("limit_surface", e.to_string()))?;
    let edge = config.edge();
    let span = config
        .shape
        .edge_span(edge)
        .map_err(|e| ConfigError::new("contact.edge", e.to_string()))?;
    let init = &config.initial;
    let mut state = SimState::new(init.x0, init.y0, init.phi0, span.wrap(init.s0));
    let mut controller = Controller::new(config.gains, config.path, config.force_deadband);
    let mut noise = (config.force_noise > 0.0).then(|| ChaCha8Rng::seed_from_u64(config.seed));

    let steps = config.steps();
    let mut records = Vec::with_capacity(steps + 1);
    let mut measured = Vec2::zeros();
    let mut status = TerminalStatus::Completed;
    let mut first_corner = None;
    let mut corner_events = 0;

    for k in 0..=steps {
        let t = k as f64 * config.dt;
        let frame = config
            .shape
            .contact_frame(edge, state.s, config.mu_c)
            .map_err(|e| ConfigError::new("contact.edge", e.to_string()))?;
        let contact_world = state.point_to_world(frame.point);
        let cmd = controller.command(measured, contact_world);
        let v_body = state.world_to_body(cmd.velocity);
        let result = solve_motion(&ls, &frame, v_body);
        let force_world = state.body_to_world(result.force);
        let load_residual = if result.mode == ContactMode::Separating {
            0.0
        } else {
            ls.load(&result.wrench(frame.point)) - 1.0
        };
        records.push(Record {
            t,
            x: state.x,
            y: state.y,
            phi: state.phi,
            s: state.s,
            fx: force_world.x,
            fy: force_world.y,
            theta_f: cmd.theta_f,
            theta_p: cmd.theta_p,
            alpha: result.alpha,
            mode: result.mode,
            lateral: cmd.lateral,
            load_residual,
            approach: frame.normal.dot(&v_body),
        });
        if result.mode == ContactMode::Separating {
            status = TerminalStatus::ContactLost { t: t + config.dt };
            break;
        }
        if k == steps {
            break;
        }

        measured = force_world;
        if let Some(rng) = noise.as_mut() {
            let a = config.force_noise;
            measured += Vec2::new(rng.gen_range(-a..=a), rng.gen_range(-a..=a));
        }

        state = dynamics::step(&state, &result, config.dt)
            .expect("non-separating step with positive dt");
        if span.periodic {
            state.s = span.wrap(state.s);
        } else if state.s > span.hi || state.s < span.lo {
            state.s = if state.s > span.hi {
                span.hi - CORNER_MARGIN
            } else {
                span.lo + CORNER_MARGIN
            };
            corner_events += 1;
            first_corner.get_or_insert(t + config.dt);
        }
    }

    if let (TerminalStatus::Completed, Some(t)) = (status, first_corner) {
        status = TerminalStatus::CornerReached { t, continued: true };
    }
    Ok(Trajectory {
        records,
        status,
        corner_events,
    })
}
