//! Quasistatic pusher-slider dynamics under an ellipsoidal limit surface.
//!
//! The slider's motion is the solution of
//!
//! ```text
//! min  alpha^2
//! s.t. twist = M W eta
//!      v_p   = W^T twist + alpha * t
//!      eta   in friction cone
//! ```
//!
//! Eliminating the twist leaves `K eta + alpha t = v_p` with
//! `K = W^T M W` symmetric positive definite, so the feasible set is a
//! one-parameter family in `alpha` and the cone cuts it to an interval.
//! The minimum of `alpha^2` is therefore either `alpha = 0` (sticking) or an
//! end of the interval, where `eta` lies on a cone edge (sliding). All three
//! candidates are evaluated in closed form.

use nalgebra::{Matrix2, Matrix3, Matrix3x2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{cross, ContactFrame, Vec2};
use crate::sim::SimState;

/// Slack when testing the sticking solution against the cone, relative to
/// `|eta|`. Keeps sticking preferred when a cone-edge candidate ties it.
const CONE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("limit surface requires f_max > 0 and tau_max > 0 (got f_max = {f_max}, tau_max = {tau_max})")]
    InvalidLimitSurface { f_max: f64, tau_max: f64 },
    #[error("force direction is zero")]
    ZeroForceDirection,
    #[error("cannot integrate a separating contact")]
    SeparatingStep,
    #[error("timestep must be > 0, got {0}")]
    InvalidTimestep(f64),
}

/// Ellipsoidal limit surface `p^T M p = 1`, `M = diag(f^-2, f^-2, tau^-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSurface {
    f_max: f64,
    tau_max: f64,
}

impl LimitSurface {
    pub fn new(f_max: f64, tau_max: f64) -> Result<Self, DynamicsError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(f_max) && ok(tau_max)) {
            return Err(DynamicsError::InvalidLimitSurface { f_max, tau_max });
        }
        Ok(Self { f_max, tau_max })
    }

    /// Torsional load from a pressure concentrated at distance `d`.
    pub fn from_support_distance(f_max: f64, d: f64) -> Result<Self, DynamicsError> {
        Self::new(f_max, d * f_max)
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let a = self.f_max.powi(-2);
        Matrix3::from_diagonal(&Vector3::new(a, a, self.tau_max.powi(-2)))
    }

    /// `p^T M p` for a generalized force `p = (f_x, f_y, tau)`.
    pub fn load(&self, p: &Vector3<f64>) -> f64 {
        (p.x * p.x + p.y * p.y) / (self.f_max * self.f_max)
            + p.z * p.z / (self.tau_max * self.tau_max)
    }

    /// `K = W^T M W` for a contact at `c`.
    fn contact_stiffness(&self, c: Vec2) -> Matrix2<f64> {
        let w = contact_map(c);
        w.transpose() * self.matrix() * w
    }
}

/// Contact Jacobian `W` (3x2) mapping a contact force at body point `c` to
/// the generalized force about the centre of mass. `W^T` maps the body twist
/// to the velocity of the slider material point at `c`.
pub fn contact_map(c: Vec2) -> Matrix3x2<f64> {
    Matrix3x2::new(1.0, 0.0, 0.0, 1.0, -c.y, c.x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactMode {
    Sticking,
    /// Pusher slips along `+t` relative to the slider.
    SlidingLeft,
    /// Pusher slips along `-t`.
    SlidingRight,
    Separating,
}

impl ContactMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContactMode::Sticking => "sticking",
            ContactMode::SlidingLeft => "sliding_left",
            ContactMode::SlidingRight => "sliding_right",
            ContactMode::Separating => "separating",
        }
    }

    pub fn is_sliding(&self) -> bool {
        matches!(self, ContactMode::SlidingLeft | ContactMode::SlidingRight)
    }
}

impl std::fmt::Display for ContactMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solution of the quasistatic motion problem for one contact and pusher
/// velocity, all in the body frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionResult {
    /// `(v_x, v_y, omega)` about the centre of mass.
    pub twist: Vector3<f64>,
    pub alpha: f64,
    pub eta: Vec2,
    pub force: Vec2,
    /// Velocity of the slider material point at the contact.
    pub v_o: Vec2,
    pub mode: ContactMode,
}

impl MotionResult {
    pub fn separating() -> Self {
        Self {
            twist: Vector3::zeros(),
            alpha: 0.0,
            eta: Vec2::zeros(),
            force: Vec2::zeros(),
            v_o: Vec2::zeros(),
            mode: ContactMode::Separating,
        }
    }

    /// Generalized force `W f` applied to the slider.
    pub fn wrench(&self, contact: Vec2) -> Vector3<f64> {
        contact_map(contact) * self.force
    }
}

/// Solves the quasistatic equations of motion for pusher velocity `v_p`
/// (body frame) at contact `cf`.
pub fn solve_motion(ls: &LimitSurface, cf: &ContactFrame, v_p: Vec2) -> MotionResult {
    let n = cf.normal;
    let t = cf.tangent;
    let approach = n.dot(&v_p);
    if approach.abs() < 1e-12 {
        log::debug!("grazing contact: n . v_p = {approach:e}");
    }
    if approach < 0.0 || !v_p.iter().all(|v| v.is_finite()) {
        return MotionResult::separating();
    }

    let k = ls.contact_stiffness(cf.point);
    let mu = cf.mu.max(0.0);

    // Sticking: alpha = 0.
    if let Some(k_inv) = k.try_inverse() {
        let eta = k_inv * v_p;
        let tol = CONE_SLACK * eta.norm();
        if n.dot(&eta) >= -tol && t.dot(&eta).abs() <= mu * n.dot(&eta) + tol {
            return finish(ls, cf, eta, 0.0, ContactMode::Sticking);
        }
    }

    // Sliding: eta = beta * e on a cone edge, beta >= 0.
    let mut best: Option<(Vec2, f64)> = None;
    let edges: &[f64] = if mu == 0.0 { &[0.0] } else { &[1.0, -1.0] };
    for &sign in edges {
        let e = (n + sign * mu * t).normalize();
        let ke = k * e;
        let det = cross(ke, t);
        if det == 0.0 {
            continue;
        }
        let beta = cross(v_p, t) / det;
        let alpha = cross(ke, v_p) / det;
        if beta < 0.0 {
            continue;
        }
        if best.is_none_or(|(_, a)| alpha * alpha < a * a) {
            best = Some((beta * e, alpha));
        }
    }

    match best {
        Some((eta, alpha)) if eta.norm() > 0.0 => {
            let mode = if alpha > 0.0 {
                ContactMode::SlidingLeft
            } else if alpha < 0.0 {
                ContactMode::SlidingRight
            } else {
                ContactMode::Sticking
            };
            finish(ls, cf, eta, alpha, mode)
        }
        _ => MotionResult::separating(),
    }
}

fn finish(
    ls: &LimitSurface,
    cf: &ContactFrame,
    eta: Vec2,
    alpha: f64,
    mode: ContactMode,
) -> MotionResult {
    let w = contact_map(cf.point);
    let force = match recover_force(ls, &w, eta) {
        Ok(f) => f,
        Err(_) => return MotionResult::separating(),
    };
    let twist = ls.matrix() * (w * eta);
    MotionResult {
        twist,
        alpha,
        eta,
        force,
        v_o: w.transpose() * twist,
        mode,
    }
}

/// Scales a force direction onto the limit surface:
/// `f = eta / sqrt(eta^T W^T M W eta)`.
pub fn recover_force(
    ls: &LimitSurface,
    w: &Matrix3x2<f64>,
    eta: Vec2,
) -> Result<Vec2, DynamicsError> {
    if eta.x == 0.0 && eta.y == 0.0 {
        return Err(DynamicsError::ZeroForceDirection);
    }
    let p = w * eta;
    let q = ls.load(&p);
    if !(q > 0.0 && q.is_finite()) {
        return Err(DynamicsError::ZeroForceDirection);
    }
    Ok(eta / q.sqrt())
}

/// One explicit Euler step of the slider pose and contact parameter.
pub fn step(state: &SimState, result: &MotionResult, dt: f64) -> Result<SimState, DynamicsError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(DynamicsError::InvalidTimestep(dt));
    }
    if result.mode == ContactMode::Separating {
        return Err(DynamicsError::SeparatingStep);
    }
    let (sin, cos) = state.phi.sin_cos();
    let (vx, vy, w) = (result.twist.x, result.twist.y, result.twist.z);
    Ok(SimState {
        x: state.x + dt * (cos * vx - sin * vy),
        y: state.y + dt * (sin * vx + cos * vy),
        phi: wrap_angle(state.phi + dt * w),
        s: state.s + dt * result.alpha,
    })
}

/// Wraps an angle into `(-pi, pi]`; values already in range are untouched.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    if a > -PI && a <= PI {
        return a;
    }
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}
