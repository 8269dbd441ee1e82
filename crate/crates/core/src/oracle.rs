//! Brute-force reference for the contact motion problem.
//!
//! Sweeps the force direction across the friction cone on a uniform angle
//! grid, solves `beta * (W^T M W e) + alpha * t = v_p` for every direction
//! `e`, and keeps the feasible (`beta >= 0`) direction with the smallest
//! slip. The best grid cell is then polished by golden-section search on
//! `|alpha|`. Nothing here calls into [`crate::dynamics::solve_motion`].

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ContactMode, LimitSurface, MotionResult};
use crate::geometry::{ContactFrame, Vec2};

pub const DEFAULT_GRID: usize = 100_000;
/// Agreement required between solver and oracle, relative to
/// `max(1, |oracle value|)`.
pub const CHECK_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub alpha: f64,
    pub twist: Vector3<f64>,
    /// Cone angle of the force direction, measured from the normal.
    pub angle: f64,
}

struct Problem {
    inv_f2: f64,
    inv_t2: f64,
    c: Vec2,
    n: Vec2,
    t: Vec2,
    v_p: Vec2,
}

impl Problem {
    fn direction(&self, psi: f64) -> Vec2 {
        self.n * psi.cos() + self.t * psi.sin()
    }

    fn twist(&self, e: Vec2) -> Vector3<f64> {
        let torque = self.c.x * e.y - self.c.y * e.x;
        Vector3::new(self.inv_f2 * e.x, self.inv_f2 * e.y, self.inv_t2 * torque)
    }

    /// `(beta, alpha, twist per unit beta)` for direction angle `psi`, if the
    /// system is non-singular.
    fn solve(&self, psi: f64) -> Option<(f64, f64, Vector3<f64>)> {
        let e = self.direction(psi);
        let tw = self.twist(e);
        // Contact-point velocity of the unit-beta twist.
        let vo = Vec2::new(tw.x - tw.z * self.c.y, tw.y + tw.z * self.c.x);
        let (a, b, c, d) = (vo.x, self.t.x, vo.y, self.t.y);
        let det = a * d - b * c;
        if det == 0.0 {
            return None;
        }
        let beta = (self.v_p.x * d - b * self.v_p.y) / det;
        let alpha = (a * self.v_p.y - c * self.v_p.x) / det;
        Some((beta, alpha, tw))
    }

    fn slip(&self, psi: f64) -> f64 {
        match self.solve(psi) {
            Some((beta, alpha, _)) if beta >= 0.0 => alpha.abs(),
            _ => f64::INFINITY,
        }
    }
}

/// Minimum-slip solution over `samples` cone directions, or `None` when no
/// direction is feasible.
pub fn cone_grid_solve(
    ls: &LimitSurface,
    cf: &ContactFrame,
    v_p: Vec2,
    samples: usize,
) -> Option<OracleSolution> {
    let problem = Problem {
        inv_f2: 1.0 / (ls.f_max() * ls.f_max()),
        inv_t2: 1.0 / (ls.tau_max() * ls.tau_max()),
        c: cf.point,
        n: cf.normal,
        t: Vec2::new(-cf.normal.y, cf.normal.x),
        v_p,
    };
    let half = cf.mu.max(0.0).atan();
    let samples = samples.max(2);
    let angle = |i: usize| -half + 2.0 * half * i as f64 / (samples - 1) as f64;

    let (mut best_i, mut best) = (usize::MAX, f64::INFINITY);
    let count = if half == 0.0 { 1 } else { samples };
    for i in 0..count {
        let s = problem.slip(angle(i));
        if s < best {
            best = s;
            best_i = i;
        }
    }
    if best_i == usize::MAX {
        return None;
    }

    let mut psi = angle(best_i);
    if count > 1 {
        let lo = angle(best_i.saturating_sub(1));
        let hi = angle((best_i + 1).min(count - 1));
        let refined = golden_section(|p| problem.slip(p), lo, hi);
        if problem.slip(refined) < best {
            psi = refined;
        }
    }
    let (beta, alpha, tw) = problem.solve(psi)?;
    Some(OracleSolution {
        alpha,
        twist: tw * beta,
        angle: psi,
    })
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= 1e-17 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// A random contact problem with the pusher moving into the slider.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub f_max: f64,
    pub tau_max: f64,
    pub frame: ContactFrame,
    pub v_p: Vec2,
}

impl Instance {
    pub fn limit_surface(&self) -> LimitSurface {
        LimitSurface::new(self.f_max, self.tau_max)
            .expect("instances are generated with positive loads")
    }

    /// Draws a contact on a convex slider: the centre of mass lies strictly
    /// on the inner side of the contact tangent line.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let heading = rng.gen_range(-PI..PI);
        let normal = Vec2::new(heading.cos(), heading.sin());
        let tangent = Vec2::new(-normal.y, normal.x);
        let depth = rng.gen_range(0.05..1.0);
        let offset = rng.gen_range(-1.0..1.0);
        let point = -normal * depth + tangent * offset;
        let mu = rng.gen_range(0.0..2.0);
        let push = rng.gen_range(-0.49 * PI..0.49 * PI);
        let speed = rng.gen_range(0.01..1.0);
        let dir = normal * push.cos() + tangent * push.sin();
        Self {
            f_max: rng.gen_range(0.5..2.0),
            tau_max: rng.gen_range(0.01..1.0),
            frame: ContactFrame::new(point, normal, mu),
            v_p: dir * speed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub index: usize,
    pub instance: Instance,
    pub solver_alpha: f64,
    pub solver_twist: Vector3<f64>,
    pub solver_mode: ContactMode,
    pub oracle: Option<OracleSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub count: usize,
    /// Largest scaled deviation `|a - b| / max(1, |b|)` seen on alpha.
    pub max_alpha_deviation: f64,
    /// Largest scaled deviation over the twist components.
    pub max_twist_deviation: f64,
    pub mismatches: Vec<Mismatch>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn scaled_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Compares `solver` with the cone-grid oracle on `count` random instances
/// drawn from `rng`.
pub fn check_solver<R, S>(rng: &mut R, count: usize, samples: usize, solver: S) -> CheckReport
where
    R: Rng,
    S: Fn(&LimitSurface, &ContactFrame, Vec2) -> MotionResult,
{
    let mut report = CheckReport {
        count,
        max_alpha_deviation: 0.0,
        max_twist_deviation: 0.0,
        mismatches: Vec::new(),
    };
    for index in 0..count {
        let instance = Instance::random(rng);
        let ls = instance.limit_surface();
        let got = solver(&ls, &instance.frame, instance.v_p);
        let want = cone_grid_solve(&ls, &instance.frame, instance.v_p, samples);
        let ok = match (&want, got.mode) {
            (Some(w), mode) if mode != ContactMode::Separating => {
                let da = scaled_dev(got.alpha, w.alpha);
                let dt = (0..3)
                    .map(|k| scaled_dev(got.twist[k], w.twist[k]))
                    .fold(0.0, f64::max);
                report.max_alpha_deviation = report.max_alpha_deviation.max(da);
                report.max_twist_deviation = report.max_twist_deviation.max(dt);
                da <= CHECK_TOLERANCE && dt <= CHECK_TOLERANCE
            }
            _ => false,
        };
        if !ok {
            report.mismatches.push(Mismatch {
                index,
                instance,
                solver_alpha: got.alpha,
                solver_twist: got.twist,
                solver_mode: got.mode,
                oracle: want,
            });
        }
    }
    report
}
