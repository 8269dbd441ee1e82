//! Whole-run properties of the pushing loop.

use std::f64::consts::PI;

use proptest::prelude::*;
use quasipush::{
    run, ContactMode, SimConfig, SimState, SliderShape, TerminalStatus, Trajectory, Vec2,
};

fn square(mu: f64) -> SimConfig {
    let shape = SliderShape::square(1.0).unwrap();
    let tau = shape.mean_support_distance();
    SimConfig::new(shape, tau, mu)
}

fn circle(mu: f64) -> SimConfig {
    let shape = SliderShape::circle(0.5).unwrap();
    let tau = shape.mean_support_distance();
    SimConfig::new(shape, tau, mu)
}

fn with_initial(mut cfg: SimConfig, y0: f64, s0: f64, phi0: f64, duration: f64) -> SimConfig {
    cfg.initial.y0 = y0;
    cfg.initial.s0 = s0;
    cfg.initial.phi0 = phi0;
    cfg.duration = duration;
    cfg
}

fn assert_mirrored(a: &Trajectory, b: &Trajectory, tol: f64) {
    assert_eq!(a.records.len(), b.records.len());
    for (r, m) in a.records.iter().zip(&b.records) {
        assert_eq!(r.t, m.t);
        assert!((r.x - m.x).abs() <= tol, "x at t={}", r.t);
        assert!((r.y + m.y).abs() <= tol, "y at t={}", r.t);
        assert!((r.phi + m.phi).abs() <= tol, "phi at t={}", r.t);
        assert!((r.s + m.s).abs() <= tol, "s at t={}", r.t);
        assert!((r.theta_f + m.theta_f).abs() <= tol, "theta_f at t={}", r.t);
        assert!((r.theta_p + m.theta_p).abs() <= tol, "theta_p at t={}", r.t);
    }
}

#[test]
fn symmetric_push_is_an_equilibrium() {
    let traj = run(&square(0.5)).unwrap();
    assert_eq!(traj.status, TerminalStatus::Completed);
    assert_eq!(traj.records.len(), 60_001);
    let last = traj.last();
    assert!(last.y.abs() <= 1e-3 && last.s.abs() <= 1e-3);
    assert!((last.x - 60.0).abs() < 1e-6);
    assert!(traj.records.iter().all(|r| r.mode == ContactMode::Sticking));
}

#[test]
fn frictionless_contact_slips_toward_centre() {
    let cfg = with_initial(square(0.0), -0.4, -0.4, -PI / 8.0, 60.0);
    let traj = run(&cfg).unwrap();
    assert!(traj.status.is_completed());
    assert!(
        traj.last().s.abs() <= 0.25 * 0.4,
        "s(60) = {}",
        traj.last().s
    );
    assert!(traj.slip_fraction() > 0.5);
}

#[test]
fn high_friction_contact_does_not_slip() {
    let cfg = with_initial(square(1.0), -0.4, -0.4, -PI / 8.0, 600.0);
    let traj = run(&cfg).unwrap();
    assert!(traj.status.is_completed());
    let tail: Vec<f64> = traj
        .records
        .iter()
        .filter(|r| r.t >= 60.0)
        .map(|r| r.s)
        .collect();
    let variation: f64 = tail.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    assert!(variation <= 0.01, "total variation {variation}");
    // The push is stable with the force line off the contact normal.
    assert!(traj.last().phi.abs() > 0.1);
}

#[test]
fn shifting_along_path_shifts_x_only() {
    let base = with_initial(square(0.5), 0.3, -0.2, 0.2, 120.0);
    let mut shifted = base.clone();
    shifted.initial.x0 = 7.25;
    let a = run(&base).unwrap();
    let b = run(&shifted).unwrap();
    assert_eq!(a.records.len(), b.records.len());
    for (r, q) in a.records.iter().zip(&b.records) {
        assert!((q.x - r.x - 7.25).abs() <= 1e-12);
        assert!((q.y - r.y).abs() <= 1e-12);
        assert!((q.phi - r.phi).abs() <= 1e-12);
        assert!((q.s - r.s).abs() <= 1e-12);
        assert!((q.theta_p - r.theta_p).abs() <= 1e-12);
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let cfg = with_initial(circle(0.5), -0.4, 0.4, PI / 8.0, 200.0);
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mirrored_start_mirrors_the_run() {
    for cfg in [square(0.5), circle(1.0), square(0.0)] {
        let a = run(&with_initial(cfg.clone(), 0.4, -0.4, PI / 8.0, 300.0)).unwrap();
        let b = run(&with_initial(cfg, -0.4, 0.4, -PI / 8.0, 300.0)).unwrap();
        assert_mirrored(&a, &b, 1e-9);
    }
}

#[test]
fn lost_contact_is_explained_by_the_last_solve() {
    let mut cfg = with_initial(square(0.5), 0.0, 0.0, 0.0, 10.0);
    cfg.gains.k_y = 5.0;
    cfg.initial.y0 = 2.0;
    let traj = run(&cfg).unwrap();
    let TerminalStatus::ContactLost { t } = traj.status else {
        panic!("expected contact loss, got {:?}", traj.status);
    };
    let last = traj.last();
    assert_eq!(last.mode, ContactMode::Separating);
    assert!(last.approach < 1e-12);
    assert!((t - last.t - cfg.dt).abs() < 1e-12);
    assert!(traj.records[..traj.records.len() - 1]
        .iter()
        .all(|r| r.mode != ContactMode::Separating));
}

#[test]
fn contact_point_follows_the_pusher() {
    let cfg = with_initial(square(0.3), -0.4, 0.3, 0.3, 60.0);
    let traj = run(&cfg).unwrap();
    let edge = cfg.edge();
    let contact = |r: &quasipush::Record| {
        let frame = cfg.shape.contact_frame(edge, r.s, cfg.mu_c).unwrap();
        SimState::new(r.x, r.y, r.phi, r.s).point_to_world(frame.point)
    };
    for w in traj.records.windows(2) {
        let v = Vec2::new(w[0].theta_p.cos(), w[0].theta_p.sin()) * cfg.gains.speed;
        let moved = contact(&w[1]) - contact(&w[0]);
        assert!((moved - v * cfg.dt).norm() <= 1e-5, "t={}", w[0].t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mirror_symmetry_holds_for_random_starts(
        y0 in -0.5f64..0.5,
        s0 in -0.45f64..0.45,
        phi0 in -0.4f64..0.4,
        mu in 0.0f64..1.2,
        tau_scale in 0.1f64..1.5,
        round in any::<bool>(),
    ) {
        let mut cfg = if round { circle(mu) } else { square(mu) };
        cfg.tau_max *= tau_scale;
        let a = run(&with_initial(cfg.clone(), y0, s0, phi0, 60.0)).unwrap();
        let b = run(&with_initial(cfg, -y0, -s0, -phi0, 60.0)).unwrap();
        prop_assert_eq!(a.records.len(), b.records.len());
        for (r, m) in a.records.iter().zip(&b.records) {
            prop_assert!((r.y + m.y).abs() <= 1e-9);
            prop_assert!((r.phi + m.phi).abs() <= 1e-9);
            prop_assert!((r.s + m.s).abs() <= 1e-9);
            prop_assert!((r.theta_p + m.theta_p).abs() <= 1e-9);
        }
    }

    #[test]
    fn residency_holds_on_every_step(
        y0 in -0.5f64..0.5,
        s0 in -0.45f64..0.45,
        phi0 in -0.4f64..0.4,
        mu in 0.0f64..1.2,
    ) {
        let traj = run(&with_initial(square(mu), y0, s0, phi0, 30.0)).unwrap();
        for r in traj.records.iter().filter(|r| r.mode != ContactMode::Separating) {
            prop_assert!(r.load_residual.abs() <= 1e-9);
        }
    }
}
