//! Contact solver properties and agreement with the cone-grid oracle.

use std::f64::consts::PI;

use nalgebra::Vector3;
use proptest::prelude::*;
use quasipush::oracle::{check_solver, cone_grid_solve, DEFAULT_GRID};
use quasipush::{
    contact_map, solve_motion, ContactFrame, ContactMode, LimitSurface, MotionResult, SliderShape,
    Vec2,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TAU_SQUARE: f64 = 0.3826;

fn square_edge(s: f64, mu: f64) -> ContactFrame {
    let sq = SliderShape::square(1.0).unwrap();
    sq.contact_frame(sq.default_edge(), s, mu).unwrap()
}

#[test]
fn frictionless_offset_push_matches_frozen_oracle() {
    // Frozen from a direct solve of beta * K n + alpha * t = v_p, with
    // the cone collapsed to the normal ray.
    let alpha = -0.0652778243788913;
    let twist = Vector3::new(0.04777774049688696, 0.0, -0.13055564875778258);

    let ls = LimitSurface::new(1.0, TAU_SQUARE).unwrap();
    let cf = square_edge(0.4, 0.0);
    let r = solve_motion(&ls, &cf, Vec2::new(0.1, 0.0));
    assert_eq!(r.mode, ContactMode::SlidingRight);
    assert!((r.alpha - alpha).abs() < 1e-12);
    assert!((r.twist - twist).norm() < 1e-12);
    assert_eq!(r.eta.y, 0.0);

    let o = cone_grid_solve(&ls, &cf, Vec2::new(0.1, 0.0), DEFAULT_GRID).unwrap();
    assert!((o.alpha - alpha).abs() < 1e-12);
    assert!((o.twist - twist).norm() < 1e-12);
}

#[test]
fn centred_push_matches_oracle() {
    let ls = LimitSurface::new(1.0, TAU_SQUARE).unwrap();
    let cf = square_edge(0.0, 0.5);
    let r = solve_motion(&ls, &cf, Vec2::new(0.1, 0.0));
    let o = cone_grid_solve(&ls, &cf, Vec2::new(0.1, 0.0), DEFAULT_GRID).unwrap();
    assert_eq!(r.mode, ContactMode::Sticking);
    assert!((r.twist - o.twist).norm() < 1e-10);
    assert!((r.force - Vec2::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn randomized_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let report = check_solver(&mut rng, 1000, DEFAULT_GRID, solve_motion);
    assert!(report.passed(), "{:#?}", report.mismatches.first());
    assert!(report.max_alpha_deviation <= 1e-5);
    assert!(report.max_twist_deviation <= 1e-5);
}

#[test]
fn oracle_check_catches_a_corrupted_solver() {
    let corrupted = |ls: &LimitSurface, cf: &ContactFrame, v: Vec2| {
        let mut r = solve_motion(ls, cf, v);
        r.alpha += 1e-3;
        r
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let report = check_solver(&mut rng, 50, 10_000, corrupted);
    assert!(!report.passed());
}

#[derive(Debug, Clone)]
struct Instance {
    ls: LimitSurface,
    cf: ContactFrame,
    v_p: Vec2,
}

prop_compose! {
    fn instance(push_range: std::ops::Range<f64>, mu_range: std::ops::Range<f64>)(
        heading in -PI..PI,
        depth in 0.05f64..1.0,
        offset in -1.0f64..1.0,
        mu in mu_range,
        f_max in 0.5f64..2.0,
        tau in 0.01f64..1.0,
        push in push_range,
        speed in 0.01f64..1.0,
    ) -> Instance {
        let n = Vec2::new(heading.cos(), heading.sin());
        let t = Vec2::new(-n.y, n.x);
        let cf = ContactFrame::new(-n * depth + t * offset, n, mu);
        let v_p = (n * push.cos() + t * push.sin()) * speed;
        Instance { ls: LimitSurface::new(f_max, tau).unwrap(), cf, v_p }
    }
}

fn pushing() -> impl Strategy<Value = Instance> {
    instance(-0.49 * PI..0.49 * PI, 0.0..2.0)
}

fn check_motion_invariants(inst: &Instance, r: &MotionResult) -> Result<(), TestCaseError> {
    let Instance { ls, cf, v_p } = inst;
    let eta = r.eta / r.eta.norm();
    prop_assert!(cf.normal.dot(&eta) >= -1e-9);
    prop_assert!(cf.tangent.dot(&eta).abs() <= cf.mu * cf.normal.dot(&eta) + 1e-9);
    let w = contact_map(cf.point);
    let p = w * r.force;
    prop_assert!((ls.load(&p) - 1.0).abs() <= 1e-9);
    prop_assert!(p.dot(&r.twist) >= 0.0);
    prop_assert!((r.twist - ls.matrix() * (w * r.eta)).norm() <= 1e-12 * r.twist.norm().max(1.0));
    let recon = r.v_o + cf.tangent * r.alpha;
    prop_assert!((recon - v_p).norm() <= 1e-9 * v_p.norm().max(1.0));
    if r.mode == ContactMode::Sticking {
        prop_assert_eq!(r.alpha, 0.0);
        prop_assert!((r.v_o - v_p).norm() <= 1e-9);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn pushing_contacts_move(inst in pushing()) {
        let r = solve_motion(&inst.ls, &inst.cf, inst.v_p);
        prop_assert_ne!(r.mode, ContactMode::Separating);
        check_motion_invariants(&inst, &r)?;
    }

    #[test]
    fn pulling_contacts_separate(inst in instance(0.5001 * PI..1.4999 * PI, 0.0..2.0)) {
        prop_assume!(inst.cf.normal.dot(&inst.v_p) < 0.0);
        let r = solve_motion(&inst.ls, &inst.cf, inst.v_p);
        prop_assert_eq!(r.mode, ContactMode::Separating);
        prop_assert_eq!(r.twist, Vector3::zeros());
    }

    #[test]
    fn frictionless_force_is_normal(inst in instance(-0.49 * PI..0.49 * PI, 0.0..1e-300)) {
        let mut inst = inst;
        inst.cf.mu = 0.0;
        let r = solve_motion(&inst.ls, &inst.cf, inst.v_p);
        let eta = r.eta / r.eta.norm();
        prop_assert!(inst.cf.tangent.dot(&eta).abs() <= 1e-9);
    }

    #[test]
    fn sticking_wins_when_feasible(inst in pushing()) {
        let w = contact_map(inst.cf.point);
        let k = w.transpose() * inst.ls.matrix() * w;
        let eta = k.try_inverse().unwrap() * inst.v_p;
        let eta = eta / eta.norm();
        let (nn, tt) = (inst.cf.normal.dot(&eta), inst.cf.tangent.dot(&eta));
        let r = solve_motion(&inst.ls, &inst.cf, inst.v_p);
        if tt.abs() < inst.cf.mu * nn - 1e-9 {
            prop_assert_eq!(r.mode, ContactMode::Sticking);
        } else if tt.abs() > inst.cf.mu * nn + 1e-9 {
            prop_assert!(r.mode.is_sliding());
        }
    }

    #[test]
    fn mirror_symmetry(inst in pushing()) {
        let r = solve_motion(&inst.ls, &inst.cf, inst.v_p);
        let mirrored_v = Vec2::new(inst.v_p.x, -inst.v_p.y);
        let m = solve_motion(&inst.ls, &inst.cf.mirrored(), mirrored_v);
        prop_assert!((m.alpha + r.alpha).abs() <= 1e-9);
        prop_assert!((m.twist.z + r.twist.z).abs() <= 1e-9 * r.twist.z.abs().max(1.0));
        prop_assert!((m.twist.x - r.twist.x).abs() <= 1e-9 * r.twist.x.abs().max(1.0));
    }
}
