//! Shared fixtures for the benchmarks.

use quasipush::{ContactFrame, LimitSurface, SimConfig, SliderShape, Vec2};

/// Contact problems on the unit square's pushed edge, spread over contact
/// offsets and pushing directions so every contact mode shows up.
pub fn square_contacts(mu: f64) -> Vec<(LimitSurface, ContactFrame, Vec2)> {
    let shape = SliderShape::square(1.0).expect("unit square");
    let ls = LimitSurface::from_support_distance(1.0, shape.mean_support_distance())
        .expect("positive loads");
    let edge = shape.default_edge();
    let mut out = Vec::new();
    for i in 0..9 {
        let s = -0.4 + 0.1 * i as f64;
        let cf = shape
            .contact_frame(edge, s, mu)
            .expect("offset on the edge");
        for j in 0..9 {
            let a = -1.2 + 0.3 * j as f64;
            out.push((ls, cf, Vec2::new(a.cos(), a.sin()) * 0.1));
        }
    }
    out
}

/// An off-path square push of the given length in seconds.
pub fn offset_push(duration: f64) -> SimConfig {
    let shape = SliderShape::square(1.0).expect("unit square");
    let tau = shape.mean_support_distance();
    let mut cfg = SimConfig::new(shape, tau, 0.5);
    cfg.initial.y0 = 0.4;
    cfg.initial.s0 = -0.4;
    cfg.initial.phi0 = std::f64::consts::FRAC_PI_8;
    cfg.duration = duration;
    cfg
}
