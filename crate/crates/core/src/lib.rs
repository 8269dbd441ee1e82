//! Quasistatic planar pushing with single-point contact.
//!
//! The slider obeys an ellipsoidal limit surface with uniform support
//! friction; its motion for a given pusher velocity is the minimum-slip
//! solution inside the contact friction cone ([`dynamics`]). A pusher
//! controlled only from the measured contact force and its own position
//! ([`controller`]) drives the slider along a straight line, and [`sim`] /
//! [`sweep`] run that closed loop, singly or over parameter grids.

pub mod controller;
pub mod dynamics;
pub mod geometry;
pub mod oracle;
mod quadrature;
pub mod sim;
pub mod sweep;

pub use controller::{Controller, Gains, PathFrame};
pub use dynamics::{
    contact_map, recover_force, solve_motion, ContactMode, LimitSurface, MotionResult,
};
pub use geometry::{ContactFrame, EdgeId, SliderShape, Vec2};
pub use sim::{
    run, ConfigError, InitialState, Record, SimConfig, SimState, TerminalStatus, Trajectory,
};
pub use sweep::{sweep, sweep_map, Combo, Grid, RunSummary, TauSpec};
