//! Robustness sweeps over initial states and slider parameters.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sim::{run, ConfigError, SimConfig, TerminalStatus, Trajectory};

/// A torsional friction load, either absolute or relative to the slider's
/// support distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauSpec {
    /// N·m.
    Absolute(f64),
    /// Multiple of `f_max` times the mean support distance (uniform pressure).
    Uniform(f64),
    /// Multiple of `f_max` times the maximum support distance.
    MaxDistance(f64),
}

impl TauSpec {
    pub fn resolve(&self, config: &SimConfig) -> f64 {
        match *self {
            TauSpec::Absolute(v) => v,
            TauSpec::Uniform(k) => k * config.f_max * config.shape.mean_support_distance(),
            TauSpec::MaxDistance(k) => k * config.f_max * config.shape.max_support_distance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub y0: Vec<f64>,
    pub s0: Vec<f64>,
    pub phi0: Vec<f64>,
    pub mu_c: Vec<f64>,
    pub tau: Vec<TauSpec>,
}

impl Grid {
    /// Three values per axis: lateral and contact offsets of -40, 0 and
    /// 40 cm, orientations of -pi/8, 0 and pi/8, contact friction 0, 0.5 and
    /// 1, and torsional loads of 0.1 and 1 times the uniform-pressure value
    /// plus the maximum-distance value. 243 combinations.
    pub fn standard() -> Self {
        Self {
            y0: vec![-0.4, 0.0, 0.4],
            s0: vec![-0.4, 0.0, 0.4],
            phi0: vec![-PI / 8.0, 0.0, PI / 8.0],
            mu_c: vec![0.0, 0.5, 1.0],
            tau: vec![
                TauSpec::Uniform(0.1),
                TauSpec::Uniform(1.0),
                TauSpec::MaxDistance(1.0),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.y0.len() * self.s0.len() * self.phi0.len() * self.mu_c.len() * self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All combinations in lexicographic order, `y0` outermost and `tau`
    /// innermost.
    pub fn combos(&self, base: &SimConfig) -> Vec<Combo> {
        let mut out = Vec::with_capacity(self.len());
        for &y0 in &self.y0 {
            for &s0 in &self.s0 {
                for &phi0 in &self.phi0 {
                    for &mu_c in &self.mu_c {
                        for &tau in &self.tau {
                            out.push(Combo {
                                index: out.len(),
                                y0,
                                s0,
                                phi0,
                                mu_c,
                                tau,
                                tau_max: tau.resolve(base),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combo {
    pub index: usize,
    pub y0: f64,
    pub s0: f64,
    pub phi0: f64,
    pub mu_c: f64,
    pub tau: TauSpec,
    pub tau_max: f64,
}

impl Combo {
    pub fn apply(&self, base: &SimConfig) -> SimConfig {
        let mut cfg = base.clone();
        cfg.initial.y0 = self.y0;
        cfg.initial.s0 = self.s0;
        cfg.initial.phi0 = self.phi0;
        cfg.mu_c = self.mu_c;
        cfg.tau_max = self.tau_max;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Lateral offset of the contact point at the last record.
    pub final_lateral: f64,
    /// Largest lateral offset of the centre of mass from the path.
    pub max_abs_y: f64,
    pub status: TerminalStatus,
    pub slip_fraction: f64,
    pub stick_fraction: f64,
    /// Largest `|p^T M p - 1|` over non-separating records.
    pub max_load_residual: f64,
    pub records: usize,
}

impl RunSummary {
    pub fn from_trajectory(config: &SimConfig, traj: &Trajectory) -> Self {
        let max_abs_y = traj
            .records
            .iter()
            .map(|r| {
                config
                    .path
                    .lateral(crate::geometry::Vec2::new(r.x, r.y))
                    .abs()
            })
            .fold(0.0, f64::max);
        let max_load_residual = traj
            .records
            .iter()
            .map(|r| r.load_residual.abs())
            .fold(0.0, f64::max);
        Self {
            final_lateral: traj.last().lateral,
            max_abs_y,
            status: traj.status,
            slip_fraction: traj.slip_fraction(),
            stick_fraction: traj.stick_fraction(),
            max_load_residual,
            records: traj.records.len(),
        }
    }
}

/// Runs every combination of `grid` on top of `base` and maps each
/// trajectory through `f`. Runs execute in parallel on the current rayon
/// pool; results come back in combination order.
pub fn sweep_map<T, F>(grid: &Grid, base: &SimConfig, f: F) -> Vec<(Combo, Result<T, ConfigError>)>
where
    T: Send,
    F: Fn(&Combo, &SimConfig, &Trajectory) -> T + Sync,
{
    sweep_combos(&grid.combos(base), base, f)
}

pub fn sweep_combos<T, F>(
    combos: &[Combo],
    base: &SimConfig,
    f: F,
) -> Vec<(Combo, Result<T, ConfigError>)>
where
    T: Send,
    F: Fn(&Combo, &SimConfig, &Trajectory) -> T + Sync,
{
    combos
        .par_iter()
        .map(|combo| {
            let cfg = combo.apply(base);
            let out = run(&cfg).map(|traj| f(combo, &cfg, &traj));
            (*combo, out)
        })
        .collect()
}

pub fn sweep(grid: &Grid, base: &SimConfig) -> Vec<(Combo, Result<RunSummary, ConfigError>)> {
    sweep_map(grid, base, |_, cfg, traj| {
        RunSummary::from_trajectory(cfg, traj)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SliderShape;
    use approx::assert_relative_eq;

    #[test]
    fn standard_grid_has_243_combos() {
        let base = SimConfig::new(SliderShape::square(1.0).unwrap(), 1.0, 0.5);
        let combos = Grid::standard().combos(&base);
        assert_eq!(combos.len(), 243);
        assert_eq!(combos[0].y0, -0.4);
        assert_eq!(combos[0].tau, TauSpec::Uniform(0.1));
        assert_eq!(combos[1].tau, TauSpec::Uniform(1.0));
        assert_eq!(combos[3].mu_c, 0.5);
        assert_eq!(combos[242].index, 242);
    }

    #[test]
    fn circle_torsional_loads() {
        let base = SimConfig::new(SliderShape::circle(0.5).unwrap(), 1.0, 0.5);
        let taus: Vec<f64> = Grid::standard()
            .tau
            .iter()
            .map(|t| t.resolve(&base))
            .collect();
        assert_relative_eq!(taus[0], 1.0 / 30.0, epsilon = 1e-15);
        assert_relative_eq!(taus[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(taus[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn empty_grid_gives_no_results() {
        let base = SimConfig::new(SliderShape::square(1.0).unwrap(), 1.0, 0.5);
        let mut grid = Grid::standard();
        grid.mu_c.clear();
        assert!(grid.is_empty());
        assert!(sweep(&grid, &base).is_empty());
    }

    #[test]
    fn invalid_combo_is_reported_per_row() {
        let mut base = SimConfig::new(SliderShape::square(1.0).unwrap(), 1.0, 0.5);
        base.duration = 0.1;
        let grid = Grid {
            y0: vec![0.0],
            s0: vec![0.0, 0.9],
            phi0: vec![0.0],
            mu_c: vec![0.5],
            tau: vec![TauSpec::Absolute(0.3)],
        };
        let out = sweep(&grid, &base);
        assert!(out[0].1.is_ok());
        assert_eq!(out[1].1.as_ref().unwrap_err().key, "sim.s0");
    }
}
