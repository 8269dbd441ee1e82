//! Text configuration files.
//!
//! A config is a TOML document with one table per concern. Every key is
//! optional; omitted keys take the values of the standard square push.
//! Lengths are in meters and angles in radians.
//!
//! ```toml
//! [slider]
//! shape = "square"        # square | rectangle | circle | polygon
//! side = 1.0
//!
//! [limit_surface]
//! f_max = 1.0
//! tau_max = { uniform = 1.0 }   # or a number in N m, or { max_distance = 1.0 }
//!
//! [contact]
//! mu = 0.5
//!
//! [gains]
//! k_f = 0.1
//! k_y = 0.01
//! speed = 0.1
//!
//! [path]
//! origin = [0.0, 0.0]
//! direction = [1.0, 0.0]
//!
//! [sim]
//! dt = 0.01
//! duration = 600.0
//! y0 = 0.0
//! s0 = 0.0
//! phi0 = 0.0
//!
//! [sensor]
//! noise = 0.0
//! seed = 0
//! ```

use std::path::Path;

use anyhow::Context;
use quasipush::{
    EdgeId, Gains, Grid, InitialState, PathFrame, SimConfig, SliderShape, TauSpec, Vec2,
};
use serde::{Deserialize, Serialize};

/// A config that could not be turned into a simulation.
#[derive(Debug)]
pub struct InvalidConfig(pub String);

impl std::fmt::Display for InvalidConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidConfig {}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub slider: SliderSection,
    pub limit_surface: LimitSurfaceSection,
    pub contact: ContactSection,
    pub gains: GainsSection,
    pub path: PathSection,
    pub sim: SimSection,
    pub sensor: SensorSection,
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SliderSection {
    Square { side: f64 },
    Rectangle { width: f64, height: f64 },
    Circle { radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Default for SliderSection {
    fn default() -> Self {
        SliderSection::Square { side: 1.0 }
    }
}

impl SliderSection {
    pub fn build(&self) -> Result<SliderShape, InvalidConfig> {
        let shape = match self {
            SliderSection::Square { side } => SliderShape::square(*side),
            SliderSection::Rectangle { width, height } => SliderShape::rectangle(*width, *height),
            SliderSection::Circle { radius } => SliderShape::circle(*radius),
            SliderSection::Polygon { vertices } => {
                SliderShape::polygon(vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect())
            }
        };
        shape.map_err(|e| InvalidConfig(format!("slider: {e}")))
    }
}

/// A torsional load: a number in N m, or a table such as
/// `{ uniform = 0.1 }` / `{ max_distance = 1.0 }` / `{ absolute = 0.3 }`.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(untagged)]
pub enum TauValue {
    Number(f64),
    Spec(TauSpec),
}

impl TauValue {
    pub fn spec(&self) -> TauSpec {
        match *self {
            TauValue::Number(v) => TauSpec::Absolute(v),
            TauValue::Spec(s) => s,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitSurfaceSection {
    pub f_max: f64,
    pub tau_max: TauValue,
}

impl Default for LimitSurfaceSection {
    fn default() -> Self {
        Self {
            f_max: 1.0,
            tau_max: TauValue::Spec(TauSpec::Uniform(1.0)),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContactSection {
    pub mu: f64,
    /// Polygon edge index; the default edge faces the body -x axis.
    pub edge: Option<usize>,
}

impl Default for ContactSection {
    fn default() -> Self {
        Self {
            mu: 0.5,
            edge: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsSection {
    pub k_f: f64,
    pub k_y: f64,
    pub speed: f64,
}

impl Default for GainsSection {
    fn default() -> Self {
        let g = Gains::default();
        Self {
            k_f: g.k_f,
            k_y: g.k_y,
            speed: g.speed,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSection {
    pub origin: [f64; 2],
    pub direction: [f64; 2],
}

impl Default for PathSection {
    fn default() -> Self {
        Self {
            origin: [0.0, 0.0],
            direction: [1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt: f64,
    pub duration: f64,
    pub x0: f64,
    pub y0: f64,
    pub phi0: f64,
    pub s0: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            dt: 0.01,
            duration: 600.0,
            x0: 0.0,
            y0: 0.0,
            phi0: 0.0,
            s0: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSection {
    pub noise: f64,
    pub deadband: f64,
    pub seed: u64,
}

impl Default for SensorSection {
    fn default() -> Self {
        Self {
            noise: 0.0,
            deadband: quasipush::controller::DEFAULT_FORCE_DEADBAND,
            seed: 0,
        }
    }
}

/// Overrides for the sweep grid; omitted axes keep the standard values.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub y0: Option<Vec<f64>>,
    pub s0: Option<Vec<f64>>,
    pub phi0: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub tau_max: Option<Vec<TauValue>>,
}

impl GridSection {
    pub fn build(&self) -> Grid {
        let std = Grid::standard();
        Grid {
            y0: self.y0.clone().unwrap_or(std.y0),
            s0: self.s0.clone().unwrap_or(std.s0),
            phi0: self.phi0.clone().unwrap_or(std.phi0),
            mu_c: self.mu.clone().unwrap_or(std.mu_c),
            tau: self
                .tau_max
                .as_ref()
                .map(|v| v.iter().map(TauValue::spec).collect())
                .unwrap_or(std.tau),
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, InvalidConfig> {
        toml::from_str(text).map_err(|e| InvalidConfig(e.to_string()))
    }

    /// Resolves the file into a validated simulation config.
    pub fn to_sim_config(&self) -> Result<SimConfig, InvalidConfig> {
        let shape = self.slider.build()?;
        self.to_sim_config_with(shape)
    }

    pub fn to_sim_config_with(&self, shape: SliderShape) -> Result<SimConfig, InvalidConfig> {
        let p = &self.path;
        let path = PathFrame::new(
            Vec2::new(p.origin[0], p.origin[1]),
            Vec2::new(p.direction[0], p.direction[1]),
        )
        .map_err(|e| InvalidConfig(format!("path.direction: {e}")))?;
        let mut cfg = SimConfig {
            shape,
            edge: self.contact.edge.map(EdgeId::Edge),
            f_max: self.limit_surface.f_max,
            tau_max: 0.0,
            mu_c: self.contact.mu,
            gains: Gains {
                k_f: self.gains.k_f,
                k_y: self.gains.k_y,
                speed: self.gains.speed,
            },
            path,
            initial: InitialState {
                x0: self.sim.x0,
                y0: self.sim.y0,
                phi0: self.sim.phi0,
                s0: self.sim.s0,
            },
            dt: self.sim.dt,
            duration: self.sim.duration,
            force_noise: self.sensor.noise,
            force_deadband: self.sensor.deadband,
            seed: self.sensor.seed,
        };
        cfg.tau_max = self.limit_surface.tau_max.spec().resolve(&cfg);
        cfg.validate().map_err(|e| InvalidConfig(e.to_string()))?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Grid {
        self.grid
            .as_ref()
            .map(GridSection::build)
            .unwrap_or_else(Grid::standard)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_standard_square() {
        let cfg = ConfigFile::parse("").unwrap().to_sim_config().unwrap();
        assert_eq!(cfg.dt, 0.01);
        assert_eq!(cfg.duration, 600.0);
        assert_eq!(cfg.gains, Gains::default());
        let d = cfg.shape.mean_support_distance();
        assert!((cfg.tau_max - d).abs() < 1e-15);
    }

    #[test]
    fn tau_forms() {
        let c = ConfigFile::parse("[limit_surface]\ntau_max = 0.25").unwrap();
        assert_eq!(c.to_sim_config().unwrap().tau_max, 0.25);
        let c = ConfigFile::parse("[slider]\nshape = \"circle\"\nradius = 0.5\n[limit_surface]\ntau_max = { max_distance = 1.0 }").unwrap();
        assert_eq!(c.to_sim_config().unwrap().tau_max, 0.5);
    }

    #[test]
    fn zero_dt_names_the_key() {
        let err = ConfigFile::parse("[sim]\ndt = 0.0")
            .unwrap()
            .to_sim_config()
            .unwrap_err();
        assert!(err.to_string().contains("sim.dt"), "{err}");
        assert!(err.to_string().contains("dt must be > 0"), "{err}");
    }

    #[test]
    fn unknown_and_mistyped_keys_are_named() {
        let err = ConfigFile::parse("[gains]\nk_z = 1.0").unwrap_err();
        assert!(err.to_string().contains("k_z"), "{err}");
        let err = ConfigFile::parse("[sim]\nduration = \"long\"").unwrap_err();
        assert!(err.to_string().contains("duration"), "{err}");
    }

    #[test]
    fn grid_overrides() {
        let c = ConfigFile::parse(
            "[grid]\ny0 = [0.0]\ns0 = [0.0]\nphi0 = [0.0]\nmu = [0.5]\ntau_max = [0.3]",
        )
        .unwrap();
        let g = c.grid();
        assert_eq!(g.len(), 1);
        assert_eq!(g.tau, vec![TauSpec::Absolute(0.3)]);
        let c = ConfigFile::parse("[grid]\nmu = [0.0]").unwrap();
        assert_eq!(c.grid().len(), 81);
    }
}
