//! Command implementations behind the `quasipush` binary.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use quasipush::oracle::{self, CheckReport};
use quasipush::sweep::{sweep_combos, RunSummary};
use quasipush::{run, ContactFrame, LimitSurface, MotionResult, SimConfig, SliderShape, Vec2};
use rand::SeedableRng;
use serde::Serialize;

use crate::config::{ConfigFile, InvalidConfig};
use crate::output::{
    fmt_num, status_text, summary_row, trajectory_csv, write_file, RunManifest, SUMMARY_HEADER,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Config = 1,
    ContactLost = 2,
    SweepFailures = 3,
    CheckFailed = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Maps an error to its exit code and message.
pub fn report_error(err: &anyhow::Error) -> Exit {
    eprintln!("error: {err:#}");
    Exit::Config
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SliderKind {
    /// 1 m square.
    Square,
    /// 0.5 m radius circle.
    Circle,
    /// The slider described in the config file.
    Config,
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    status: String,
    t: f64,
    x: f64,
    y: f64,
    phi: f64,
    s: f64,
    final_y_c: f64,
    records: usize,
    slip_fraction: f64,
    stick_fraction: f64,
    corner_events: usize,
    max_load_residual: f64,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Runs one closed-loop simulation and writes `trajectory.csv`,
/// `summary.json` and `manifest.json` into `out`.
pub fn simulate(config: Option<&Path>, out: &Path, seed: Option<u64>) -> anyhow::Result<Exit> {
    let started = Instant::now();
    let file = load_config(config)?;
    let mut cfg = file.to_sim_config()?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let traj = run(&cfg)?;
    ensure_dir(out)?;

    let csv_path = out.join("trajectory.csv");
    write_file(&csv_path, &trajectory_csv(&traj))?;

    let summary = RunSummary::from_trajectory(&cfg, &traj);
    let last = traj.last();
    let json = SimulateSummary {
        status: status_text(&traj.status),
        t: last.t,
        x: last.x,
        y: last.y,
        phi: last.phi,
        s: last.s,
        final_y_c: summary.final_lateral,
        records: summary.records,
        slip_fraction: summary.slip_fraction,
        stick_fraction: summary.stick_fraction,
        corner_events: traj.corner_events,
        max_load_residual: summary.max_load_residual,
    };
    let summary_path = out.join("summary.json");
    write_file(
        &summary_path,
        &(serde_json::to_string_pretty(&json)? + "\n"),
    )?;

    let mut manifest = RunManifest::new("simulate", serde_json::to_value(&cfg)?);
    manifest.outputs = vec![csv_path, summary_path];
    manifest.statuses = vec![status_text(&traj.status)];
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(out)?;

    println!(
        "{}: {} records, final y_c = {}",
        json.status,
        json.records,
        fmt_num(json.final_y_c)
    );
    Ok(if traj.status.is_contact_lost() {
        Exit::ContactLost
    } else {
        Exit::Ok
    })
}

pub struct SweepArgs<'a> {
    pub slider: SliderKind,
    pub config: Option<&'a Path>,
    pub grid: Option<&'a Path>,
    pub out: &'a Path,
    pub jobs: Option<usize>,
    pub trajectories: bool,
}

fn sweep_shape(kind: SliderKind, file: &ConfigFile) -> Result<SliderShape, InvalidConfig> {
    let shape = match kind {
        SliderKind::Square => SliderShape::square(1.0),
        SliderKind::Circle => SliderShape::circle(0.5),
        SliderKind::Config => return file.slider.build(),
    };
    Ok(shape.expect("built-in sliders are valid"))
}

/// Runs every grid combination and writes `summary.csv`, optional
/// per-combination trajectories and `manifest.json` into `out`.
pub fn sweep(args: &SweepArgs) -> anyhow::Result<Exit> {
    let started = Instant::now();
    let file = load_config(args.config)?;
    let base = sweep_base(args.slider, &file)?;
    let grid = match args.grid {
        Some(p) => ConfigFile::load(p)?.grid(),
        None => file.grid(),
    };
    let combos = grid.combos(&base);

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = args.jobs {
            b = b.num_threads(n.max(1));
        }
        b.build().context("starting worker pool")?
    };

    ensure_dir(args.out)?;
    let traj_dir = args.out.join("trajectories");
    if args.trajectories {
        ensure_dir(&traj_dir)?;
    }

    // Trajectories are large, so runs go in batches and a single writer
    // drains each batch before the next starts.
    let batch = if args.trajectories {
        2 * pool.current_num_threads()
    } else {
        combos.len().max(1)
    };
    let mut rows = Vec::with_capacity(combos.len());
    let mut outputs = Vec::new();
    for chunk in combos.chunks(batch) {
        let results = pool.install(|| {
            sweep_combos(chunk, &base, |_, cfg, traj| {
                let csv = args.trajectories.then(|| trajectory_csv(traj));
                (RunSummary::from_trajectory(cfg, traj), csv)
            })
        });
        for (combo, result) in results {
            match result {
                Ok((summary, csv)) => {
                    if let Some(csv) = csv {
                        let path = traj_dir.join(format!("combo_{:04}.csv", combo.index));
                        write_file(&path, &csv)?;
                        outputs.push(path);
                    }
                    rows.push((combo, Some(summary)));
                }
                Err(e) => {
                    log::warn!("combo {}: {e}", combo.index);
                    rows.push((combo, None));
                }
            }
        }
    }

    let mut csv = String::from(SUMMARY_HEADER);
    csv.push('\n');
    for (combo, summary) in &rows {
        csv.push_str(&summary_row(combo, summary.as_ref()));
        csv.push('\n');
    }
    let summary_path = args.out.join("summary.csv");
    write_file(&summary_path, &csv)?;
    outputs.insert(0, summary_path);

    let statuses: Vec<String> = rows
        .iter()
        .map(|(_, s)| {
            s.as_ref()
                .map_or("config_error".to_string(), |s| status_text(&s.status))
        })
        .collect();
    let completed = rows
        .iter()
        .filter(|(_, s)| s.as_ref().is_some_and(|s| s.status.is_completed()))
        .count();

    let mut manifest = RunManifest::new("sweep", serde_json::json!({ "base": base, "grid": grid }));
    manifest.outputs = outputs;
    manifest.statuses = statuses;
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(args.out)?;

    println!("{completed}/{} combinations completed", rows.len());
    Ok(if completed == rows.len() {
        Exit::Ok
    } else {
        Exit::SweepFailures
    })
}

/// Base configuration of a sweep: the config file's settings with the
/// selected slider, its torsional load re-resolved for that slider.
pub fn sweep_base(kind: SliderKind, file: &ConfigFile) -> Result<SimConfig, InvalidConfig> {
    let shape = sweep_shape(kind, file)?;
    file.to_sim_config_with(shape)
}

/// Compares `solver` against the brute-force oracle on `count` random
/// instances seeded by `seed`.
pub fn check_with<S>(seed: u64, count: usize, solver: S) -> anyhow::Result<(Exit, CheckReport)>
where
    S: Fn(&LimitSurface, &ContactFrame, Vec2) -> MotionResult,
{
    if count == 0 {
        anyhow::bail!(InvalidConfig("count must be >= 1".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let report = oracle::check_solver(&mut rng, count, oracle::DEFAULT_GRID, solver);
    println!(
        "checked {} instances: max alpha deviation {:e}, max twist deviation {:e}, tolerance {:e}",
        report.count,
        report.max_alpha_deviation,
        report.max_twist_deviation,
        oracle::CHECK_TOLERANCE
    );
    if report.passed() {
        return Ok((Exit::Ok, report));
    }
    println!(
        "{} mismatches; first failing instance:",
        report.mismatches.len()
    );
    println!("{}", serde_json::to_string_pretty(&report.mismatches[0])?);
    Ok((Exit::CheckFailed, report))
}

pub fn check(seed: u64, count: usize) -> anyhow::Result<Exit> {
    check_with(seed, count, quasipush::solve_motion).map(|(e, _)| e)
}

/// Default output directory for a command.
pub fn default_out(command: &str) -> PathBuf {
    PathBuf::from(format!("out/{command}"))
}
