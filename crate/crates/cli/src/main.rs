use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quasipush_cli::{default_out, report_error, Exit, SliderKind, SweepArgs};

#[derive(Parser)]
#[command(
    name = "quasipush",
    version,
    about = "Quasistatic planar pushing simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop push and write its trajectory.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the force-noise generator.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the robustness grid for one slider.
    Sweep {
        #[arg(value_enum)]
        slider: SliderKind,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Config file whose [grid] table replaces the standard grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write one trajectory CSV per combination.
        #[arg(long)]
        trajectories: bool,
    },
    /// Compare the contact solver against the brute-force oracle.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, out, seed } => {
            let out = out.clone().unwrap_or_else(|| default_out("simulate"));
            quasipush_cli::simulate(config.as_deref(), &out, *seed)
        }
        Command::Sweep {
            slider,
            config,
            grid,
            out,
            jobs,
            trajectories,
        } => {
            let out = out.clone().unwrap_or_else(|| default_out("sweep"));
            quasipush_cli::sweep(&SweepArgs {
                slider: *slider,
                config: config.as_deref(),
                grid: grid.as_deref(),
                out: &out,
                jobs: *jobs,
                trajectories: *trajectories,
            })
        }
        Command::Check { seed, count } => quasipush_cli::check(*seed, *count),
    };
    let exit = result.unwrap_or_else(|e| report_error(&e));
    if exit == Exit::Ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(exit.code() as u8)
    }
}
