//! CSV and JSON writers. Numbers are printed with 9 significant digits,
//! `.` as the decimal separator and LF line endings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use quasipush::sweep::RunSummary;
use quasipush::{Combo, TerminalStatus, Trajectory};
use serde::Serialize;

pub const TRAJECTORY_HEADER: &str = "t,x,y,phi,s,fx,fy,theta_f,theta_p,alpha,mode";
pub const SUMMARY_HEADER: &str = "y0,s0,phi0,mu_c,tau_max,final_y_c,max_abs_y,status,slip_fraction";

/// Formats `x` with 9 significant digits, trimming trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn status_text(status: &TerminalStatus) -> String {
    match status {
        TerminalStatus::Completed => "completed".into(),
        TerminalStatus::ContactLost { t } => format!("contact_lost@{}", fmt_num(*t)),
        TerminalStatus::CornerReached { t, .. } => format!("corner_reached@{}", fmt_num(*t)),
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.records.len() * 120);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in &traj.records {
        let nums = [
            r.t, r.x, r.y, r.phi, r.s, r.fx, r.fy, r.theta_f, r.theta_p, r.alpha,
        ];
        for v in nums {
            out.push_str(&fmt_num(v));
            out.push(',');
        }
        out.push_str(r.mode.as_str());
        out.push('\n');
    }
    out
}

/// One row of `summary.csv`; `None` marks a combination whose config was
/// rejected.
pub fn summary_row(combo: &Combo, summary: Option<&RunSummary>) -> String {
    let mut row = String::new();
    for v in [combo.y0, combo.s0, combo.phi0, combo.mu_c, combo.tau_max] {
        write!(row, "{},", fmt_num(v)).unwrap();
    }
    match summary {
        Some(s) => write!(
            row,
            "{},{},{},{}",
            fmt_num(s.final_lateral),
            fmt_num(s.max_abs_y),
            status_text(&s.status),
            fmt_num(s.slip_fraction)
        )
        .unwrap(),
        None => row.push_str(",,config_error,"),
    }
    row
}

/// Record of one CLI invocation, written after all other outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub wall_time_s: f64,
    pub outputs: Vec<PathBuf>,
    pub statuses: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            wall_time_s: 0.0,
            outputs: Vec::new(),
            statuses: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        write_file(&path, &(text + "\n"))?;
        Ok(path)
    }
}

pub fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
