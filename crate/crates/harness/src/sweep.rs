//! Cartesian parameter sweeps over a base configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{RunConfig, KEYS};
use crate::error::{HarnessError, Result};
use crate::run::{compute, format_number, persist, write_atomic, DEFAULT_STEM};

pub const DEFAULT_MAX_RUNS: usize = 256;
pub const SUMMARY_FILE: &str = "summary.csv";

/// One sweep axis, written `key=v1,v2,...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

impl FromStr for Axis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let (key, values) = s
            .split_once('=')
            .ok_or_else(|| HarnessError::validation(format!("axis `{s}` is not of the form key=v1,v2,...")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(HarnessError::validation(format!("axis: unknown key `{key}`")));
        }
        if key == "output_dir" {
            return Err(HarnessError::validation("axis: output_dir cannot be swept"));
        }
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(HarnessError::validation(format!("axis `{key}` has an empty value")));
        }
        Ok(Self {
            key: key.to_string(),
            values,
        })
    }
}

/// One grid point: the axis assignments and the resulting configuration.
#[derive(Debug, Clone)]
pub struct Point {
    pub index: usize,
    pub assignments: Vec<(String, String)>,
    pub config: Result<RunConfig, String>,
}

/// Expands the cartesian product of `axes` over `base`, in row-major order
/// (the last axis varies fastest). No axes gives the base alone.
pub fn expand(base: &RunConfig, axes: &[Axis], max_runs: usize) -> Result<Vec<Point>> {
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.key == a.key) {
            return Err(HarnessError::validation(format!("axis `{}` given twice", a.key)));
        }
    }
    let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()));
    match total {
        Some(n) if n <= max_runs => {}
        _ => {
            return Err(HarnessError::validation(format!(
                "sweep has more than {max_runs} runs; raise the cap or shrink the axes"
            )))
        }
    }
    let total = total.unwrap_or(0);

    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut assignments = vec![(String::new(), String::new()); axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            let n = axis.values.len();
            assignments[k] = (axis.key.clone(), axis.values[rem % n].clone());
            rem /= n;
        }
        let mut config = base.clone();
        config.output_dir = base.output_dir.join(point_dir(index));
        let config = assignments
            .iter()
            .try_for_each(|(k, v)| config.set(k, v))
            .and_then(|_| config.validate())
            .map(|_| config)
            .map_err(|e| e.to_string());
        points.push(Point {
            index,
            assignments,
            config,
        });
    }
    Ok(points)
}

pub fn point_dir(index: usize) -> String {
    format!("point_{index:04}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub index: usize,
    pub assignments: Vec<(String, String)>,
    pub outcome: Result<PointResult, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub terminal_discord: f64,
    pub time_to_half: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SummaryRow>,
    pub summary_path: PathBuf,
    /// Exit code of the first failed point, if any.
    pub first_failure_code: Option<i32>,
}

impl SweepReport {
    pub fn failures(&self) -> impl Iterator<Item = (&SummaryRow, &str)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().err().map(|e| (r, e.as_str())))
    }
}

fn run_point(point: &Point) -> std::result::Result<PointResult, (i32, String)> {
    let config = point.config.as_ref().map_err(|e| (1, e.clone()))?;
    let start = Instant::now();
    let mut output = compute(config).map_err(|e| (e.exit_code(), e.to_string()))?;
    persist(
        &mut output,
        &config.output_dir,
        DEFAULT_STEM,
        start.elapsed().as_secs_f64(),
    )
    .map_err(|e| (e.exit_code(), e.to_string()))?;
    Ok(PointResult {
        terminal_discord: output.terminal_discord(),
        time_to_half: output.time_to_half(),
    })
}

fn render_summary(axes: &[Axis], rows: &[SummaryRow]) -> String {
    let mut out = String::from("point");
    for a in axes {
        let _ = write!(out, ",{}", a.key);
    }
    out.push_str(",status,terminal_discord,time_to_half,output\n");
    for r in rows {
        let _ = write!(out, "{}", r.index);
        for (_, v) in &r.assignments {
            let _ = write!(out, ",{v}");
        }
        match &r.outcome {
            Ok(p) => {
                let _ = write!(
                    out,
                    ",ok,{},{}",
                    format_number(p.terminal_discord),
                    format_number(p.time_to_half)
                );
            }
            Err(e) => {
                let msg: String = e.chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
                let _ = write!(out, ",failed: {msg},nan,nan");
            }
        }
        let _ = writeln!(out, ",{}", point_dir(r.index));
    }
    out
}

/// Runs every grid point on the current rayon pool and writes the summary.
///
/// Failed points are reported in the summary and do not abort the others.
pub fn run_sweep(base: &RunConfig, axes: &[Axis], max_runs: usize) -> Result<SweepReport> {
    let points = expand(base, axes, max_runs)?;
    std::fs::create_dir_all(&base.output_dir).map_err(|e| HarnessError::io(&base.output_dir, e))?;

    let outcomes: Vec<_> = points.par_iter().map(run_point).collect();
    let mut first_failure_code = None;
    let rows: Vec<SummaryRow> = points
        .into_iter()
        .zip(outcomes)
        .map(|(p, o)| {
            let outcome = o.map_err(|(code, msg)| {
                log::error!("sweep point {}: {msg}", p.index);
                first_failure_code.get_or_insert(code);
                msg
            });
            SummaryRow {
                index: p.index,
                assignments: p.assignments,
                outcome,
            }
        })
        .collect();

    let summary_path = base.output_dir.join(SUMMARY_FILE);
    write_atomic(&summary_path, render_summary(axes, &rows).as_bytes())?;
    Ok(SweepReport {
        rows,
        summary_path,
        first_failure_code,
    })
}
