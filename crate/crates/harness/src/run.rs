//! Single runs: propagate, score discord, persist CSV and manifest.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use discord_dyn::discord::quantum_discord_with;
use discord_dyn::propagator::{solve_independent_analytic, Propagator, Trajectory};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Solver};
use crate::error::{HarnessError, Result};

pub const COLUMNS: [&str; 5] = ["omega_a_t", "discord", "trace_error", "min_eigenvalue", "purity"];
pub const DEFAULT_STEM: &str = "trajectory";

/// One written row of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub discord: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
}

impl Row {
    fn cells(&self) -> [f64; 5] {
        [self.t, self.discord, self.trace_error, self.min_eigenvalue, self.purity]
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    /// Every propagated step, not only the written rows.
    pub trajectory: Trajectory,
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
    pub csv_path: Option<PathBuf>,
    pub manifest_path: Option<PathBuf>,
}

impl RunOutput {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn discord(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.discord).collect()
    }

    pub fn terminal_discord(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.discord)
    }

    pub fn time_to_half(&self) -> f64 {
        time_to_half(&self.times(), &self.discord())
    }
}

/// First time the series falls to half its initial value, by linear
/// interpolation between rows. `inf` if it never does, NaN if it starts at 0.
pub fn time_to_half(times: &[f64], values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return f64::NAN;
    };
    if !(first > 0.0) {
        return f64::NAN;
    }
    let half = 0.5 * first;
    for i in 1..values.len() {
        if values[i] <= half {
            let frac = (values[i - 1] - half) / (values[i - 1] - values[i]);
            return times[i - 1] + frac * (times[i] - times[i - 1]);
        }
    }
    f64::INFINITY
}

/// Indices written with the given stride; the last index is always included.
pub fn output_indices(len: usize, stride: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).step_by(stride.max(1)).collect();
    if len > 0 && idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

/// Propagates and scores a configuration without touching the filesystem.
pub fn compute(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let rho0 = config.initial_state.density_matrix()?;
    let params = config.spectral_params()?;
    let regime = config.temperature_regime()?;

    let trajectory = match config.solver {
        Solver::Numerical => Propagator::new(config.reservoir_kind, params, regime)
            .with_method(config.coefficient_method)
            .run(&rho0, config.t_end, config.n_steps)?,
        Solver::Analytic => {
            let grid: Vec<f64> = (0..=config.n_steps)
                .map(|i| config.t_end * i as f64 / config.n_steps as f64)
                .collect();
            solve_independent_analytic(
                &rho0,
                &params,
                regime,
                &grid,
                config.prefactor_switch,
                config.j0_formula,
            )?
            .trajectory
        }
    };

    let options = config.discord_options();
    let indices = output_indices(trajectory.len(), config.output_stride);
    let rows = indices
        .par_iter()
        .map(|&i| {
            let d = &trajectory.diagnostics[i];
            let discord = quantum_discord_with(&trajectory.states[i], &options)?.discord;
            Ok(Row {
                t: trajectory.times[i],
                discord,
                trace_error: d.trace_error,
                min_eigenvalue: d.min_eigenvalue,
                purity: d.purity,
            })
        })
        .collect::<std::result::Result<Vec<_>, discord_dyn::Error>>()?;

    for w in &trajectory.warnings {
        log::warn!("{w}");
    }
    Ok(RunOutput {
        config: config.clone(),
        warnings: trajectory.warnings.clone(),
        trajectory,
        rows,
        csv_path: None,
        manifest_path: None,
    })
}

/// Decimal with 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.cells().iter().map(|&x| format_number(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// SHA-256 of each column: its formatted cells, each followed by `\n`.
pub fn column_checksums(rows: &[Row]) -> Vec<(String, String)> {
    COLUMNS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let mut h = Sha256::new();
            for r in rows {
                h.update(format_number(r.cells()[k]).as_bytes());
                h.update(b"\n");
            }
            (name.to_string(), hex::encode(h.finalize()))
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    data_file: &'a str,
    rows: usize,
    version: &'a str,
    duration_seconds: f64,
    config: serde_json::Map<String, serde_json::Value>,
    checksums: serde_json::Map<String, serde_json::Value>,
    warnings: &'a [String],
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| HarnessError::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| HarnessError::io(&tmp, e))?;
    f.sync_all().map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

/// Persists a computed run as `<dir>/<stem>.csv` and `<dir>/<stem>.json`.
///
/// The manifest is written only after the CSV is in place.
pub fn persist(output: &mut RunOutput, dir: &Path, stem: &str, duration_seconds: f64) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let manifest_path = dir.join(format!("{stem}.json"));
    write_atomic(&csv_path, render_csv(&output.rows).as_bytes())?;

    let data_file = format!("{stem}.csv");
    let manifest = Manifest {
        data_file: &data_file,
        rows: output.rows.len(),
        version: env!("CARGO_PKG_VERSION"),
        duration_seconds,
        config: output
            .config
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
            .collect(),
        checksums: column_checksums(&output.rows)
            .into_iter()
            .map(|(k, v)| (k, serde_json::Value::String(v)))
            .collect(),
        warnings: &output.warnings,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_atomic(&manifest_path, json.as_bytes())?;
    output.csv_path = Some(csv_path);
    output.manifest_path = Some(manifest_path);
    Ok(())
}

/// Runs one configuration and writes it under `dir` with the given stem.
pub fn run_to(config: &RunConfig, dir: &Path, stem: &str) -> Result<RunOutput> {
    let start = Instant::now();
    let mut output = compute(config)?;
    persist(&mut output, dir, stem, start.elapsed().as_secs_f64())?;
    Ok(output)
}

/// Runs one configuration into its `output_dir` as `trajectory.csv` + `trajectory.json`.
pub fn run_scenario(config: &RunConfig) -> Result<RunOutput> {
    run_to(config, &config.output_dir, DEFAULT_STEM)
}
