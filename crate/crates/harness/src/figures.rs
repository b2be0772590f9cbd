//! Plot-ready data for the figure families.
//!
//! `emit_figure_data` writes, into one directory:
//!
//! * `<panel>_<spectrum>.csv` for every panel `a`–`f` and spectrum
//!   (`sub_ohmic`, `ohmic`, `super_ohmic`), with the columns of
//!   [`crate::run::COLUMNS`];
//! * a `.json` manifest next to each CSV;
//! * `layout.json`, listing each panel's parameters and its three series.
//!
//! A panel is drawn as `discord` against `omega_a_t` for its three series.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::presets::{spectrum_name, Family, SPECTRA};
use crate::run::{run_to, write_atomic, RunOutput, COLUMNS};

pub const LAYOUT_FILE: &str = "layout.json";

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SeriesLayout {
    pub spectrum: String,
    pub s: f64,
    pub file: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PanelLayout {
    pub panel: String,
    pub reservoir_kind: String,
    pub omega_c: f64,
    pub regime: String,
    #[serde(rename = "kT", skip_serializing_if = "Option::is_none")]
    pub kt: Option<f64>,
    pub initial_state: String,
    pub series: Vec<SeriesLayout>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FigureLayout {
    pub family: String,
    pub x: String,
    pub y: String,
    pub columns: Vec<String>,
    pub t_end: f64,
    pub n_steps: usize,
    pub output_stride: usize,
    pub panels: Vec<PanelLayout>,
}

/// Runs every series of `family` and writes the CSVs, manifests and layout.
///
/// `long` selects the inset grid instead of the short-time grid.
pub fn emit_figure_data(family: Family, out: &Path, long: bool) -> Result<(FigureLayout, Vec<RunOutput>)> {
    let panels = family.panels();
    let jobs: Vec<_> = panels
        .iter()
        .flat_map(|p| p.configs(long))
        .map(|(id, mut config)| {
            config.output_dir = out.to_path_buf();
            (id, config)
        })
        .collect();

    let outputs = jobs
        .par_iter()
        .map(|(id, config)| run_to(config, out, id))
        .collect::<Result<Vec<_>>>()?;

    let sample = &jobs[0].1;
    let layout = FigureLayout {
        family: family.name().to_string(),
        x: COLUMNS[0].to_string(),
        y: COLUMNS[1].to_string(),
        columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
        t_end: sample.t_end,
        n_steps: sample.n_steps,
        output_stride: sample.output_stride,
        panels: panels
            .iter()
            .map(|p| {
                let cfg = p.config(1.0, long);
                PanelLayout {
                    panel: p.id(),
                    reservoir_kind: p.kind.name().to_string(),
                    omega_c: p.omega_c,
                    regime: cfg.get("regime").expect("known key"),
                    kt: (cfg.regime == crate::config::RegimeKind::High).then_some(cfg.kt),
                    initial_state: p.initial.name().to_string(),
                    series: SPECTRA
                        .iter()
                        .map(|&s| SeriesLayout {
                            spectrum: spectrum_name(s),
                            s,
                            file: format!("{}.csv", p.series_id(s)),
                        })
                        .collect(),
                }
            })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&layout).expect("layout serializes");
    json.push('\n');
    write_atomic(&out.join(LAYOUT_FILE), json.as_bytes())?;
    Ok((layout, outputs))
}
