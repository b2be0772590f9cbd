//! Scenario presets for the three figure families.
//!
//! Each family has six panels `a`–`f`; each panel is run for the three
//! spectra `s ∈ {½, 1, 3}`.
//!
//! | family | panels a–c | panels d–f | temperature | initial state |
//! |--------|------------|------------|-------------|---------------|
//! | fig1   | independent, ω_c = 10, 1, 0.3 | common, ω_c = 10, 1, 0.3 | kT = 100 | Bell |
//! | fig2   | as fig1 | as fig1 | T = 0 | Bell |
//! | fig3   | common, `|eg⟩`, ω_c = 10, 1, 0.3 | common, `|ee⟩`, ω_c = 10, 1, 0.3 | T = 0 | see panels |

use std::fmt;
use std::str::FromStr;

use discord_dyn::liouville::ReservoirKind;
use discord_dyn::state::Preset;

use crate::config::{InitialState, RegimeKind, RunConfig};
use crate::error::{HarnessError, Result};

pub const SPECTRA: [f64; 3] = [0.5, 1.0, 3.0];
pub const CUTOFFS: [f64; 3] = [10.0, 1.0, 0.3];
pub const HIGH_KT: f64 = 100.0;

/// Short-time grid of the main panels.
pub const SHORT_GRID: (f64, usize) = (50.0, 4000);
/// Long-time grid of the insets.
pub const LONG_GRID: (f64, usize) = (2000.0, 40000);
/// Output stride used for the long grid.
pub const LONG_STRIDE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Fig1,
    Fig2,
    Fig3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Fig1, Family::Fig2, Family::Fig3];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
        }
    }

    pub fn panels(&self) -> Vec<Panel> {
        ('a'..='f')
            .enumerate()
            .map(|(i, letter)| {
                let omega_c = CUTOFFS[i % 3];
                let second_row = i >= 3;
                let (kind, regime, initial) = match self {
                    Self::Fig1 | Self::Fig2 => (
                        if second_row {
                            ReservoirKind::Common
                        } else {
                            ReservoirKind::Independent
                        },
                        if *self == Self::Fig1 {
                            RegimeKind::High
                        } else {
                            RegimeKind::Zero
                        },
                        Preset::BellPsiPlus,
                    ),
                    Self::Fig3 => (
                        ReservoirKind::Common,
                        RegimeKind::Zero,
                        if second_row { Preset::Ee } else { Preset::Eg },
                    ),
                };
                Panel {
                    family: *self,
                    letter,
                    kind,
                    omega_c,
                    regime,
                    initial,
                }
            })
            .collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| format!("unknown figure family `{s}` (expected fig1|fig2|fig3)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub family: Family,
    pub letter: char,
    pub kind: ReservoirKind,
    pub omega_c: f64,
    pub regime: RegimeKind,
    pub initial: Preset,
}

impl Panel {
    /// `fig1a`, `fig3f`, ...
    pub fn id(&self) -> String {
        format!("{}{}", self.family.name(), self.letter)
    }

    /// File stem of one series, e.g. `fig1a_ohmic`.
    pub fn series_id(&self, s: f64) -> String {
        format!("{}_{}", self.id(), spectrum_name(s))
    }

    /// Run configuration for one spectrum of this panel.
    pub fn config(&self, s: f64, long: bool) -> RunConfig {
        let (t_end, n_steps) = if long { LONG_GRID } else { SHORT_GRID };
        RunConfig {
            reservoir_kind: self.kind,
            s,
            omega_c: self.omega_c,
            regime: self.regime,
            kt: HIGH_KT,
            initial_state: InitialState::Preset(self.initial),
            t_end,
            n_steps,
            output_stride: if long { LONG_STRIDE } else { 1 },
            ..RunConfig::default()
        }
    }

    pub fn configs(&self, long: bool) -> Vec<(String, RunConfig)> {
        SPECTRA
            .iter()
            .map(|&s| (self.series_id(s), self.config(s, long)))
            .collect()
    }
}

/// `sub_ohmic`, `ohmic`, `super_ohmic` for the preset exponents, `s<value>` otherwise.
pub fn spectrum_name(s: f64) -> String {
    if s == 1.0 {
        "ohmic".into()
    } else if s == 0.5 {
        "sub_ohmic".into()
    } else if s == 3.0 {
        "super_ohmic".into()
    } else {
        format!("s{s}")
    }
}

/// Looks up a panel such as `fig3a`.
pub fn panel(id: &str) -> Result<Panel> {
    let id = id.trim();
    Family::ALL
        .iter()
        .flat_map(|f| f.panels())
        .find(|p| p.id() == id)
        .ok_or_else(|| HarnessError::validation(format!("unknown preset `{id}` (expected fig1a..fig3f)")))
}

/// All preset runs of all families.
pub fn all_runs(long: bool) -> Vec<(String, RunConfig)> {
    Family::ALL
        .iter()
        .flat_map(|f| f.panels())
        .flat_map(|p| p.configs(long))
        .collect()
}
