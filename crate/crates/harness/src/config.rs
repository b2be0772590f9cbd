//! Flat `key = value` run configuration.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Unknown
//! keys and repeated keys are rejected. [`RunConfig::emit`] writes every key,
//! and parsing the emitted text gives back the same configuration.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use discord_dyn::coeffs::{CoefficientMethod, J0Formula};
use discord_dyn::discord::{DiscordOptions, DEFAULT_REFINE_ITERATIONS, MIN_GRID};
use discord_dyn::liouville::{Operator, Qubit, ReservoirKind};
use discord_dyn::propagator::{PrefactorMode, MIN_STEPS};
use discord_dyn::spectral::{SpectralParams, TemperatureRegime};
use discord_dyn::state::{DensityMatrix, Preset};
use num_complex::Complex64;

use crate::error::{HarnessError, Result};

/// Every recognized key, in the order [`RunConfig::emit`] writes them.
pub const KEYS: [&str; 17] = [
    "reservoir_kind",
    "s",
    "omega_c",
    "regime",
    "kT",
    "alpha_sq",
    "initial_state",
    "t_end",
    "n_steps",
    "discord_grid",
    "measured_qubit",
    "solver",
    "prefactor_switch",
    "j0_formula",
    "coefficient_method",
    "output_stride",
    "output_dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeKind {
    Zero,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// RK4 on the full master equation.
    #[default]
    Numerical,
    /// Factorized solution; independent reservoirs only.
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Preset(Preset),
    /// Explicit entries, row-major.
    Matrix(Box<Operator>),
}

impl InitialState {
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        match self {
            Self::Preset(p) => Ok(p.state()),
            Self::Matrix(m) => {
                DensityMatrix::new(**m).map_err(|e| HarnessError::validation(format!("initial_state: {e}")))
            }
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Preset(p) => f.write_str(p.name()),
            Self::Matrix(m) => {
                f.write_str("matrix:")?;
                for i in 0..4 {
                    for j in 0..4 {
                        write!(f, " {} {}", m[(i, j)].re, m[(i, j)].im)?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let Some(rest) = s.strip_prefix("matrix:") else {
            return s.parse::<Preset>().map(Self::Preset);
        };
        let nums = rest
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(parse_finite)
            .collect::<std::result::Result<Vec<f64>, _>>()?;
        if nums.len() != 32 {
            return Err(format!(
                "matrix needs 32 numbers (re im per entry, row-major), got {}",
                nums.len()
            ));
        }
        let m = Operator::from_fn(|i, j| {
            let k = 2 * (4 * i + j);
            Complex64::new(nums[k], nums[k + 1])
        });
        Ok(Self::Matrix(Box::new(m)))
    }
}

fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub reservoir_kind: ReservoirKind,
    pub s: f64,
    pub omega_c: f64,
    pub regime: RegimeKind,
    /// Used only when `regime` is [`RegimeKind::High`].
    pub kt: f64,
    pub alpha_sq: f64,
    pub initial_state: InitialState,
    pub t_end: f64,
    pub n_steps: usize,
    pub discord_grid: usize,
    pub measured_qubit: Qubit,
    pub solver: Solver,
    pub prefactor_switch: PrefactorMode,
    pub j0_formula: J0Formula,
    pub coefficient_method: CoefficientMethod,
    /// Write every n-th step (the final step is always written).
    pub output_stride: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            reservoir_kind: ReservoirKind::Common,
            s: 1.0,
            omega_c: 1.0,
            regime: RegimeKind::High,
            kt: 100.0,
            alpha_sq: 0.01,
            initial_state: InitialState::Preset(Preset::BellPsiPlus),
            t_end: 50.0,
            n_steps: 4000,
            discord_grid: 64,
            measured_qubit: Qubit::Second,
            solver: Solver::Numerical,
            prefactor_switch: PrefactorMode::GammaOnly,
            j0_formula: J0Formula::Literal,
            coefficient_method: CoefficientMethod::CorrelationFunction,
            output_stride: 1,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn invalid(key: &str, msg: impl fmt::Display) -> HarnessError {
    HarnessError::validation(format!("{key}: {msg}"))
}

fn pick<T: Copy>(key: &str, value: &str, table: &[(&str, T)]) -> Result<T> {
    let v = value.trim();
    table
        .iter()
        .find(|(name, _)| *name == v)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
            invalid(key, format!("`{v}` is not one of {}", names.join("|")))
        })
}

const REGIMES: [(&str, RegimeKind); 2] = [("zero", RegimeKind::Zero), ("high", RegimeKind::High)];
const SOLVERS: [(&str, Solver); 2] = [("numerical", Solver::Numerical), ("analytic", Solver::Analytic)];
const J0_FORMULAS: [(&str, J0Formula); 2] = [("literal", J0Formula::Literal), ("naive", J0Formula::Naive)];
const METHODS: [(&str, CoefficientMethod); 2] = [
    ("correlation", CoefficientMethod::CorrelationFunction),
    ("quadrature", CoefficientMethod::SpectralQuadrature),
];
const QUBITS: [(&str, Qubit); 2] = [("1", Qubit::First), ("2", Qubit::Second)];

fn name_of<T: PartialEq>(table: &[(&'static str, T)], value: &T) -> &'static str {
    table
        .iter()
        .find(|(_, t)| t == value)
        .map(|(n, _)| *n)
        .expect("every variant is listed")
}

impl RunConfig {
    /// Sets one key from its text form. Does not run cross-field validation.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| parse_finite(v).map_err(|e| invalid(key, e));
        let count = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| invalid(key, format!("`{v}` is not a count")))
        };
        match key {
            "reservoir_kind" => self.reservoir_kind = value.parse().map_err(|e| invalid(key, e))?,
            "s" => self.s = num(value)?,
            "omega_c" => self.omega_c = num(value)?,
            "regime" => self.regime = pick(key, value, &REGIMES)?,
            "kT" => self.kt = num(value)?,
            "alpha_sq" => self.alpha_sq = num(value)?,
            "initial_state" => self.initial_state = value.parse().map_err(|e| invalid(key, e))?,
            "t_end" => self.t_end = num(value)?,
            "n_steps" => self.n_steps = count(value)?,
            "discord_grid" => self.discord_grid = count(value)?,
            "measured_qubit" => self.measured_qubit = pick(key, value, &QUBITS)?,
            "solver" => self.solver = pick(key, value, &SOLVERS)?,
            "prefactor_switch" => self.prefactor_switch = value.parse().map_err(|e| invalid(key, e))?,
            "j0_formula" => self.j0_formula = pick(key, value, &J0_FORMULAS)?,
            "coefficient_method" => self.coefficient_method = pick(key, value, &METHODS)?,
            "output_stride" => self.output_stride = count(value)?,
            "output_dir" => {
                let v = value.trim();
                if v.is_empty() {
                    return Err(invalid(key, "empty path"));
                }
                self.output_dir = PathBuf::from(v);
            }
            other => return Err(HarnessError::validation(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Text form of one key.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "reservoir_kind" => self.reservoir_kind.name().to_string(),
            "s" => self.s.to_string(),
            "omega_c" => self.omega_c.to_string(),
            "regime" => name_of(&REGIMES, &self.regime).to_string(),
            "kT" => self.kt.to_string(),
            "alpha_sq" => self.alpha_sq.to_string(),
            "initial_state" => self.initial_state.to_string(),
            "t_end" => self.t_end.to_string(),
            "n_steps" => self.n_steps.to_string(),
            "discord_grid" => self.discord_grid.to_string(),
            "measured_qubit" => name_of(&QUBITS, &self.measured_qubit).to_string(),
            "solver" => name_of(&SOLVERS, &self.solver).to_string(),
            "prefactor_switch" => self.prefactor_switch.name().to_string(),
            "j0_formula" => name_of(&J0_FORMULAS, &self.j0_formula).to_string(),
            "coefficient_method" => name_of(&METHODS, &self.coefficient_method).to_string(),
            "output_stride" => self.output_stride.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            _ => return None,
        })
    }

    /// Parses a configuration file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::validation(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(HarnessError::validation(format!(
                    "line {}: duplicate key `{key}`",
                    n + 1
                )));
            }
            config
                .set(key, value)
                .map_err(|e| HarnessError::validation(format!("line {}: {}", n + 1, strip_prefix(&e))))?;
            seen.push(key);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).expect("known key"));
        }
        out
    }

    /// Ordered `(key, value)` pairs, as written by [`RunConfig::emit`].
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        KEYS.iter().map(|&k| (k, self.get(k).expect("known key"))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("s", self.s),
            ("omega_c", self.omega_c),
            ("kT", self.kt),
            ("alpha_sq", self.alpha_sq),
            ("t_end", self.t_end),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(key, format!("must be positive, got {v}")));
            }
        }
        if self.n_steps < MIN_STEPS {
            return Err(invalid("n_steps", format!("must be at least {MIN_STEPS}")));
        }
        if self.discord_grid < MIN_GRID {
            return Err(invalid("discord_grid", format!("must be at least {MIN_GRID}")));
        }
        if self.output_stride == 0 {
            return Err(invalid("output_stride", "must be at least 1"));
        }
        if self.solver == Solver::Analytic && self.reservoir_kind != ReservoirKind::Independent {
            return Err(invalid(
                "solver",
                "the analytic solver only covers independent reservoirs",
            ));
        }
        self.initial_state.density_matrix()?;
        Ok(())
    }

    pub fn spectral_params(&self) -> Result<SpectralParams> {
        SpectralParams::new(self.alpha_sq, self.omega_c, self.s).map_err(|e| HarnessError::validation(e.to_string()))
    }

    pub fn temperature_regime(&self) -> Result<TemperatureRegime> {
        match self.regime {
            RegimeKind::Zero => Ok(TemperatureRegime::ZeroT),
            RegimeKind::High => TemperatureRegime::high(self.kt).map_err(|e| invalid("kT", e)),
        }
    }

    pub fn discord_options(&self) -> DiscordOptions {
        DiscordOptions {
            grid: self.discord_grid,
            refine_iterations: DEFAULT_REFINE_ITERATIONS,
            measured: self.measured_qubit,
        }
    }
}

fn strip_prefix(e: &HarnessError) -> String {
    match e {
        HarnessError::Validation(m) => m.clone(),
        other => other.to_string(),
    }
}
