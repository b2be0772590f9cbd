//! Time propagation of the two-qubit state.
//!
//! [`propagate_numerical`] integrates `d vec(ρ)/dt = L(t) vec(ρ)` with the
//! classical fourth-order Runge–Kutta scheme, re-evaluating the Liouvillian
//! at every stage time. It is the authoritative path for both reservoir
//! kinds.
//!
//! [`solve_independent_analytic`] reproduces the factorized solution for
//! independent reservoirs,
//!
//! ```text
//! ρ(t) = e^{-Γ} e^{j₀J₀} e^{k₊K₊} e^{k₀K₀} e^{k₋K₋} ρ(0)
//! ```
//!
//! where `k₊, k₀, k₋` obey a Riccati system driven by
//! `ν₀ = -4μ₁`, `ν± = 2(κ₁ ∓ μ₁)`. How much of the scalar prefactor is applied
//! is selected with [`PrefactorMode`].

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::coeffs::{markov_kappa1_plateau, CoefficientMethod, CoefficientSet, CoefficientTable, J0Formula};
use crate::error::{Error, Result};
use crate::liouville::{liouvillian, unvectorize, vectorize, ReservoirKind, SuperMatrix, Vectorized};
use crate::quadrature::QuadratureConfig;
use crate::spectral::{SpectralParams, TemperatureRegime};
use crate::state::{DensityMatrix, NEGATIVITY_TOL};

/// Trace drift beyond which a run is aborted.
pub const MAX_TRACE_ERROR: f64 = 1e-6;
/// `|k₊|` beyond which the factorized solution is considered to have blown up.
pub const RICCATI_LIMIT: f64 = 1e6;
pub const MIN_STEPS: usize = 10;

/// Per-state diagnostics recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub trace_error: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
    /// Filled in by [`crate::discord::annotate`].
    pub discord: Option<f64>,
}

impl StepDiagnostics {
    pub fn of(rho: &DensityMatrix) -> Self {
        Self {
            trace_error: rho.trace_error(),
            hermiticity_defect: rho.hermiticity_defect(),
            min_eigenvalue: rho.min_eigenvalue(),
            purity: rho.purity(),
            discord: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Vec<StepDiagnostics>,
    /// Non-fatal issues, e.g. transient negative eigenvalues.
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Discord column, if [`crate::discord::annotate`] has been run.
    pub fn discord(&self) -> Option<Vec<f64>> {
        self.diagnostics.iter().map(|d| d.discord).collect()
    }

    pub fn last_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectories always hold the initial state")
    }
}

fn uniform_grid(t_end: f64, n_steps: usize) -> Vec<f64> {
    (0..=n_steps).map(|i| t_end * i as f64 / n_steps as f64).collect()
}

fn check_run(rho0: &DensityMatrix, t_end: f64, n_steps: usize) -> Result<()> {
    DensityMatrix::new(*rho0.matrix())?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Grid(format!("t_end must be finite and > 0, got {t_end}")));
    }
    if n_steps < MIN_STEPS {
        return Err(Error::Grid(format!(
            "n_steps must be at least {MIN_STEPS}, got {n_steps}"
        )));
    }
    Ok(())
}

/// One classical RK4 step for `dv/dt = L(t) v` given the generator at the
/// start, midpoint and end of the step.
pub fn rk4_step(v: &Vectorized, start: &SuperMatrix, mid: &SuperMatrix, end: &SuperMatrix, h: f64) -> Vectorized {
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5 * h, 0.0);
    let k1 = start * v;
    let k2 = mid * (v + k1 * half);
    let k3 = mid * (v + k2 * half);
    let k4 = end * (v + k3 * hc);
    v + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (hc / 6.0)
}

/// Integrates `dρ/dt = L(t)ρ` on a uniform grid for an arbitrary generator.
///
/// `generator` is called at every RK4 stage time; consecutive steps share
/// their boundary evaluation.
pub fn propagate_with_generator<F>(
    rho0: &DensityMatrix,
    t_end: f64,
    n_steps: usize,
    mut generator: F,
) -> Result<Trajectory>
where
    F: FnMut(usize) -> Result<SuperMatrix>,
{
    check_run(rho0, t_end, n_steps)?;
    let times = uniform_grid(t_end, n_steps);
    let h = t_end / n_steps as f64;

    let mut states = Vec::with_capacity(n_steps + 1);
    let mut diagnostics = Vec::with_capacity(n_steps + 1);
    let mut warnings = Vec::new();
    let mut negative_count = 0usize;

    states.push(rho0.clone());
    diagnostics.push(StepDiagnostics::of(rho0));

    let mut v = vectorize(rho0.matrix());
    let mut start = generator(0)?;
    for step in 0..n_steps {
        let mid = generator(2 * step + 1)?;
        let end = generator(2 * step + 2)?;
        v = rk4_step(&v, &start, &mid, &end, h);
        start = end;

        let rho = DensityMatrix::from_unchecked(unvectorize(&v));
        let diag = StepDiagnostics::of(&rho);
        if !(diag.trace_error <= MAX_TRACE_ERROR) {
            return Err(Error::StepInstability {
                time: times[step + 1],
                trace_error: diag.trace_error,
            });
        }
        if diag.min_eigenvalue < -NEGATIVITY_TOL {
            if negative_count == 0 {
                let msg = format!(
                    "eigenvalue {:e} below -{NEGATIVITY_TOL:e} at t = {}",
                    diag.min_eigenvalue,
                    times[step + 1]
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
            negative_count += 1;
        }
        states.push(rho);
        diagnostics.push(diag);
    }
    if negative_count > 1 {
        warnings.push(format!(
            "{negative_count} states had eigenvalues below -{NEGATIVITY_TOL:e}"
        ));
    }

    Ok(Trajectory {
        times,
        states,
        diagnostics,
        warnings,
    })
}

/// Numerical propagation of one reservoir configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub kind: ReservoirKind,
    pub params: SpectralParams,
    pub regime: TemperatureRegime,
    pub method: CoefficientMethod,
    pub quadrature: QuadratureConfig,
}

impl Propagator {
    pub fn new(kind: ReservoirKind, params: SpectralParams, regime: TemperatureRegime) -> Self {
        Self {
            kind,
            params,
            regime,
            method: CoefficientMethod::default(),
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn with_method(mut self, method: CoefficientMethod) -> Self {
        self.method = method;
        self
    }

    /// Coefficients on the stage grid `k·h/2` used by [`Propagator::run`].
    pub fn coefficient_table(&self, t_end: f64, n_steps: usize) -> Result<CoefficientTable> {
        CoefficientTable::stage_grid(t_end, n_steps, &self.params, self.regime, self.method, &self.quadrature)
    }

    pub fn run(&self, rho0: &DensityMatrix, t_end: f64, n_steps: usize) -> Result<Trajectory> {
        check_run(rho0, t_end, n_steps)?;
        let table = self.coefficient_table(t_end, n_steps)?;
        self.run_with_table(rho0, t_end, n_steps, &table)
    }

    pub fn run_with_table(
        &self,
        rho0: &DensityMatrix,
        t_end: f64,
        n_steps: usize,
        table: &CoefficientTable,
    ) -> Result<Trajectory> {
        if table.len() != 2 * n_steps + 1 {
            return Err(Error::Grid(format!(
                "coefficient table has {} entries, expected {}",
                table.len(),
                2 * n_steps + 1
            )));
        }
        let values = table.values();
        propagate_with_generator(rho0, t_end, n_steps, |k| Ok(liouvillian(self.kind, &values[k]).matrix))
    }
}

/// RK4 propagation of `rho0` under the master equation of `kind`.
pub fn propagate_numerical(
    rho0: &DensityMatrix,
    kind: ReservoirKind,
    params: &SpectralParams,
    regime: TemperatureRegime,
    t_end: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    Propagator::new(kind, *params, regime).run(rho0, t_end, n_steps)
}

/// `2 · π/2 · J(1)(1 + 2N(1))`: twice the long-time κ₁ plateau, the rate scale
/// of the Markovian decay.
pub fn markov_limit_check(params: &SpectralParams, regime: TemperatureRegime) -> f64 {
    2.0 * markov_kappa1_plateau(params, regime)
}

/// How much of `e^{-Γ} e^{j₀J₀}` the analytic path applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrefactorMode {
    /// Matrix-element formulas only.
    None,
    /// Multiply by `e^{-Γ}`.
    #[default]
    GammaOnly,
    /// Multiply by `e^{-Γ}` and apply `e^{j₀J₀}`.
    GammaAndJ0,
}

impl PrefactorMode {
    pub const ALL: [PrefactorMode; 3] = [Self::None, Self::GammaOnly, Self::GammaAndJ0];

    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::GammaOnly => "gamma_only",
            Self::GammaAndJ0 => "gamma_and_j0",
        }
    }
}

impl std::str::FromStr for PrefactorMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| format!("unknown prefactor switch `{s}` (expected none|gamma_only|gamma_and_j0)"))
    }
}

/// Parameters of the factorized independent-reservoir solution at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FactorizationState {
    pub k_plus: f64,
    pub k_zero: f64,
    pub k_minus: f64,
    pub nu0: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub j0: Complex64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSolution {
    pub trajectory: Trajectory,
    pub factors: Vec<FactorizationState>,
}

/// `(ν₀, ν₊, ν₋)` for one coefficient set.
fn nus(c: &CoefficientSet) -> (f64, f64, f64) {
    (-4.0 * c.mu1, 2.0 * (c.kappa1 - c.mu1), 2.0 * (c.kappa1 + c.mu1))
}

/// Right-hand side of the Riccati system, augmented with the running
/// integrals `Γ`, `∫κ₂` and `∫κ₂(κ₂+μ₂)`.
fn riccati_rhs(y: &[f64; 6], c: &CoefficientSet) -> [f64; 6] {
    let (nu0, nu_plus, nu_minus) = nus(c);
    let (kp, k0) = (y[0], y[1]);
    [
        nu_plus - nu_minus * kp * kp + nu0 * kp,
        nu0 - 2.0 * nu_minus * kp,
        nu_minus * k0.exp(),
        4.0 * c.kappa1,
        c.kappa2,
        c.kappa2 * (c.kappa2 + c.mu2),
    ]
}

fn axpy(y: &[f64; 6], k: &[f64; 6], h: f64) -> [f64; 6] {
    let mut out = *y;
    for i in 0..6 {
        out[i] += h * k[i];
    }
    out
}

/// Applies `e^{k₊K₊} e^{k₀K₀} e^{k₋K₋}` to `ρ` through its matrix elements.
pub fn apply_factorized(rho: &Matrix4<Complex64>, k_plus: f64, k_zero: f64, k_minus: f64) -> Matrix4<Complex64> {
    let r = |i: usize, j: usize| rho[(i - 1, j - 1)];
    let c = |x: f64| Complex64::new(x, 0.0);
    let (kp, km) = (k_plus, k_minus);
    let e = k_zero.exp();
    let ei = (-k_zero).exp();
    let eh = (0.5 * k_zero).exp();
    let ehi = (-0.5 * k_zero).exp();
    let x = ei * kp * km;

    let mut out = *rho;
    let mut set = |i: usize, j: usize, v: Complex64| out[(i - 1, j - 1)] = v;

    set(
        1,
        1,
        c(e + 2.0 * kp * km + ei * kp * kp * km * km) * r(1, 1)
            + c(kp + ei * kp * kp * km) * (r(2, 2) + r(3, 3))
            + c(ei * kp * kp) * r(4, 4),
    );
    let from_top = c(km + ei * kp * km * km) * r(1, 1);
    set(
        2,
        2,
        from_top + c(1.0 + x) * r(2, 2) + c(x) * r(3, 3) + c(ei * kp) * r(4, 4),
    );
    set(
        3,
        3,
        from_top + c(x) * r(2, 2) + c(1.0 + x) * r(3, 3) + c(ei * kp) * r(4, 4),
    );
    set(
        4,
        4,
        c(ei * km * km) * r(1, 1) + c(ei * km) * (r(2, 2) + r(3, 3)) + c(ei) * r(4, 4),
    );

    let upper = c(eh + ehi * kp * km);
    set(2, 1, upper * r(2, 1) + c(ehi * kp) * r(4, 3));
    set(3, 1, upper * r(3, 1) + c(ehi * kp) * r(4, 2));
    set(1, 2, upper * r(1, 2) + c(ehi * kp) * r(3, 4));
    set(1, 3, upper * r(1, 3) + c(ehi * kp) * r(2, 4));
    set(4, 2, c(ehi * km) * r(3, 1) + c(ehi) * r(4, 2));
    set(4, 3, c(ehi * km) * r(2, 1) + c(ehi) * r(4, 3));
    set(2, 4, c(ehi * km) * r(1, 3) + c(ehi) * r(2, 4));
    set(3, 4, c(ehi * km) * r(1, 2) + c(ehi) * r(3, 4));
    // ρ₁₄, ρ₂₃, ρ₃₂, ρ₄₁ are left untouched.
    out
}

/// `e^{j₀J₀}ρ = e^{j₀Z} ρ e^{-j₀Z}` with `Z = σ_z⁽¹⁾ + σ_z⁽²⁾`.
pub fn apply_j0_rotation(rho: &Matrix4<Complex64>, j0: Complex64) -> Matrix4<Complex64> {
    const Z: [f64; 4] = [2.0, 0.0, 0.0, -2.0];
    Matrix4::from_fn(|i, j| rho[(i, j)] * (j0 * (Z[i] - Z[j])).exp())
}

/// Factorized analytic solution for independent reservoirs on `t_grid`.
///
/// The Riccati system is integrated with RK4 on the same grid, with the
/// coefficients evaluated at every step midpoint.
pub fn solve_independent_analytic(
    rho0: &DensityMatrix,
    params: &SpectralParams,
    regime: TemperatureRegime,
    t_grid: &[f64],
    prefactor: PrefactorMode,
    j0_formula: J0Formula,
) -> Result<AnalyticSolution> {
    DensityMatrix::new(*rho0.matrix())?;
    if t_grid.len() < 2 || t_grid[0] != 0.0 {
        return Err(Error::Grid(
            "analytic grid needs at least two points starting at 0".into(),
        ));
    }
    let mut stage_times = Vec::with_capacity(2 * t_grid.len() - 1);
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Grid("time grid must be strictly increasing".into()));
        }
        stage_times.push(w[0]);
        stage_times.push(0.5 * (w[0] + w[1]));
    }
    stage_times.push(*t_grid.last().unwrap());
    let table = CoefficientTable::build(
        &stage_times,
        params,
        regime,
        CoefficientMethod::default(),
        &QuadratureConfig::default(),
    )?;
    solve_independent_analytic_with_table(rho0, t_grid, table.values(), prefactor, j0_formula)
}

/// As [`solve_independent_analytic`], with coefficients supplied on the
/// interleaved grid `t₀, (t₀+t₁)/2, t₁, ...`.
pub fn solve_independent_analytic_with_table(
    rho0: &DensityMatrix,
    t_grid: &[f64],
    stage_values: &[CoefficientSet],
    prefactor: PrefactorMode,
    j0_formula: J0Formula,
) -> Result<AnalyticSolution> {
    if stage_values.len() != 2 * t_grid.len() - 1 {
        return Err(Error::Grid("stage coefficients do not match the grid".into()));
    }
    let mut y = [0.0f64; 6];
    let mut factors = Vec::with_capacity(t_grid.len());
    let mut states = Vec::with_capacity(t_grid.len());
    let mut diagnostics = Vec::with_capacity(t_grid.len());

    let mut record = |y: &[f64; 6], c: &CoefficientSet| {
        let (nu0, nu_plus, nu_minus) = nus(c);
        let j0 = match j0_formula {
            J0Formula::Literal => Complex64::new(0.0, -2.0 * y[5]),
            J0Formula::Naive => Complex64::new(0.0, -y[4]),
        };
        let f = FactorizationState {
            k_plus: y[0],
            k_zero: y[1],
            k_minus: y[2],
            nu0,
            nu_plus,
            nu_minus,
            j0,
            gamma: y[3],
        };
        let mut m = apply_factorized(rho0.matrix(), f.k_plus, f.k_zero, f.k_minus);
        match prefactor {
            PrefactorMode::None => {}
            PrefactorMode::GammaOnly => m *= Complex64::new((-f.gamma).exp(), 0.0),
            PrefactorMode::GammaAndJ0 => {
                m = apply_j0_rotation(&m, f.j0) * Complex64::new((-f.gamma).exp(), 0.0);
            }
        }
        let rho = DensityMatrix::from_unchecked(m);
        diagnostics.push(StepDiagnostics::of(&rho));
        states.push(rho);
        factors.push(f);
    };

    record(&y, &stage_values[0]);
    for i in 0..t_grid.len() - 1 {
        let h = t_grid[i + 1] - t_grid[i];
        let (c0, cm, c1) = (&stage_values[2 * i], &stage_values[2 * i + 1], &stage_values[2 * i + 2]);
        let k1 = riccati_rhs(&y, c0);
        let k2 = riccati_rhs(&axpy(&y, &k1, 0.5 * h), cm);
        let k3 = riccati_rhs(&axpy(&y, &k2, 0.5 * h), cm);
        let k4 = riccati_rhs(&axpy(&y, &k3, h), c1);
        for j in 0..6 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if !(y[0].abs() <= RICCATI_LIMIT) {
            return Err(Error::RiccatiBlowUp {
                time: t_grid[i + 1],
                value: y[0],
            });
        }
        record(&y, c1);
    }

    Ok(AnalyticSolution {
        trajectory: Trajectory {
            times: t_grid.to_vec(),
            states,
            diagnostics,
            warnings: Vec::new(),
        },
        factors,
    })
}
