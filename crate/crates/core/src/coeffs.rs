//! Time-dependent master-equation coefficients κ₁, κ₂, μ₁, μ₂.
//!
//! Each coefficient is a double integral over the reservoir frequency ω and a
//! memory time τ ∈ [0, t]. Two independent evaluation routes are provided:
//!
//! * [`coefficients_at`] does the τ integral in closed form, leaving the
//!   kernels `sin(xt)/x` and `(1 - cos(xt))/x` with `x = ω - 1`, and integrates
//!   over ω adaptively.
//! * The correlation-function route does the ω integral in closed form,
//!   `∫₀^∞ ω^a e^{-ω/ω_c} e^{iωτ} dω = Γ(a+1) (1/ω_c - iτ)^{-(a+1)}`, and
//!   integrates the resulting smooth function of τ. It is what
//!   [`CoefficientTable`] uses for long time grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig, Tolerance};
use crate::spectral::{SpectralParams, TemperatureRegime};

/// Below this `|ω - 1|` the kernels switch to their Taylor expansions.
const TAYLOR_RADIUS: f64 = 1e-8;

/// The four coefficients at a single time. All are in frequency units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoefficientSet {
    pub kappa1: f64,
    pub kappa2: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl CoefficientSet {
    pub const ZERO: Self = Self {
        kappa1: 0.0,
        kappa2: 0.0,
        mu1: 0.0,
        mu2: 0.0,
    };

    pub fn new(kappa1: f64, kappa2: f64, mu1: f64, mu2: f64) -> Self {
        Self {
            kappa1,
            kappa2,
            mu1,
            mu2,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.kappa1.is_finite() && self.kappa2.is_finite() && self.mu1.is_finite() && self.mu2.is_finite()
    }
}

/// `sin(xt)/x`, finite at `x = 0`.
fn sine_kernel(x: f64, t: f64) -> f64 {
    if x.abs() < TAYLOR_RADIUS {
        t - x * x * t * t * t / 6.0
    } else {
        (x * t).sin() / x
    }
}

/// `(1 - cos(xt))/x`, written as `2 sin²(xt/2)/x` to avoid cancellation.
fn cosine_kernel(x: f64, t: f64) -> f64 {
    if x.abs() < TAYLOR_RADIUS {
        0.5 * x * t * t
    } else {
        let s = (0.5 * x * t).sin();
        2.0 * s * s / x
    }
}

/// `J(ω)(1 + 2N(ω))`; the high-temperature form is evaluated as a single
/// power so the `ω^{s-1}` behaviour at the origin is exact.
fn thermal_weight(omega: f64, params: &SpectralParams, regime: TemperatureRegime) -> f64 {
    match regime {
        TemperatureRegime::ZeroT => params.density_unchecked(omega),
        TemperatureRegime::HighT { kt } => {
            let s = params.exponent();
            if omega == 0.0 {
                return if s > 1.0 {
                    0.0
                } else if s == 1.0 {
                    params.prefactor() * 2.0 * kt
                } else {
                    f64::INFINITY
                };
            }
            params.prefactor() * 2.0 * kt * omega.powf(s - 1.0) * (-omega / params.cutoff()).exp()
        }
    }
}

/// Upper ω cutoff for the adaptive quadrature.
pub fn omega_max(t: f64, params: &SpectralParams) -> f64 {
    (50.0 * params.cutoff()).max(1.0 + 200.0 / t)
}

/// Breakpoints on `[lo, hi]` spaced so each panel holds at most one kernel period.
fn panels(lo: f64, hi: f64, t: f64, params: &SpectralParams) -> Vec<f64> {
    let width = (2.0 * PI / t).min(params.cutoff().max(0.1)).min(1.0);
    let n = ((hi - lo) / width).ceil().max(1.0) as usize;
    let mut points: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    // Resonance is a natural breakpoint: the kernels peak there with width 1/t.
    if lo < 1.0 && 1.0 < hi && !points.contains(&1.0) {
        points.push(1.0);
        points.sort_by(f64::total_cmp);
    }
    points
}

/// Evaluates κ₁, κ₂, μ₁, μ₂ at time `t` with the default tolerance.
pub fn coefficients_at(t: f64, params: &SpectralParams, regime: TemperatureRegime) -> Result<CoefficientSet> {
    coefficients_at_with(t, params, regime, &QuadratureConfig::default())
}

/// As [`coefficients_at`] with an explicit quadrature configuration.
pub fn coefficients_at_with(
    t: f64,
    params: &SpectralParams,
    regime: TemperatureRegime,
    config: &QuadratureConfig,
) -> Result<CoefficientSet> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "coefficient time must be finite and >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(CoefficientSet::ZERO);
    }
    if let TemperatureRegime::HighT { kt } = regime {
        if !(kt > 0.0) {
            return Err(Error::Domain(format!("kT must be > 0, got {kt}")));
        }
    }

    let wmax = omega_max(t, params);
    let integrand = |omega: f64| -> [f64; 4] {
        let x = omega - 1.0;
        let kc = sine_kernel(x, t);
        let ks = cosine_kernel(x, t);
        let bare = params.density_unchecked(omega);
        let thermal = match regime {
            TemperatureRegime::ZeroT => bare,
            _ => thermal_weight(omega, params, regime),
        };
        [thermal * kc, thermal * ks, bare * kc, bare * ks]
    };

    let mut total = [0.0; 4];
    let mut lower = 0.0;
    if params.exponent() < 1.0 {
        // ω = u² on [0, 1] removes the ω^{s-1} (or ω^{s}) endpoint singularity.
        let upoints: Vec<f64> = panels(0.0, 1.0, t, params).into_iter().map(f64::sqrt).collect();
        let part = integrate(
            |u| {
                let v = integrand(u * u);
                let jac = 2.0 * u;
                [v[0] * jac, v[1] * jac, v[2] * jac, v[3] * jac]
            },
            &upoints,
            config,
        )?;
        for k in 0..4 {
            total[k] += part[k];
        }
        lower = 1.0;
    }
    let part = integrate(integrand, &panels(lower, wmax, t, params), config)?;
    for k in 0..4 {
        total[k] += part[k];
    }

    Ok(CoefficientSet {
        kappa1: 0.5 * total[0],
        kappa2: 0.5 * total[1],
        mu1: 0.5 * total[2],
        mu2: 0.5 * total[3],
    })
}

/// `∫₀^∞ ω^a e^{-ω/ω_c} e^{iωτ} dω` for `a > -1`.
fn laplace_power(a: f64, cutoff: f64, tau: f64) -> Complex64 {
    let z = Complex64::new(1.0 / cutoff, -tau);
    gamma(a + 1.0) * z.powf(-(a + 1.0))
}

/// Reservoir correlation functions at memory time `τ`:
/// `(∫ J(ω)(1+2N(ω)) e^{i(ω-1)τ} dω, ∫ J(ω) e^{i(ω-1)τ} dω)`.
pub fn bath_correlation(tau: f64, params: &SpectralParams, regime: TemperatureRegime) -> (Complex64, Complex64) {
    let s = params.exponent();
    let wc = params.cutoff();
    let rotate = Complex64::from_polar(1.0, -tau);
    let bare = params.prefactor() * laplace_power(s, wc, tau) * rotate;
    let thermal = match regime {
        TemperatureRegime::ZeroT => bare,
        TemperatureRegime::HighT { kt } => params.prefactor() * 2.0 * kt * laplace_power(s - 1.0, wc, tau) * rotate,
    };
    (thermal, bare)
}

/// Asymptotic value of κ₁: `sin(xt)/x → πδ(x)` gives `π/2 · J(1)(1 + 2N(1))`.
pub fn markov_kappa1_plateau(params: &SpectralParams, regime: TemperatureRegime) -> f64 {
    let n = match regime {
        TemperatureRegime::ZeroT => 1.0,
        TemperatureRegime::HighT { kt } => 2.0 * kt,
    };
    0.5 * PI * params.density_unchecked(1.0) * n
}

/// How the coefficients of a [`CoefficientTable`] are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientMethod {
    /// Closed-form bath correlation function, integrated cumulatively in τ.
    #[default]
    CorrelationFunction,
    /// Independent calls to [`coefficients_at`] at every time.
    SpectralQuadrature,
}

/// Coefficients tabulated on an increasing time grid that starts at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    times: Vec<f64>,
    values: Vec<CoefficientSet>,
}

impl CoefficientTable {
    pub fn build(
        times: &[f64],
        params: &SpectralParams,
        regime: TemperatureRegime,
        method: CoefficientMethod,
        config: &QuadratureConfig,
    ) -> Result<Self> {
        validate_grid(times)?;
        let values = match method {
            CoefficientMethod::SpectralQuadrature => times
                .iter()
                .map(|&t| coefficients_at_with(t, params, regime, config))
                .collect::<Result<Vec<_>>>()?,
            CoefficientMethod::CorrelationFunction => cumulative_from_correlation(times, params, regime)?,
        };
        Ok(Self {
            times: times.to_vec(),
            values,
        })
    }

    /// Table on the RK4 stage grid `t_k = k·h/2`, `k = 0..=2·n_steps`.
    pub fn stage_grid(
        t_end: f64,
        n_steps: usize,
        params: &SpectralParams,
        regime: TemperatureRegime,
        method: CoefficientMethod,
        config: &QuadratureConfig,
    ) -> Result<Self> {
        let times: Vec<f64> = (0..=2 * n_steps)
            .map(|k| t_end * k as f64 / (2 * n_steps) as f64)
            .collect();
        Self::build(&times, params, regime, method, config)
    }

    pub fn from_values(times: Vec<f64>, values: Vec<CoefficientSet>) -> Result<Self> {
        validate_grid(&times)?;
        if times.len() != values.len() {
            return Err(Error::Grid("times and values differ in length".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[CoefficientSet] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn cumulative_from_correlation(
    times: &[f64],
    params: &SpectralParams,
    regime: TemperatureRegime,
) -> Result<Vec<CoefficientSet>> {
    let config = QuadratureConfig {
        tolerance: Tolerance { abs: 1e-14, rel: 1e-12 },
        max_intervals: 100_000,
    };
    let integrand = |tau: f64| {
        let (thermal, bare) = bath_correlation(tau, params, regime);
        [thermal.re, thermal.im, bare.re, bare.im]
    };
    // Near τ = 0 the correlation varies on the scale 1/ω_c.
    let chunk = 0.5f64.min(0.5 / params.cutoff());
    let mut acc = [0.0; 4];
    let mut values = Vec::with_capacity(times.len());
    values.push(CoefficientSet::ZERO);
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = ((b - a) / chunk).ceil().max(1.0) as usize;
        let points: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let part = integrate(integrand, &points, &config)?;
        for k in 0..4 {
            acc[k] += part[k];
        }
        values.push(CoefficientSet {
            kappa1: 0.5 * acc[0],
            kappa2: 0.5 * acc[1],
            mu1: 0.5 * acc[2],
            mu2: 0.5 * acc[3],
        });
    }
    if times[0] > 0.0 {
        // Shift so the first value is the integral from 0 to times[0].
        let head = integrate(integrand, &[0.0, times[0]], &config)?;
        for v in &mut values {
            v.kappa1 += 0.5 * head[0];
            v.kappa2 += 0.5 * head[1];
            v.mu1 += 0.5 * head[2];
            v.mu2 += 0.5 * head[3];
        }
    }
    Ok(values)
}

fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Grid("empty time grid".into()));
    }
    if !(times[0] >= 0.0) {
        return Err(Error::Grid(format!("grid starts at negative time {}", times[0])));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Which expression is used for the `j₀` phase of the factorized solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum J0Formula {
    /// `j₀ = -2i ∫ κ₂(κ₂ + μ₂) dt`.
    #[default]
    Literal,
    /// `j₀ = -i ∫ κ₂ dt`, the integral of the `J₀` coefficient itself.
    Naive,
}

/// Running time integrals of the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoefficientIntegrals {
    /// `Γ = 4 ∫ κ₁ dt`.
    pub gamma: f64,
    pub int_kappa2: f64,
    pub int_mu1: f64,
    pub int_mu2: f64,
    /// `∫ κ₂ (κ₂ + μ₂) dt`, needed by [`J0Formula::Literal`].
    pub int_kappa2_sum: f64,
}

impl CoefficientIntegrals {
    pub fn j0(&self, formula: J0Formula) -> Complex64 {
        match formula {
            J0Formula::Literal => Complex64::new(0.0, -2.0 * self.int_kappa2_sum),
            J0Formula::Naive => Complex64::new(0.0, -self.int_kappa2),
        }
    }
}

/// Trapezoidal running integrals of the coefficients over `t_grid`.
pub fn accumulate_integrals(
    t_grid: &[f64],
    params: &SpectralParams,
    regime: TemperatureRegime,
) -> Result<Vec<CoefficientIntegrals>> {
    check_integration_grid(t_grid)?;
    let values = t_grid
        .iter()
        .map(|&t| coefficients_at(t, params, regime))
        .collect::<Result<Vec<_>>>()?;
    accumulate_integrals_from(t_grid, &values)
}

/// Trapezoidal running integrals of precomputed coefficient values.
pub fn accumulate_integrals_from(t_grid: &[f64], values: &[CoefficientSet]) -> Result<Vec<CoefficientIntegrals>> {
    check_integration_grid(t_grid)?;
    if values.len() != t_grid.len() {
        return Err(Error::Grid(format!(
            "{} coefficient values for {} grid points",
            values.len(),
            t_grid.len()
        )));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    let mut acc = CoefficientIntegrals::default();
    out.push(acc);
    for i in 1..t_grid.len() {
        let h = t_grid[i] - t_grid[i - 1];
        let (a, b) = (values[i - 1], values[i]);
        let trap = |x: f64, y: f64| 0.5 * h * (x + y);
        acc.gamma += 4.0 * trap(a.kappa1, b.kappa1);
        acc.int_kappa2 += trap(a.kappa2, b.kappa2);
        acc.int_mu1 += trap(a.mu1, b.mu1);
        acc.int_mu2 += trap(a.mu2, b.mu2);
        acc.int_kappa2_sum += trap(a.kappa2 * (a.kappa2 + a.mu2), b.kappa2 * (b.kappa2 + b.mu2));
        out.push(acc);
    }
    Ok(out)
}

fn check_integration_grid(t_grid: &[f64]) -> Result<()> {
    validate_grid(t_grid)?;
    if t_grid[0] != 0.0 {
        return Err(Error::Grid(format!(
            "integration grid must start at 0, got {}",
            t_grid[0]
        )));
    }
    Ok(())
}
