//! Entropies, mutual information and quantum discord of two-qubit states.
//!
//! All quantities are in bits. The classical correlation is maximized over
//! rank-one projective measurements `{|v⟩⟨v|, I - |v⟩⟨v|}` on one qubit,
//! with `|v⟩ = cos(θ/2)|e⟩ + e^{iφ} sin(θ/2)|g⟩`: first on a `(θ, φ)` grid,
//! then by coordinate-wise golden-section search around the best grid point.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liouville::Qubit;
use crate::state::DensityMatrix;

/// Eigenvalues below this contribute nothing to an entropy.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
/// Eigenvalues below `-UNPHYSICAL_TOL` make a state unscorable.
pub const UNPHYSICAL_TOL: f64 = 1e-6;
/// Outcome probabilities below this are dropped.
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// Discord within this distance outside `[0, I]` is clipped back.
pub const CLIP_TOL: f64 = 1e-9;
pub const MIN_GRID: usize = 16;
pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_REFINE_ITERATIONS: usize = 30;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Bloch angles of a projective measurement on one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// `|v⟩` in the `|e⟩, |g⟩` basis.
    pub fn vector(&self) -> Vector2<Complex64> {
        let (s, c) = (0.5 * self.theta).sin_cos();
        Vector2::new(Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi))
    }

    /// `(|v⟩⟨v|, I - |v⟩⟨v|)`.
    pub fn projectors(&self) -> (Matrix2<Complex64>, Matrix2<Complex64>) {
        let v = self.vector();
        let p = v * v.adjoint();
        (p, Matrix2::identity() - p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordOptions {
    /// θ takes `grid + 1` values in `[0, π]` and φ takes `2·grid` values in `[0, 2π)`.
    pub grid: usize,
    pub refine_iterations: usize,
    pub measured: Qubit,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            refine_iterations: DEFAULT_REFINE_ITERATIONS,
            measured: Qubit::Second,
        }
    }
}

impl DiscordOptions {
    pub fn with_grid(grid: usize) -> Self {
        Self {
            grid,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.grid < MIN_GRID {
            return Err(Error::Domain(format!(
                "discord grid must be at least {MIN_GRID}, got {}",
                self.grid
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub argmax_basis: MeasurementBasis,
}

/// `-Σ λ log₂ λ` with the floor and negativity rules applied.
pub fn entropy_of_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -UNPHYSICAL_TOL {
            return Err(Error::Unphysical(l));
        }
        if l >= EIGENVALUE_FLOOR {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

fn check_trace(trace: Complex64) -> Result<()> {
    let err = (trace - Complex64::new(1.0, 0.0)).norm();
    if !(err <= UNPHYSICAL_TOL) {
        return Err(Error::InvalidState(format!("trace differs from 1 by {err:e}")));
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part of a 2×2 matrix, ascending.
fn eigenvalues_2x2(m: &Matrix2<Complex64>) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

/// Entropy of a single-qubit state.
pub fn qubit_entropy(m: &Matrix2<Complex64>) -> Result<f64> {
    check_trace(m.trace())?;
    entropy_of_eigenvalues(&eigenvalues_2x2(m))
}

/// Entropy of a two-qubit state.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    check_trace(rho.trace())?;
    entropy_of_eigenvalues(&rho.eigenvalues())
}

/// `S(ρ_A) + S(ρ_B) - S(ρ_AB)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    Ok(qubit_entropy(&rho.reduced_first())? + qubit_entropy(&rho.reduced_second())? - von_neumann_entropy(rho)?)
}

/// `p · S(M/p)` for an unnormalized conditional state `M` with `p = Tr M`.
fn weighted_conditional_entropy(m: &Matrix2<Complex64>) -> f64 {
    let p = m[(0, 0)].re + m[(1, 1)].re;
    if p < PROBABILITY_FLOOR {
        return 0.0;
    }
    eigenvalues_2x2(m)
        .iter()
        .filter(|&&l| l >= EIGENVALUE_FLOOR * p)
        .map(|&l| -l * (l / p).log2())
        .sum()
}

/// Pre-split view of a state for fast evaluation of measurement outcomes on
/// the second qubit: `blocks[b][b']` is `⟨b|ρ|b'⟩` as an operator on the first.
struct Conditioner {
    blocks: [[Matrix2<Complex64>; 2]; 2],
    reduced: Matrix2<Complex64>,
}

impl Conditioner {
    fn new(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let block = |b: usize, bp: usize| Matrix2::from_fn(|a, ap| m[(2 * a + b, 2 * ap + bp)]);
        Self {
            blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
            reduced: rho.reduced_first(),
        }
    }

    /// `Σ_k p_k S(ρ_k)` for the measurement at `(θ, φ)`.
    fn conditional_entropy(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = (0.5 * theta).sin_cos();
        let phase = Complex64::from_polar(c * s, phi);
        let [[ee, eg], [ge, gg]] = &self.blocks;
        let first = ee * Complex64::new(c * c, 0.0) + gg * Complex64::new(s * s, 0.0) + eg * phase + ge * phase.conj();
        let second = self.reduced - first;
        weighted_conditional_entropy(&first) + weighted_conditional_entropy(&second)
    }
}

fn oriented(rho: &DensityMatrix, measured: Qubit) -> DensityMatrix {
    match measured {
        Qubit::Second => rho.clone(),
        Qubit::First => rho.swapped(),
    }
}

fn grid_search(cond: &Conditioner, grid: usize) -> (f64, MeasurementBasis) {
    let mut best = (f64::INFINITY, MeasurementBasis::default());
    for i in 0..=grid {
        let theta = PI * i as f64 / grid as f64;
        for j in 0..2 * grid {
            let phi = PI * j as f64 / grid as f64;
            let h = cond.conditional_entropy(theta, phi);
            if h < best.0 {
                best = (h, MeasurementBasis { theta, phi });
            }
        }
    }
    best
}

/// Minimizes `f` on `[lo, hi]`; returns the best point seen and its value.
fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn refine(
    cond: &Conditioner,
    start: (f64, MeasurementBasis),
    grid: usize,
    iterations: usize,
) -> (f64, MeasurementBasis) {
    let step = PI / grid as f64;
    let (mut best, mut basis) = start;
    let (t0, p0) = (basis.theta, basis.phi);
    let t_range = ((t0 - step).max(0.0), (t0 + step).min(PI));
    let p_range = (p0 - step, p0 + step);
    for _ in 0..2 {
        let phi = basis.phi;
        let (theta, h) = golden_section(|t| cond.conditional_entropy(t, phi), t_range.0, t_range.1, iterations);
        if h < best {
            best = h;
            basis.theta = theta;
        }
        let theta = basis.theta;
        let (phi, h) = golden_section(|p| cond.conditional_entropy(theta, p), p_range.0, p_range.1, iterations);
        if h < best {
            best = h;
            basis.phi = phi.rem_euclid(2.0 * PI);
        }
    }
    (best, basis)
}

/// Classical correlation from the grid alone, without refinement.
pub fn classical_correlation_grid(
    rho: &DensityMatrix,
    grid: usize,
    measured: Qubit,
) -> Result<(f64, MeasurementBasis)> {
    DiscordOptions {
        grid,
        refine_iterations: 0,
        measured,
    }
    .validate()?;
    let rho = oriented(rho, measured);
    let s_a = qubit_entropy(&rho.reduced_first())?;
    let cond = Conditioner::new(&rho);
    let (h, basis) = grid_search(&cond, grid);
    Ok((s_a - h, basis))
}

/// `max_Π [S(ρ_A) - Σ_k p_k S(ρ_k)]` over projective measurements on the
/// measured qubit, with the maximizing basis.
pub fn classical_correlation(rho: &DensityMatrix, options: &DiscordOptions) -> Result<(f64, MeasurementBasis)> {
    options.validate()?;
    let rho = oriented(rho, options.measured);
    let s_a = qubit_entropy(&rho.reduced_first())?;
    let cond = Conditioner::new(&rho);
    let coarse = grid_search(&cond, options.grid);
    let (h, basis) = if options.refine_iterations > 0 {
        refine(&cond, coarse, options.grid, options.refine_iterations)
    } else {
        coarse
    };
    Ok((s_a - h, basis))
}

/// Discord with the default options (grid 64, second qubit measured).
pub fn quantum_discord(rho: &DensityMatrix) -> Result<DiscordResult> {
    quantum_discord_with(rho, &DiscordOptions::default())
}

pub fn quantum_discord_with(rho: &DensityMatrix, options: &DiscordOptions) -> Result<DiscordResult> {
    let mi = mutual_information(rho)?;
    let (j, basis) = classical_correlation(rho, options)?;
    let raw = mi - j;
    let discord = if (0.0..=mi).contains(&raw) {
        raw
    } else if (-CLIP_TOL..0.0).contains(&raw) {
        0.0
    } else if (mi..=mi + CLIP_TOL).contains(&raw) {
        mi
    } else {
        return Err(Error::DiscordOutOfRange {
            discord: raw,
            mutual_information: mi,
        });
    };
    Ok(DiscordResult {
        mutual_information: mi,
        classical_correlation: j,
        discord,
        argmax_basis: basis,
    })
}

/// Discord of every state in a series.
pub fn discord_series(states: &[DensityMatrix], options: &DiscordOptions) -> Result<Vec<f64>> {
    states
        .iter()
        .map(|s| quantum_discord_with(s, options).map(|r| r.discord))
        .collect()
}

/// Fills the discord column of a trajectory's diagnostics.
pub fn annotate(trajectory: &mut crate::propagator::Trajectory, options: &DiscordOptions) -> Result<()> {
    let values = discord_series(&trajectory.states, options)?;
    for (d, v) in trajectory.diagnostics.iter_mut().zip(values) {
        d.discord = Some(v);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{Operator, EE, GG};
    use nalgebra::{SymmetricEigen, Vector4};

    fn hermitian_eigenvalues_2x2(m: &Matrix2<Complex64>) -> [f64; 2] {
        let e = SymmetricEigen::new(*m).eigenvalues;
        [e[0].min(e[1]), e[0].max(e[1])]
    }

    fn diag(d: [f64; 4]) -> DensityMatrix {
        DensityMatrix::new(Operator::from_diagonal(
            &Vector4::from(d).map(|x| Complex64::new(x, 0.0)),
        ))
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let e = Matrix2::new(1.0, 0.0, 0.0, 0.0).map(|x| Complex64::new(x, 0.0));
        assert_eq!(qubit_entropy(&e).unwrap(), 0.0);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed()).unwrap() - 2.0).abs() < 1e-14);
        assert!((von_neumann_entropy(&diag([0.5, 0.5, 0.0, 0.0])).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            entropy_of_eigenvalues(&[1.1, -1e-3]),
            Err(Error::Unphysical(_))
        ));
        // Tiny negativity is tolerated and ignored.
        assert_eq!(entropy_of_eigenvalues(&[1.0, -1e-9]).unwrap(), 0.0);
        let bad = e * Complex64::new(0.5, 0.0);
        assert!(matches!(qubit_entropy(&bad), Err(Error::InvalidState(_))));
    }

    #[test]
    fn closed_form_eigenvalues_match_solver() {
        let m = Matrix2::new(
            Complex64::new(0.7, 0.0),
            Complex64::new(0.1, -0.2),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.3, 0.0),
        );
        let a = eigenvalues_2x2(&m);
        let b = hermitian_eigenvalues_2x2(&m);
        assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        assert!(mutual_information(&DensityMatrix::eg()).unwrap().abs() < 1e-15);
        assert!((mutual_information(&DensityMatrix::bell_psi_plus()).unwrap() - 2.0).abs() < 1e-12);
        assert!(mutual_information(&DensityMatrix::maximally_mixed()).unwrap().abs() < 1e-14);
    }

    #[test]
    fn projectors_are_complementary() {
        for &(theta, phi) in &[(0.0, 0.0), (0.3, 1.0), (PI, 5.0), (1.7, 6.2)] {
            let (p, q) = MeasurementBasis { theta, phi }.projectors();
            assert!((p + q - Matrix2::identity()).norm() < 1e-14);
            assert!((p * p - p).norm() < 1e-14);
            assert!((q * q - q).norm() < 1e-14);
        }
    }

    #[test]
    fn discord_examples() {
        let bell = quantum_discord(&DensityMatrix::bell_psi_plus()).unwrap();
        assert!((bell.discord - 1.0).abs() < 1e-4);
        assert!((bell.classical_correlation - 1.0).abs() < 1e-4);
        for rho in [
            DensityMatrix::eg(),
            DensityMatrix::ee(),
            DensityMatrix::gg(),
            DensityMatrix::maximally_mixed(),
        ] {
            let r = quantum_discord(&rho).unwrap();
            assert!(r.discord.abs() < 1e-9, "{r:?}");
        }
        let classical = diag([0.5, 0.0, 0.0, 0.5]);
        let r = quantum_discord(&classical).unwrap();
        assert!(r.discord.abs() < 1e-4);
        assert!((r.mutual_information - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_quantum_state_measured_on_its_classical_side() {
        // Σ_b p_b ρ_A^b ⊗ |b⟩⟨b| with non-commuting ρ_A^b.
        let mut m = Operator::zeros();
        let plus = [[0.5, 0.5], [0.5, 0.5]];
        for a in 0..2 {
            for ap in 0..2 {
                m[(2 * a, 2 * ap)] = Complex64::new(0.4 * plus[a][ap], 0.0);
            }
        }
        m[(1, 1)] = Complex64::new(0.6, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        let r = quantum_discord(&rho).unwrap();
        assert!(r.discord < 1e-6, "{r:?}");
        // Measuring the other side does see quantum correlations.
        let opts = DiscordOptions {
            measured: Qubit::First,
            ..DiscordOptions::default()
        };
        assert!(quantum_discord_with(&rho, &opts).unwrap().discord > 1e-3);
    }

    #[test]
    fn grid_validation_and_monotonicity() {
        let rho = DensityMatrix::bell_psi_plus();
        assert!(classical_correlation(&rho, &DiscordOptions::with_grid(8)).is_err());
        let mut m = *DensityMatrix::bell_psi_plus().matrix() * Complex64::new(0.7, 0.0);
        m[(EE, EE)] += Complex64::new(0.2, 0.0);
        m[(GG, GG)] += Complex64::new(0.1, 0.0);
        m[(EE, GG)] = Complex64::new(0.05, 0.1);
        m[(GG, EE)] = Complex64::new(0.05, -0.1);
        let rho = DensityMatrix::new(m).unwrap();
        for g in [16, 20, 32, 50] {
            let (a, _) = classical_correlation_grid(&rho, g, Qubit::Second).unwrap();
            let (b, _) = classical_correlation_grid(&rho, 2 * g, Qubit::Second).unwrap();
            assert!(b >= a - 1e-12);
            let (c, _) = classical_correlation(&rho, &DiscordOptions::with_grid(g)).unwrap();
            assert!(c >= a - 1e-15);
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, f) = golden_section(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 60);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((f - 1.0).abs() < 1e-15);
    }
}
