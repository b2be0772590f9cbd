//! Two-qubit density matrices and the preset initial states.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liouville::{swap_operator, Operator, EE, EG, GE, GG};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const NEGATIVITY_TOL: f64 = 1e-8;

/// A 4×4 density matrix in the `|ee⟩, |eg⟩, |ge⟩, |gg⟩` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and (near) positivity.
    pub fn new(m: Operator) -> Result<Self> {
        let rho = Self(m);
        let herm = rho.hermiticity_defect();
        if !(herm <= HERMITICITY_TOL) {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = rho.trace_error();
        if !(tr <= TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace differs from 1 by {tr:e}")));
        }
        let min = rho.min_eigenvalue();
        if min < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Wraps a propagated matrix without validation.
    pub fn from_unchecked(m: Operator) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalized (or normalizable) amplitude vector.
    pub fn from_pure(psi: &Vector4<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Self::new(psi * psi.adjoint())
    }

    fn basis_projector(i: usize) -> Self {
        let mut m = Operator::zeros();
        m[(i, i)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    /// `(|e₁g₂⟩ + |g₁e₂⟩)/√2`.
    pub fn bell_psi_plus() -> Self {
        let mut m = Operator::zeros();
        for &i in &[EG, GE] {
            for &j in &[EG, GE] {
                m[(i, j)] = Complex64::new(0.5, 0.0);
            }
        }
        Self(m)
    }

    /// `|e₁g₂⟩`.
    pub fn eg() -> Self {
        Self::basis_projector(EG)
    }

    /// `|e₁e₂⟩`.
    pub fn ee() -> Self {
        Self::basis_projector(EE)
    }

    /// `|g₁g₂⟩`.
    pub fn gg() -> Self {
        Self::basis_projector(GG)
    }

    pub fn maximally_mixed() -> Self {
        Self(Operator::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_matrix(self) -> Operator {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn trace_error(&self) -> f64 {
        (self.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(h).eigenvalues;
        let mut out = [eig[0], eig[1], eig[2], eig[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Reduced state of qubit 1 (partial trace over qubit 2).
    pub fn reduced_first(&self) -> Matrix2<Complex64> {
        let m = &self.0;
        let mut out = Matrix2::zeros();
        for a in 0..2 {
            for ap in 0..2 {
                out[(a, ap)] = m[(2 * a, 2 * ap)] + m[(2 * a + 1, 2 * ap + 1)];
            }
        }
        out
    }

    /// Reduced state of qubit 2 (partial trace over qubit 1).
    pub fn reduced_second(&self) -> Matrix2<Complex64> {
        let m = &self.0;
        let mut out = Matrix2::zeros();
        for b in 0..2 {
            for bp in 0..2 {
                out[(b, bp)] = m[(b, bp)] + m[(2 + b, 2 + bp)];
            }
        }
        out
    }

    /// `SWAP · ρ · SWAP`.
    pub fn swapped(&self) -> Self {
        let s = swap_operator();
        Self(s * self.0 * s)
    }

    /// Largest entry-wise distance to another state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Named initial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    BellPsiPlus,
    Eg,
    Ee,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::BellPsiPlus, Preset::Eg, Preset::Ee];

    pub fn state(&self) -> DensityMatrix {
        match self {
            Self::BellPsiPlus => DensityMatrix::bell_psi_plus(),
            Self::Eg => DensityMatrix::eg(),
            Self::Ee => DensityMatrix::ee(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::BellPsiPlus => "bell_psi_plus",
            Self::Eg => "eg",
            Self::Ee => "ee",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| format!("unknown initial state preset `{s}`"))
    }
}
