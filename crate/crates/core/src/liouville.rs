//! Matrix representations of the two-qubit superoperators.
//!
//! Basis ordering is `|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩` (indices 0..4), so the
//! product index is `2·q₁ + q₂` with `e = 0` and `g = 1`. Density matrices are
//! vectorized by stacking columns, which is nalgebra's native storage order;
//! a sandwich `A ρ B` then acts on `vec(ρ)` as `Bᵀ ⊗ A`.
//!
//! Pauli conventions: `σ_z|e⟩ = |e⟩`, `σ_z|g⟩ = -|g⟩`, `σ₊ = |e⟩⟨g|`, so
//! `σ₊σ₋` projects onto the excited state.

use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::coeffs::CoefficientSet;

/// A two-qubit operator.
pub type Operator = Matrix4<Complex64>;
/// A superoperator acting on vectorized two-qubit density matrices.
pub type SuperMatrix = SMatrix<Complex64, 16, 16>;
/// A column-stacked two-qubit density matrix.
pub type Vectorized = SVector<Complex64, 16>;

pub const EE: usize = 0;
pub const EG: usize = 1;
pub const GE: usize = 2;
pub const GG: usize = 3;

/// Position of `ρ[row, col]` inside [`Vectorized`].
pub const fn vec_index(row: usize, col: usize) -> usize {
    4 * col + row
}

pub fn vectorize(rho: &Operator) -> Vectorized {
    Vectorized::from_column_slice(rho.as_slice())
}

pub fn unvectorize(v: &Vectorized) -> Operator {
    Operator::from_column_slice(v.as_slice())
}

/// Which qubit a single-qubit operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    First,
    Second,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn embed(single: &Matrix2<Complex64>, qubit: Qubit) -> Operator {
    let id = Matrix2::<Complex64>::identity();
    let (a, b) = match qubit {
        Qubit::First => (single, &id),
        Qubit::Second => (&id, single),
    };
    let mut out = Operator::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn sigma_plus(qubit: Qubit) -> Operator {
    embed(&Matrix2::new(c(0.0), c(1.0), c(0.0), c(0.0)), qubit)
}

pub fn sigma_minus(qubit: Qubit) -> Operator {
    embed(&Matrix2::new(c(0.0), c(0.0), c(1.0), c(0.0)), qubit)
}

pub fn sigma_z(qubit: Qubit) -> Operator {
    embed(&Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0)), qubit)
}

/// Qubit exchange `|q₁q₂⟩ ↦ |q₂q₁⟩`.
pub fn swap_operator() -> Operator {
    let mut s = Operator::zeros();
    for q1 in 0..2 {
        for q2 in 0..2 {
            s[(2 * q2 + q1, 2 * q1 + q2)] = c(1.0);
        }
    }
    s
}

/// Superoperator of `ρ ↦ A ρ B`.
pub fn sandwich(a: &Operator, b: &Operator) -> SuperMatrix {
    let bt = b.transpose();
    let mut out = SuperMatrix::zeros();
    for j in 0..4 {
        for l in 0..4 {
            let w = bt[(j, l)];
            if w == Complex64::default() {
                continue;
            }
            for i in 0..4 {
                for k in 0..4 {
                    out[(4 * j + i, 4 * l + k)] = w * a[(i, k)];
                }
            }
        }
    }
    out
}

fn left(a: &Operator) -> SuperMatrix {
    sandwich(a, &Operator::identity())
}

fn right(b: &Operator) -> SuperMatrix {
    sandwich(&Operator::identity(), b)
}

/// The superoperators appearing in both master equations.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperoperatorSet {
    /// `[σ_z⁽¹⁾ + σ_z⁽²⁾, ρ]`.
    pub j0: SuperMatrix,
    /// `{σ₋⁽¹⁾σ₊⁽²⁾ + σ₊⁽¹⁾σ₋⁽²⁾, ρ}`.
    pub j1: SuperMatrix,
    /// `[σ₊⁽¹⁾σ₋⁽²⁾ + σ₊⁽²⁾σ₋⁽¹⁾, ρ]`.
    pub j2: SuperMatrix,
    pub j_minus: SuperMatrix,
    pub j_plus: SuperMatrix,
    pub k_minus: SuperMatrix,
    pub k_plus: SuperMatrix,
    /// Includes the `-ρ/2` shift for each qubit.
    pub k0: SuperMatrix,
    pub identity: SuperMatrix,
}

pub fn build_superoperators() -> SuperoperatorSet {
    use Qubit::{First, Second};
    let (sp1, sp2) = (sigma_plus(First), sigma_plus(Second));
    let (sm1, sm2) = (sigma_minus(First), sigma_minus(Second));
    let z = sigma_z(First) + sigma_z(Second);
    let exchange_a = sm1 * sp2 + sp1 * sm2;
    let exchange_b = sp1 * sm2 + sp2 * sm1;
    let identity = SuperMatrix::identity();

    let half = c(0.5);
    let k0_part = |p: &Operator| (left(p) + right(p) - identity) * half;

    SuperoperatorSet {
        j0: left(&z) - right(&z),
        j1: left(&exchange_a) + right(&exchange_a),
        j2: left(&exchange_b) - right(&exchange_b),
        j_minus: sandwich(&sm1, &sp2) + sandwich(&sm2, &sp1),
        j_plus: sandwich(&sp1, &sm2) + sandwich(&sp2, &sm1),
        k_minus: sandwich(&sm1, &sp1) + sandwich(&sm2, &sp2),
        k_plus: sandwich(&sp1, &sm1) + sandwich(&sp2, &sm2),
        k0: k0_part(&(sp1 * sm1)) + k0_part(&(sp2 * sm2)),
        identity,
    }
}

/// Shared, lazily built copy of [`build_superoperators`].
pub fn superoperators() -> &'static SuperoperatorSet {
    static SET: OnceLock<SuperoperatorSet> = OnceLock::new();
    SET.get_or_init(build_superoperators)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReservoirKind {
    Independent,
    Common,
}

impl ReservoirKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Independent => "independent",
            Self::Common => "common",
        }
    }
}

impl std::str::FromStr for ReservoirKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "independent" | "separate" => Ok(Self::Independent),
            "common" | "shared" => Ok(Self::Common),
            other => Err(format!(
                "unknown reservoir kind `{other}` (expected independent|common)"
            )),
        }
    }
}

/// Generator `L(t)` of `dρ/dt = L(t)ρ` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: SuperMatrix,
    pub kind: ReservoirKind,
}

impl Liouvillian {
    pub fn apply(&self, rho: &Operator) -> Operator {
        unvectorize(&(self.matrix * vectorize(rho)))
    }

    /// Largest entry of `vec(I)ᴴ L`; zero for a trace-preserving generator.
    pub fn trace_residual(&self) -> f64 {
        trace_row_residual(&self.matrix)
    }
}

pub(crate) fn trace_row_residual(m: &SuperMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for col in 0..16 {
        let mut sum = Complex64::default();
        for d in 0..4 {
            sum += m[(vec_index(d, d), col)];
        }
        worst = worst.max(sum.norm());
    }
    worst
}

fn independent_matrix(c: &CoefficientSet, ops: &SuperoperatorSet) -> SuperMatrix {
    let k1 = c.kappa1;
    let m1 = c.mu1;
    ops.identity * Complex64::new(-4.0 * k1, 0.0)
        + ops.j0 * Complex64::new(0.0, -c.kappa2)
        + ops.k_minus * Complex64::new(2.0 * (k1 + m1), 0.0)
        + ops.k_plus * Complex64::new(2.0 * (k1 - m1), 0.0)
        + ops.k0 * Complex64::new(-4.0 * m1, 0.0)
}

pub fn liouvillian_independent(c: &CoefficientSet) -> Liouvillian {
    Liouvillian {
        matrix: independent_matrix(c, superoperators()),
        kind: ReservoirKind::Independent,
    }
}

pub fn liouvillian_common(c: &CoefficientSet) -> Liouvillian {
    let ops = superoperators();
    let k1 = c.kappa1;
    let m1 = c.mu1;
    let collective = ops.j1 * Complex64::new(-2.0 * k1, 0.0)
        + ops.j2 * Complex64::new(0.0, -2.0 * c.mu2)
        + ops.j_minus * Complex64::new(2.0 * (k1 + m1), 0.0)
        + ops.j_plus * Complex64::new(2.0 * (k1 - m1), 0.0);
    Liouvillian {
        matrix: independent_matrix(c, ops) + collective,
        kind: ReservoirKind::Common,
    }
}

pub fn liouvillian(kind: ReservoirKind, c: &CoefficientSet) -> Liouvillian {
    match kind {
        ReservoirKind::Independent => liouvillian_independent(c),
        ReservoirKind::Common => liouvillian_common(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn projector(i: usize) -> Operator {
        let mut p = Operator::zeros();
        p[(i, i)] = c(1.0);
        p
    }

    fn random_hermitian(rng: &mut StdRng) -> Operator {
        let mut m = Operator::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        (m + m.adjoint()) * c(0.5)
    }

    fn random_coefficients(rng: &mut StdRng) -> CoefficientSet {
        CoefficientSet::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
    }

    fn max_abs(m: &Operator) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn vec_round_trip_and_layout() {
        let mut rng = StdRng::seed_from_u64(1);
        let m = random_hermitian(&mut rng);
        assert_eq!(unvectorize(&vectorize(&m)), m);
        let v = vectorize(&m);
        assert_eq!(v[vec_index(EE, GG)], m[(0, 3)]);
        assert_eq!(v[vec_index(GE, EG)], m[(2, 1)]);
    }

    #[test]
    fn sandwich_matches_direct_products() {
        let mut rng = StdRng::seed_from_u64(2);
        let (a, b, rho) = (
            random_hermitian(&mut rng),
            random_hermitian(&mut rng),
            random_hermitian(&mut rng),
        );
        let a = a * Complex64::new(0.3, 0.7);
        let direct = a * rho * b;
        let via = unvectorize(&(sandwich(&a, &b) * vectorize(&rho)));
        assert!(max_abs(&(direct - via)) < 1e-14);
    }

    #[test]
    fn pauli_conventions() {
        let sp = sigma_plus(Qubit::First);
        let sm = sigma_minus(Qubit::First);
        // σ₊σ₋ on qubit 1 projects onto |e₁·⟩.
        let p = sp * sm;
        assert_eq!(p, projector(EE) + projector(EG));
        assert_eq!(sigma_z(Qubit::Second)[(EG, EG)], c(-1.0));
        let s = swap_operator();
        assert_eq!(s * sigma_plus(Qubit::First) * s, sigma_plus(Qubit::Second));
    }

    #[test]
    fn superoperator_examples() {
        let ops = build_superoperators();
        let mixed = Operator::identity() * c(0.25);
        let out = unvectorize(&(ops.j0 * vectorize(&mixed)));
        assert!(max_abs(&out) < 1e-15);

        let out = unvectorize(&(ops.k_minus * vectorize(&projector(EE))));
        assert!(max_abs(&(out - projector(GE) - projector(EG))) < 1e-15);

        let diag = Operator::from_diagonal(&nalgebra::Vector4::new(c(0.1), c(0.3), c(0.3), c(0.3)));
        let out = unvectorize(&(ops.j2 * vectorize(&diag)));
        for i in 0..4 {
            assert!(out[(i, i)].norm() < 1e-15);
        }
    }

    #[test]
    fn j0_and_j2_are_traceless() {
        let ops = build_superoperators();
        assert!(trace_row_residual(&ops.j0) < 1e-14);
        assert!(trace_row_residual(&ops.j2) < 1e-14);
    }

    #[test]
    fn liouvillian_examples() {
        let zero = CoefficientSet::ZERO;
        assert_eq!(liouvillian_independent(&zero).matrix, SuperMatrix::zeros());
        assert_eq!(liouvillian_common(&zero).matrix, SuperMatrix::zeros());

        let ops = build_superoperators();
        let l = liouvillian_independent(&CoefficientSet::new(1.0, 0.0, 0.0, 0.0));
        let expected = ops.identity * c(-4.0) + ops.k_minus * c(2.0) + ops.k_plus * c(2.0);
        assert!((l.matrix - expected).iter().all(|z| z.norm() < 1e-15));
        let out = l.apply(&(Operator::identity() * c(0.25)));
        assert!(max_abs(&out) < 1e-15);
    }

    #[test]
    fn common_minus_independent_is_collective_only() {
        let ops = build_superoperators();
        let cs = CoefficientSet::new(0.7, -0.3, 0.2, 0.45);
        let diff = liouvillian_common(&cs).matrix - liouvillian_independent(&cs).matrix;
        let expected = ops.j1 * c(-2.0 * 0.7)
            + ops.j2 * Complex64::new(0.0, -2.0 * 0.45)
            + ops.j_minus * c(2.0 * 0.9)
            + ops.j_plus * c(2.0 * 0.5);
        assert!((diff - expected).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn trace_and_hermiticity_preservation() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let cs = random_coefficients(&mut rng);
            let rho = random_hermitian(&mut rng);
            for kind in [ReservoirKind::Independent, ReservoirKind::Common] {
                let l = liouvillian(kind, &cs);
                assert!(l.trace_residual() < 1e-12);
                let out = l.apply(&rho);
                assert!(max_abs(&(out - out.adjoint())) < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_exchange_symmetry() {
        let s = swap_operator();
        let swap_super = sandwich(&s, &s);
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..20 {
            let cs = random_coefficients(&mut rng);
            for kind in [ReservoirKind::Independent, ReservoirKind::Common] {
                let l = liouvillian(kind, &cs).matrix;
                let conj = swap_super * l * swap_super;
                assert!((conj - l).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn independent_anti_diagonal_block_is_decoupled() {
        let anti = [
            vec_index(EE, GG),
            vec_index(EG, GE),
            vec_index(GE, EG),
            vec_index(GG, EE),
        ];
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let cs = random_coefficients(&mut rng);
            let l = liouvillian_independent(&cs).matrix;
            for &row in &anti {
                for col in 0..16 {
                    if col != row {
                        assert!(l[(row, col)].norm() < 1e-14, "row {row} col {col}");
                    }
                    if !anti.contains(&col) {
                        assert!(l[(col, row)].norm() < 1e-14);
                    }
                }
            }
            // Only the scalar -4κ₁ term (and the J₀ phase on ρ₁₄) survives:
            // the K superoperators leave the anti-diagonal untouched.
            let tol = 1e-14;
            let d14 = l[(anti[0], anti[0])] - Complex64::new(-4.0 * cs.kappa1, -4.0 * cs.kappa2);
            let d23 = l[(anti[1], anti[1])] - Complex64::new(-4.0 * cs.kappa1, 0.0);
            assert!(d14.norm() < tol && d23.norm() < tol);
            let k_only = l + SuperMatrix::identity() * c(4.0 * cs.kappa1)
                - superoperators().j0 * Complex64::new(0.0, -cs.kappa2);
            for &row in &anti {
                assert!(k_only[(row, row)].norm() < tol);
            }
        }
    }
}
