//! Two-qubit quantum discord dynamics in structured thermal reservoirs.
//!
//! The crate propagates a two-qubit density matrix under the secular,
//! time-local non-Markovian master equations for two qubits coupled either to
//! independent reservoirs or to one common reservoir, and tracks the quantum
//! discord of the evolving state.
//!
//! Units: the qubit transition frequency is 1, so times are `ω_a t` and
//! frequencies are multiples of `ω_a`.
//!
//! Module map:
//!
//! * [`spectral`]: Ohmic-class spectral densities and thermal factors.
//! * [`coeffs`]: the time-dependent coefficients κ₁, κ₂, μ₁, μ₂.
//! * [`liouville`]: 16×16 superoperator matrices and the two Liouvillians.
//! * [`state`]: density matrices and the preset initial states.
//! * [`propagator`]: RK4 propagation and the factorized analytic solution.
//! * [`discord`]: entropies, mutual information and quantum discord.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeffs;
pub mod discord;
pub mod error;
pub mod liouville;
pub mod propagator;
pub mod quadrature;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
