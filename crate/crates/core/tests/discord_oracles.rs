use discord_dyn::discord::{
    classical_correlation, mutual_information, quantum_discord, quantum_discord_with, qubit_entropy, DiscordOptions,
    MeasurementBasis,
};
use discord_dyn::liouville::{Operator, Qubit};
use discord_dyn::state::DensityMatrix;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn werner(p: f64) -> DensityMatrix {
    let bell = DensityMatrix::bell_psi_plus().into_matrix();
    DensityMatrix::new(bell * c(p, 0.0) + Operator::identity() * c((1.0 - p) / 4.0, 0.0)).unwrap()
}

fn random_state(entries: &[f64]) -> Option<DensityMatrix> {
    let g = Matrix4::from_fn(|i, j| c(entries[2 * (4 * i + j)], entries[2 * (4 * i + j) + 1]));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    if tr < 1e-3 {
        return None;
    }
    Some(DensityMatrix::new(m / c(tr, 0.0)).unwrap())
}

fn random_su2(rng: &mut StdRng) -> Matrix2<Complex64> {
    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let b: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let t: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let (s, co) = t.sin_cos();
    Matrix2::new(
        Complex64::from_polar(co, a + b),
        Complex64::from_polar(s, a - b),
        -Complex64::from_polar(s, b - a),
        Complex64::from_polar(co, -a - b),
    )
}

/// Information about qubit 1 gained by measuring qubit 2 in `basis`.
fn information_gain(rho: &DensityMatrix, basis: MeasurementBasis) -> f64 {
    let m = rho.matrix();
    let s_a = qubit_entropy(&rho.reduced_first()).unwrap();
    let (p0, p1) = basis.projectors();
    let mut conditional = 0.0;
    for proj in [p0, p1] {
        let op = Matrix2::<Complex64>::identity().kronecker(&proj);
        let post = op * m * op;
        let mut block = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                block[(i, j)] = post[(2 * i, 2 * j)] + post[(2 * i + 1, 2 * j + 1)];
            }
        }
        let p = block.trace().re;
        if p > 1e-14 {
            conditional += p * qubit_entropy(&(block / c(p, 0.0))).unwrap();
        }
    }
    s_a - conditional
}

#[test]
fn werner_discord_matches_closed_form() {
    for p in [0.1, 0.5, 0.9] {
        let r = quantum_discord(&werner(p)).unwrap();
        let j = 0.5 * ((1.0 + p) * (1.0 + p).log2() + (1.0 - p) * (1.0 - p).log2());
        let l0 = (1.0 + 3.0 * p) / 4.0;
        let l1 = (1.0 - p) / 4.0;
        let mi = 2.0 + l0 * l0.log2() + 3.0 * l1 * l1.log2();
        assert!((r.mutual_information - mi).abs() < 1e-12, "p={p}");
        assert!((r.classical_correlation - j).abs() < 1e-9, "p={p}");
        assert!((r.discord - (mi - j)).abs() < 1e-9, "p={p}");
    }
}

#[test]
fn optimizer_beats_a_million_random_bases() {
    let rho = werner(0.5);
    let (j, _) = classical_correlation(&rho, &DiscordOptions::default()).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..1_000_000 {
        let z: f64 = rng.random_range(-1.0..1.0);
        let basis = MeasurementBasis {
            theta: z.acos(),
            phi: rng.random_range(0.0..std::f64::consts::TAU),
        };
        best = best.max(information_gain(&rho, basis));
    }
    assert!(best <= j + 1e-12, "random search {best} beat optimizer {j}");
    assert!(j - best < 1e-4, "optimizer {j} vs random search {best}");
}

#[test]
fn discord_is_invariant_under_local_unitaries() {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut states = vec![DensityMatrix::bell_psi_plus(), werner(0.3)];
    while states.len() < 5 {
        let entries: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        states.extend(random_state(&entries));
    }
    for rho in &states {
        let d0 = quantum_discord(rho).unwrap().discord;
        for _ in 0..20 {
            let u = random_su2(&mut rng).kronecker(&random_su2(&mut rng));
            let rotated = DensityMatrix::new(u * rho.matrix() * u.adjoint()).unwrap();
            let d = quantum_discord(&rotated).unwrap().discord;
            assert!((d - d0).abs() < 1e-6, "{d} vs {d0}");
        }
    }
}

#[test]
fn swapping_the_qubits_swaps_the_measured_side() {
    let mut rng = StdRng::seed_from_u64(11);
    let entries: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rho = random_state(&entries).unwrap();
    let first = DiscordOptions {
        measured: Qubit::First,
        ..DiscordOptions::default()
    };
    let a = quantum_discord_with(&rho, &first).unwrap().discord;
    let b = quantum_discord(&rho.swapped()).unwrap().discord;
    assert!((a - b).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn correlations_are_bounded(entries in prop::collection::vec(-1.0f64..1.0, 32)) {
        let Some(rho) = random_state(&entries) else { return Ok(()); };
        let r = quantum_discord_with(&rho, &DiscordOptions::with_grid(16)).unwrap();
        let s_a = qubit_entropy(&rho.reduced_first()).unwrap();
        prop_assert!(r.mutual_information >= -1e-12);
        prop_assert!(r.mutual_information <= 2.0 + 1e-12);
        prop_assert!((r.mutual_information - mutual_information(&rho).unwrap()).abs() < 1e-12);
        prop_assert!(r.classical_correlation >= -1e-12);
        prop_assert!(r.classical_correlation <= s_a + 1e-12);
        prop_assert!(r.discord >= 0.0 && r.discord <= r.mutual_information);
        prop_assert!(r.discord <= 1.0 + 1e-9);
    }

    #[test]
    fn reported_basis_attains_the_correlation(entries in prop::collection::vec(-1.0f64..1.0, 32)) {
        let Some(rho) = random_state(&entries) else { return Ok(()); };
        let (j, basis) = classical_correlation(&rho, &DiscordOptions::with_grid(16)).unwrap();
        prop_assert!((information_gain(&rho, basis) - j).abs() < 1e-10);
    }
}
