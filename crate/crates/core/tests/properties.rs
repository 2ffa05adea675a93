use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use mubgme::correlations::{
    c_pattern_sum, i3, i4, i_value_oracle, joint_probability, lbps_quadripartite, lbps_tripartite,
    outcome_distribution, IndexPattern,
};
use mubgme::measures::{global_q, one_tangle, triangle_tau, OneTangleTriple};
use mubgme::mub::{best_family, prime_mub_family, qubit_mub_triple};
use mubgme::qla::{partial_trace, purity, reduced_rank, schmidt_coefficients};
use mubgme::states::{
    acin_canonical, ghz3, ghz4, random_biseparable_with, random_pure, random_pure_with, random_unitary, seeded_rng, w3,
    wg4, ACIN_SUPPORT,
};
use mubgme::{BasisAssignment, Bipartition, Complex64, DensityMatrix, Operator, StateVector};
use proptest::prelude::*;
use rand::Rng;

fn random_operator<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Operator {
    let data =
        (0..rows * cols).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    Operator::new(rows, cols, data).unwrap()
}

fn dress_locally<R: Rng>(psi: &StateVector, rng: &mut R) -> StateVector {
    let mut out = psi.clone();
    for (k, &d) in psi.dims().iter().enumerate() {
        out = out.apply_local(k, &random_unitary(d, rng)).unwrap();
    }
    out
}

fn random_setting<R: Rng>(dims: &[usize], rng: &mut R) -> BasisAssignment {
    let bases = dims
        .iter()
        .map(|&d| {
            let f = best_family(d).unwrap();
            f.bases()[rng.random_range(0..f.len())].clone()
        })
        .collect();
    BasisAssignment::new(bases).unwrap()
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_are_complete(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let rho = random_pure_with(&dims, &mut rng).unwrap().density();
        let setting = random_setting(&dims, &mut rng);
        let p = outcome_distribution(&rho, &setting).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(p.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn probabilities_are_linear(dims in dims_strategy(), seed in any::<u64>(), w in 0.0f64..=1.0) {
        let mut rng = seeded_rng(seed);
        let a = random_pure_with(&dims, &mut rng).unwrap().density();
        let b = random_pure_with(&dims, &mut rng).unwrap().density();
        let mix = DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)]).unwrap();
        let setting = random_setting(&dims, &mut rng);
        let total: usize = dims.iter().product();
        let outcome = IndexPattern(digits(rng.random_range(0..total), &dims));
        let lhs = joint_probability(&mix, &setting, &outcome).unwrap();
        let rhs = w * joint_probability(&a, &setting, &outcome).unwrap()
            + (1.0 - w) * joint_probability(&b, &setting, &outcome).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn pattern_sums_are_linear_and_c_max_convex(seed in any::<u64>(), w in 0.0f64..=1.0) {
        let mut rng = seeded_rng(seed);
        let a = random_pure_with(&[2, 2, 2], &mut rng).unwrap().density();
        let b = random_pure_with(&[2, 2, 2], &mut rng).unwrap().density();
        let mix = DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)]).unwrap();
        let h = BasisAssignment::hadamard(3);
        for set in lbps_tripartite() {
            let lhs = c_pattern_sum(&mix, &h, &set).unwrap();
            let rhs = w * c_pattern_sum(&a, &h, &set).unwrap() + (1.0 - w) * c_pattern_sum(&b, &h, &set).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
        let (ia, ib, im) = (i3(&a).unwrap().i_value, i3(&b).unwrap().i_value, i3(&mix).unwrap().i_value);
        prop_assert!(im <= w * ia + (1.0 - w) * ib + 1e-12);
    }

    #[test]
    fn schmidt_coefficients_survive_local_unitaries(da in 2usize..=4, db in 2usize..=4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let psi = random_pure_with(&[da, db], &mut rng).unwrap();
        let before = schmidt_coefficients(&psi).unwrap();
        let after = schmidt_coefficients(&dress_locally(&psi, &mut rng)).unwrap();
        prop_assert_eq!(before.len(), after.len());
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), r in prop::array::uniform3(1usize..=3), c in prop::array::uniform3(1usize..=3)) {
        let mut rng = seeded_rng(seed);
        let a = random_operator(r[0], c[0], &mut rng);
        let b = random_operator(r[1], c[1], &mut rng);
        let cc = random_operator(r[2], c[2], &mut rng);
        prop_assert!(a.kron(&b).kron(&cc).max_abs_diff(&a.kron(&b.kron(&cc))) <= 1e-14);
    }

    #[test]
    fn partial_trace_composes(dims in prop::collection::vec(2usize..=3, 3), seed in any::<u64>()) {
        let rho = random_pure(&dims, seed).unwrap().density();
        let step = partial_trace(&partial_trace(&rho, &[0, 1]).unwrap(), &[0]).unwrap();
        let direct = partial_trace(&rho, &[0]).unwrap();
        prop_assert!(step.matrix().max_abs_diff(direct.matrix()) <= 1e-12);
    }

    #[test]
    fn measures_survive_local_unitaries(theta in 0.0f64..FRAC_PI_2, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let g3 = ghz3(theta);
        let g4 = ghz4(theta);
        let t = triangle_tau(&g3).unwrap();
        let q = global_q(&g4).unwrap();
        prop_assert!((triangle_tau(&dress_locally(&g3, &mut rng)).unwrap() - t).abs() <= 1e-9);
        prop_assert!((global_q(&dress_locally(&g4, &mut rng)).unwrap() - q).abs() <= 1e-9);
    }

    #[test]
    fn local_phases_leave_computational_statistics_alone(seed in any::<u64>(), party in 0usize..3, phase in -3.0f64..3.0) {
        let mut rng = seeded_rng(seed);
        let psi = random_pure_with(&[2, 2, 2], &mut rng).unwrap();
        let diag = Operator::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, phase)]);
        let rotated = psi.apply_local(party, &diag).unwrap();
        let z = BasisAssignment::computational(3);
        let p = outcome_distribution(&psi.density(), &z).unwrap();
        let q = outcome_distribution(&rotated.density(), &z).unwrap();
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
        let t1 = i3(&psi.density()).unwrap().terms[0];
        let t2 = i3(&rotated.density()).unwrap().terms[0];
        prop_assert!((t1 - t2).abs() <= 1e-12);
    }

    #[test]
    fn acin_support_is_exact(weights in prop::array::uniform5(0.05f64..1.0), phi in 0.0f64..std::f64::consts::PI) {
        let psi = acin_canonical(weights, phi).unwrap();
        for (i, a) in psi.amplitudes().iter().enumerate() {
            prop_assert_eq!(ACIN_SUPPORT.contains(&i), a.norm() > 0.0);
        }
    }
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

#[test]
fn every_constructor_is_normalized() {
    let mut states = vec![ghz3(0.3), ghz4(1.1), w3(0.7, 0.4), acin_canonical([0.1, 0.2, 0.3, 0.4, 0.5], 1.0).unwrap()];
    states.push(wg4(0.6, 0.2, 0.4).0);
    for seed in 0..50 {
        states.push(random_pure(&[2, 3, 2], seed).unwrap());
    }
    for s in states {
        assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn pure_states_have_unit_purity() {
    for seed in 0..1000u64 {
        let n = 2 + (seed % 3) as usize;
        let rho = random_pure(&vec![2; n], seed).unwrap().density();
        assert!((purity(&rho) - 1.0).abs() <= 1e-10, "seed {seed}");
    }
}

#[test]
fn ghz_is_invariant_under_cyclic_relabeling() {
    for theta in [0.2, FRAC_PI_4, 1.3] {
        let g3 = ghz3(theta);
        assert_eq!(g3.permute_parties(&[1, 2, 0]).unwrap(), g3);
        let g4 = ghz4(theta);
        assert_eq!(g4.permute_parties(&[1, 2, 3, 0]).unwrap(), g4);
    }
}

#[test]
fn single_term_biseparable_states_are_product_across_the_cut() {
    let mut rng = seeded_rng(3);
    for n in [3, 4] {
        for cut in Bipartition::all(n) {
            let rho = random_biseparable_with(&cut, 1, &mut rng).unwrap();
            let side = partial_trace(&rho, cut.block()).unwrap();
            assert_eq!(reduced_rank(&side, 1e-9).unwrap(), 1, "{cut}");
        }
    }
}

#[test]
fn mub_families_are_valid() {
    let mut families = vec![qubit_mub_triple()];
    for d in [3, 5, 7] {
        let f = prime_mub_family(d).unwrap();
        assert_eq!(f.len(), d + 1);
        families.push(f);
    }
    for f in families {
        for b in f.bases() {
            assert!(b.orthonormality_error() <= 1e-10);
        }
        let bs = f.bases();
        for i in 0..bs.len() {
            for j in i + 1..bs.len() {
                assert!(mubgme::mub::is_unbiased(&bs[i], &bs[j], 1e-10).unwrap());
            }
        }
    }
}

#[test]
fn criteria_match_the_oracle_on_random_states() {
    let (z3, h3) = (BasisAssignment::computational(3), BasisAssignment::hadamard(3));
    let (z4, h4) = (BasisAssignment::computational(4), BasisAssignment::hadamard(4));
    let tri = lbps_tripartite();
    let quad = [lbps_quadripartite()];
    for seed in 0..1000u64 {
        let r3 = random_pure(&[2, 2, 2], seed).unwrap().density();
        let fast = i3(&r3).unwrap().i_value;
        assert!((fast - i_value_oracle(&r3, &z3, &h3, &tri).unwrap()).abs() <= 1e-10, "seed {seed}");
        let r4 = random_pure(&[2, 2, 2, 2], seed).unwrap().density();
        let fast = i4(&r4).unwrap().i_value;
        assert!((fast - i_value_oracle(&r4, &z4, &h4, &quad).unwrap()).abs() <= 1e-10, "seed {seed}");
    }
}

#[test]
fn measures_stay_in_range_on_the_state_families() {
    for k in 0..=200 {
        let theta = FRAC_PI_2 * k as f64 / 200.0;
        for psi in [ghz3(theta), w3(theta, FRAC_PI_4), acin_canonical([1.0, 0.3, 0.2, 0.1, theta], 0.5).unwrap()] {
            let radicand = OneTangleTriple::of(&psi).unwrap().heron_radicand();
            assert!(radicand >= -1e-8, "theta {theta}: {radicand}");
            assert!(triangle_tau(&psi).unwrap() >= 0.0);
        }
        for psi in [ghz4(theta), wg4(theta, 0.3, 0.2).0] {
            let q = global_q(&psi).unwrap();
            assert!((0.0..=1.0).contains(&q));
        }
        let one = partial_trace(&ghz3(theta).density(), &[1]).unwrap();
        assert!((0.0..=1.0).contains(&one_tangle(&one).unwrap()));
    }
}
