use proptest::prelude::*;

use qtel_core::matrix::ComplexMatrix;
use qtel_core::pauli::i_power;
use qtel_core::random::{random_perfect_channel, random_state, random_unitary, seeded};
use qtel_core::teleport::run_protocol;
use qtel_core::{concurrence_2q, BellBasis, Channel, Mode, PauliString, Tolerance, C64};

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
        ComplexMatrix::from_row_major(
            rows,
            cols,
            v.into_iter().map(|(re, im)| C64::new(re, im)).collect(),
        )
        .unwrap()
    })
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (0..1usize << (2 * n), 0u8..4).prop_map(move |(alpha, phase)| {
        PauliString::from_alpha(alpha, n).unwrap().with_phase(phase)
    })
}

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dagger_is_involution(m in complex_matrix(3, 4)) {
        prop_assert_eq!(m.dagger().dagger(), m);
    }

    #[test]
    fn trace_is_cyclic(a in complex_matrix(4, 4), b in complex_matrix(4, 4)) {
        let ab = a.matmul(&b).unwrap().trace().unwrap();
        let ba = b.matmul(&a).unwrap().trace().unwrap();
        prop_assert!((ab - ba).norm() < 1e-12);
    }

    #[test]
    fn kron_is_associative(a in complex_matrix(2, 2), b in complex_matrix(2, 1), c in complex_matrix(1, 2)) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-15);
    }

    #[test]
    fn product_matches_dense(p in pauli_string(3), q in pauli_string(3)) {
        let dense = p.matrix().matmul(&q.matrix()).unwrap();
        let symbolic = p.product(&q).unwrap().matrix();
        prop_assert!(dense.max_abs_diff(&symbolic).unwrap() < 1e-12);
    }

    #[test]
    fn commutation_matches_dense(p in pauli_string(3), q in pauli_string(3)) {
        let pq = p.matrix().matmul(&q.matrix()).unwrap();
        let qp = q.matrix().matmul(&p.matrix()).unwrap();
        let dense = pq.max_abs_diff(&qp).unwrap() < 1e-12;
        prop_assert_eq!(p.commutes(&q).unwrap(), dense);
    }

    #[test]
    fn hermitian_strings_square_to_identity(p in pauli_string(2)) {
        let sq = p.matrix().matmul(&p.matrix()).unwrap();
        let want = ComplexMatrix::identity(4).scale(i_power(2 * p.phase_power() as u32));
        prop_assert!(sq.max_abs_diff(&want).unwrap() < 1e-12);
        if p.is_hermitian() {
            prop_assert!(sq.max_abs_diff(&ComplexMatrix::identity(4)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn parse_display_round_trip(p in pauli_string(3)) {
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn concurrence_oracle(seed in any::<u64>()) {
        let s = random_state(&mut seeded(seed), 2).unwrap();
        let a = s.amplitudes();
        let oracle = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        prop_assert!((concurrence_2q(&s).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn perfection_invariant_under_b_side_unitary(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let ch = random_perfect_channel(&mut rng, 2).unwrap();
        let v = random_unitary(&mut rng, 4);
        // Acting on B multiplies E from the right by Vᵀ.
        let rotated = Channel::from_matrix(ch.e_matrix().matmul(&v.transpose()).unwrap(), tol()).unwrap();
        prop_assert!(rotated.is_perfect(tol()).holds);
        let info = random_state(&mut rng, 2).unwrap();
        let run = run_protocol(&info, &rotated, &BellBasis::standard(2).unwrap(), Mode::Exhaustive, tol()).unwrap();
        prop_assert!(run.records.iter().all(|r| (r.fidelity.unwrap() - 1.0).abs() < 1e-9));
    }

    #[test]
    fn probability_is_conserved(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded(seed);
        let state = random_state(&mut rng, 2 * n).unwrap();
        let ch = Channel::from_state(state, n, tol()).unwrap();
        let info = random_state(&mut rng, n).unwrap();
        let run = run_protocol(&info, &ch, &BellBasis::standard(n).unwrap(), Mode::Exhaustive, tol()).unwrap();
        prop_assert!((run.total_probability() - 1.0).abs() < 1e-12);
        prop_assert!(run.records.iter().all(|r| r.probability >= 0.0));
    }

    #[test]
    fn global_phase_is_irrelevant(seed in any::<u64>(), theta in 0.0f64..std::f64::consts::TAU) {
        let mut rng = seeded(seed);
        let ch = Channel::from_state(random_state(&mut rng, 2).unwrap(), 1, tol()).unwrap();
        let info = random_state(&mut rng, 1).unwrap();
        let basis = BellBasis::standard(1).unwrap();
        let a = run_protocol(&info, &ch, &basis, Mode::Exhaustive, tol()).unwrap();
        let b = run_protocol(&info.scale(C64::from_polar(1.0, theta)), &ch, &basis, Mode::Exhaustive, tol()).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            prop_assert!((x.probability - y.probability).abs() < 1e-12);
            if let (Some(fx), Some(fy)) = (x.fidelity, y.fidelity) {
                prop_assert!((fx - fy).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reshape_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let s = random_state(&mut seeded(seed), 2 * n).unwrap();
        let m = s.to_matrix(n).unwrap();
        prop_assert_eq!(qtel_core::StateVector::from_matrix(&m).unwrap(), s);
    }
}
