use std::io::Cursor;

use approx::assert_abs_diff_eq;
use qthermo::states::{
    bell_diagonal, bell_weights, fidelity, ghz_classifier, noisy_ghz, noisy_ghz_spectrum,
    pseudo_pure, pure_state, read_matrix, trace_distance, werner, werner_purity_at,
    werner_spectrum, write_matrix, BellDiagonalParams, DensityOperator, GhzClass, NoisyGhzParams,
};
use qthermo::tensor::{C64, ComplexMatrix};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

#[test]
fn bell_weights_are_a_probability_vector() {
    for &(beta, gamma) in &[(0.0, 0.0), (0.7, 2.1), (std::f64::consts::PI, 1.0)] {
        let w = bell_weights(BellDiagonalParams::new(beta, gamma).unwrap());
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        assert!(w.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }
}

#[test]
fn bell_diagonal_spectrum_equals_its_weights() {
    let params = BellDiagonalParams::new(2.0 * std::f64::consts::PI / 5.0, 0.3 * std::f64::consts::PI)
        .unwrap();
    let rho = bell_diagonal(params);
    let expected = sorted_desc(bell_weights(params).to_vec());
    for (got, want) in rho.spectrum().unwrap().iter().zip(&expected) {
        assert_abs_diff_eq!(got, want, epsilon = 1e-12);
    }
}

#[test]
fn bell_diagonal_marginals_are_maximally_mixed() {
    let rho = bell_diagonal(BellDiagonalParams::new(1.1, 0.4).unwrap());
    for keep in [[1], [2]] {
        let marginal = rho.marginal(&keep).unwrap();
        assert!(marginal.matrix().max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.5])) < 1e-12);
    }
}

#[test]
fn bell_params_enforce_the_angle_box() {
    assert!(BellDiagonalParams::new(-0.1, 0.0).is_err());
    assert!(BellDiagonalParams::new(0.0, 3.5).is_err());
    assert!(BellDiagonalParams::new(f64::NAN, 0.0).is_err());
}

#[test]
fn noisy_ghz_matches_its_published_matrix_elements() {
    let lambda = 0.37;
    let n = 3;
    let rho = noisy_ghz(NoisyGhzParams::new(lambda, n).unwrap());
    let dim = 1 << n;
    let bg = (1.0 - lambda) / dim as f64;
    let m = rho.matrix();
    for d in 0..dim {
        let want = if d == 0 || d == dim - 1 { bg + lambda / 2.0 } else { bg };
        assert_abs_diff_eq!(m.get(d, d).re, want, epsilon = 1e-14);
    }
    assert_abs_diff_eq!(m.get(0, dim - 1).re, lambda / 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(m.get(dim - 1, 0).re, lambda / 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(m.get(0, 1).re, 0.0);
}

#[test]
fn noisy_ghz_spectrum_closed_form_matches_the_solver() {
    for &(lambda, n) in &[(0.0, 2), (0.3, 3), (0.9, 4), (1.0, 2)] {
        let params = NoisyGhzParams::new(lambda, n).unwrap();
        let formula = noisy_ghz_spectrum(params);
        let solved = noisy_ghz(params).spectrum().unwrap();
        for (a, b) in formula.iter().zip(&solved) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }
}

#[test]
fn noisy_ghz_marginal_is_a_two_level_diagonal() {
    // Any kappa-qubit marginal: background (1 - lambda)/2^kappa everywhere,
    // plus lambda/2 on the all-zeros and all-ones states.
    let lambda = 0.6;
    let rho = noisy_ghz(NoisyGhzParams::new(lambda, 4).unwrap());
    for keep in [vec![1], vec![2, 3], vec![1, 2, 4]] {
        let marginal = rho.marginal(&keep).unwrap();
        let dim = 1usize << keep.len();
        let bg = (1.0 - lambda) / dim as f64;
        for d in 0..dim {
            let want = if d == 0 || d == dim - 1 { bg + lambda / 2.0 } else { bg };
            assert_abs_diff_eq!(marginal.matrix().get(d, d).re, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(marginal.matrix().get(0, dim - 1).norm(), 0.0, epsilon = 1e-12);
    }
}

#[test]
fn noisy_ghz_params_validate_their_ranges() {
    assert!(NoisyGhzParams::new(-0.01, 3).is_err());
    assert!(NoisyGhzParams::new(1.01, 3).is_err());
    assert!(NoisyGhzParams::new(0.5, 1).is_err());
}

#[test]
fn werner_spectrum_closed_form_matches_the_solver() {
    for &lambda in &[0.0, 0.25, 1.0 / 3.0, 0.8, 1.0] {
        let formula = werner_spectrum(lambda);
        let solved = werner(lambda).unwrap().spectrum().unwrap();
        for (a, b) in formula.iter().zip(&solved) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }
    assert!(werner(-0.1).is_err());
    assert!(werner(1.1).is_err());
}

#[test]
fn werner_marginals_are_maximally_mixed() {
    let rho = werner(0.77).unwrap();
    for keep in [[1], [2]] {
        let marginal = rho.marginal(&keep).unwrap();
        assert!(marginal.matrix().max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.5])) < 1e-12);
    }
}

#[test]
fn lls_purity_decays_exponentially() {
    assert_abs_diff_eq!(werner_purity_at(0.0, 10.0).unwrap(), 1.0);
    assert_abs_diff_eq!(werner_purity_at(10.0, 10.0).unwrap(), (-1.0f64).exp(), epsilon = 1e-14);
    assert!(werner_purity_at(1.0, 0.0).is_err());
    assert!(werner_purity_at(-1.0, 10.0).is_err());
}

#[test]
fn ghz_classifier_uses_the_published_boundaries() {
    // N = 3: separable iff lambda <= 1/5, genuinely multipartite entangled
    // iff lambda > 3/7.
    let class = |lambda: f64| ghz_classifier(NoisyGhzParams::new(lambda, 3).unwrap());
    assert_eq!(class(0.0), GhzClass::FullySeparable);
    assert_eq!(class(0.2), GhzClass::FullySeparable);
    assert_eq!(class(0.21), GhzClass::BiseparableRegion);
    assert_eq!(class(3.0 / 7.0), GhzClass::BiseparableRegion);
    assert_eq!(class(0.43), GhzClass::GenuinelyEntangled);
    assert_eq!(class(1.0), GhzClass::GenuinelyEntangled);
}

#[test]
fn pseudo_pure_interpolates_between_identity_and_projector() {
    let psi = [re(1.0), re(0.0), re(0.0), re(0.0)];
    let mixed = pseudo_pure(&psi, 0.0).unwrap();
    assert!(mixed.matrix().max_abs_diff(&ComplexMatrix::from_diag(&[0.25; 4])) < 1e-14);

    let pure = pseudo_pure(&psi, 1.0).unwrap();
    assert_abs_diff_eq!(pure.matrix().get(0, 0).re, 1.0, epsilon = 1e-14);

    let half = pseudo_pure(&psi, 0.5).unwrap();
    assert_abs_diff_eq!(half.matrix().get(0, 0).re, 0.5 + 0.125, epsilon = 1e-14);

    assert!(pseudo_pure(&psi, 1.5).is_err());
    assert!(pseudo_pure(&[re(1.0), re(1.0)], 1.0).is_err(), "unnormalized vector");
    assert!(pseudo_pure(&[re(1.0), re(0.0), re(0.0)], 1.0).is_err(), "dim not a power of two");
}

#[test]
fn fidelity_recognizes_equal_orthogonal_and_mixed_pairs() {
    let ground = pure_state(&[re(1.0), re(0.0)]).unwrap();
    let excited = pure_state(&[re(0.0), re(1.0)]).unwrap();
    assert_abs_diff_eq!(fidelity(&ground, &ground).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(fidelity(&ground, &excited).unwrap(), 0.0, epsilon = 1e-12);

    // Pure vs mixed: F = <psi| rho |psi>.
    let mixed = DensityOperator::new(ComplexMatrix::from_diag(&[0.8, 0.2]), 1).unwrap();
    assert_abs_diff_eq!(fidelity(&ground, &mixed).unwrap(), 0.8, epsilon = 1e-12);
    assert_abs_diff_eq!(
        fidelity(&mixed, &ground).unwrap(),
        fidelity(&ground, &mixed).unwrap(),
        epsilon = 1e-12
    );
}

#[test]
fn trace_distance_is_zero_on_equal_and_one_on_orthogonal_states() {
    let ground = pure_state(&[re(1.0), re(0.0)]).unwrap();
    let excited = pure_state(&[re(0.0), re(1.0)]).unwrap();
    assert_abs_diff_eq!(trace_distance(&ground, &ground).unwrap(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(trace_distance(&ground, &excited).unwrap(), 1.0, epsilon = 1e-14);
    let w = werner(0.5).unwrap();
    assert_abs_diff_eq!(trace_distance(&w, &w).unwrap(), 0.0, epsilon = 1e-14);
}

#[test]
fn density_operator_invariants_reject_bad_matrices() {
    // Trace 2.
    assert!(DensityOperator::new(ComplexMatrix::identity(2), 1).is_err());
    // Non-hermitian.
    let mut m = ComplexMatrix::from_diag(&[0.5, 0.5]);
    m.set(0, 1, re(0.3));
    assert!(DensityOperator::new(m, 1).is_err());
    // Negative eigenvalue.
    assert!(DensityOperator::new(ComplexMatrix::from_diag(&[1.5, -0.5]), 1).is_err());
    // Wrong qubit count for the dimension.
    assert!(DensityOperator::new(ComplexMatrix::from_diag(&[0.5, 0.5]), 2).is_err());
}

#[test]
fn matrix_files_round_trip_exactly_enough() {
    let rho = bell_diagonal(BellDiagonalParams::new(0.9, 2.2).unwrap());
    let mut buf = Vec::new();
    write_matrix(&mut buf, &rho).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("qubits 2"), "header line, got: {text}");

    let back = read_matrix(&mut Cursor::new(buf)).unwrap();
    assert_eq!(back.qubit_count(), 2);
    assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);
}

#[test]
fn matrix_reader_rejects_malformed_input() {
    assert!(read_matrix(&mut Cursor::new(b"no header\n".to_vec())).is_err());
    assert!(read_matrix(&mut Cursor::new(b"qubits 1\n1.0\n".to_vec())).is_err(), "truncated row");
    // Valid layout but trace 2: the state invariants must fire.
    let bad = b"qubits 1\n1+0j 0+0j\n0+0j 1+0j\n".to_vec();
    assert!(read_matrix(&mut Cursor::new(bad)).is_err());
}
