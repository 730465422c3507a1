mod common;

use common::*;
use lyapunov_maxcut::dynamics::{FeedbackSimulation, RunConfig};
use lyapunov_maxcut::graph::{gen_erdos_renyi, Graph};
use lyapunov_maxcut::hamiltonian::{build_maxcut, commutator_terms};
use lyapunov_maxcut::quantum::{
    apply_diagonal_phase, apply_rx, apply_ryz, apply_rzz, expectation_pauli, feedback_observable, ObservableTerms, Pauli,
    PauliString, StateVector,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let mut amps: Vec<Complex64> =
        (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(amps).unwrap()
}

fn random_string(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let ops: Vec<(usize, Pauli)> = (0..n)
        .filter_map(|q| match rng.gen_range(0..4) {
            0 => None,
            1 => Some((q, Pauli::X)),
            2 => Some((q, Pauli::Y)),
            _ => Some((q, Pauli::Z)),
        })
        .collect();
    PauliString::new(ops).unwrap()
}

fn distinct_pair(n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

#[test]
fn pauli_expectations_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let n = rng.gen_range(1..=5);
        let psi = random_state(n, &mut rng);
        let terms = ObservableTerms::from_terms((0..4).map(|_| (rng.gen_range(-2.0..2.0), random_string(n, &mut rng))));
        let dense = expect(&to_vector(&psi), &terms_matrix(&terms, n));
        assert!((expectation_pauli(&psi, &terms).unwrap() - dense).abs() < TOL);
    }
}

#[test]
fn gates_match_matrix_exponentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let n = rng.gen_range(2..=5);
        let theta = rng.gen_range(-3.0..3.0);
        let psi = random_state(n, &mut rng);
        let v = to_vector(&psi);

        let q = rng.gen_range(0..n);
        let mut s = psi.clone();
        apply_rx(&mut s, q, theta).unwrap();
        let want = expm(&pauli_matrix(&[(q, Pauli::X)], n), theta) * &v;
        assert!(max_abs_diff(&to_vector(&s), &want) < TOL);

        let (a, b) = distinct_pair(n, &mut rng);
        let mut s = psi.clone();
        apply_rzz(&mut s, a, b, theta).unwrap();
        let want = expm(&pauli_matrix(&[(a, Pauli::Z), (b, Pauli::Z)], n), theta) * &v;
        assert!(max_abs_diff(&to_vector(&s), &want) < TOL);

        let mut s = psi.clone();
        apply_ryz(&mut s, a, b, theta).unwrap();
        let want = expm(&pauli_matrix(&[(a, Pauli::Y), (b, Pauli::Z)], n), theta) * &v;
        assert!(max_abs_diff(&to_vector(&s), &want) < TOL);
    }
}

#[test]
fn maxcut_phase_and_diagonal_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for seed in 0..15 {
        let n = rng.gen_range(2..=6);
        let g = gen_erdos_renyi(n, 0.6, seed).unwrap();
        let h = build_maxcut(&g).unwrap();
        let dense = maxcut_matrix(&g);
        for x in 0..1 << n {
            assert!((dense[(x, x)].re - h.diag()[x] as f64).abs() < TOL);
        }
        assert!((&terms_matrix(&h.pauli_terms(), n) - &dense).norm() < TOL);

        let gamma = rng.gen_range(-2.0..2.0);
        let psi = random_state(n, &mut rng);
        let mut s = psi.clone();
        h.evolve(&mut s, gamma).unwrap();
        let want = expm(&dense, gamma) * to_vector(&psi);
        assert!(max_abs_diff(&to_vector(&s), &want) < TOL);

        let mut s = psi.clone();
        apply_diagonal_phase(&mut s, h.diag(), gamma).unwrap();
        assert!(max_abs_diff(&to_vector(&s), &want) < TOL);
    }
}

#[test]
fn commutator_terms_match_dense_commutator() {
    for seed in 0..20 {
        let n = 2 + (seed as usize % 5);
        let g = gen_erdos_renyi(n, 0.5, seed).unwrap();
        let h = build_maxcut(&g).unwrap();
        let hm = maxcut_matrix(&g);
        let pairs: Vec<(usize, usize)> = g.edges().to_vec();
        for mixer in [ObservableTerms::x_mixer(n), ObservableTerms::yz_mixer(&pairs).unwrap()] {
            let a = terms_matrix(&mixer, n);
            let want = (&a * &hm - &hm * &a) * Complex64::new(0.0, 1.0);
            let got = terms_matrix(&commutator_terms(&mixer, &h).unwrap(), n);
            assert!((got - want).norm() < TOL, "seed {seed}");
        }
    }
}

#[test]
fn feedback_observable_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for seed in 0..30 {
        let n = rng.gen_range(2..=6);
        let g = gen_erdos_renyi(n, 0.5, seed).unwrap();
        let h = build_maxcut(&g).unwrap();
        let hm = maxcut_matrix(&g);
        let psi = random_state(n, &mut rng);
        let v = to_vector(&psi);
        let mixer = ObservableTerms::from_terms((0..3).map(|_| (rng.gen_range(-1.0..1.0), random_string(n, &mut rng))));
        let want = commutator_expectation(&v, &terms_matrix(&mixer, n), &hm);
        assert!((feedback_observable(&psi, &mixer, h.diag()).unwrap() - want).abs() < TOL);
    }
}

fn compare_run(g: &Graph, cfg: &RunConfig, steps: usize) {
    let h = build_maxcut(g).unwrap();
    let dense = dense_run(g, cfg, steps);
    let mut sim = FeedbackSimulation::new(&h, cfg, None).unwrap();
    for (p, d) in dense.iter().enumerate() {
        let tr = sim.advance().unwrap();
        assert_eq!(tr.step, p + 1);
        assert!(max_abs_diff(&to_vector(sim.state()), &d.state) < TOL, "state at step {}", p + 1);
        assert!((tr.hf_exp - d.hf).abs() < TOL);
        assert!((sim.observable() - d.o).abs() < TOL);
        assert!((tr.lambda_lb - d.lambda).abs() < TOL);
        assert!((tr.two_param_lb - d.two_param).abs() < TOL);
    }
}

#[test]
fn qaoa_feedback_run_matches_dense() {
    for seed in 0..6 {
        let g = gen_erdos_renyi(3 + seed as usize % 4, 0.6, seed).unwrap();
        // a large β makes the feedback visible within a few steps
        let mut cfg = RunConfig { rounds: 40, ..RunConfig::default() };
        cfg.beta.c = 2.0;
        compare_run(&g, &cfg, 40);
    }
}

#[test]
fn light_cone_run_matches_dense() {
    for seed in 0..6 {
        let g = gen_erdos_renyi(3 + seed as usize % 4, 0.6, seed).unwrap();
        for feedback in [true, false] {
            let cfg = RunConfig { lightcone_feedback: feedback, ..RunConfig::light_cone() };
            compare_run(&g, &cfg, 30);
        }
    }
}
