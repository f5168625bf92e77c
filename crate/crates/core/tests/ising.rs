use std::f64::consts::PI;

use num_complex::Complex64;
use qtransduce::analysis::{boltzmann_reference, exact_norms};
use qtransduce::ising::{build_ising_l, ising_layout, qft_circuit, synthesize_boltzmann, BoltzmannConfig, IsingLattice, Rounds};
use qtransduce::simcore::{Circuit, RegisterLayout, StateVector};
use qtransduce::transduce::Variant;

/// Runs the pair-counting circuit on the uniform superposition over `C` and
/// checks that every configuration lands on `D = Sigma / 2`.
fn check_pair_counting(rows: usize, cols: usize) {
    let lattice = IsingLattice::new(rows, cols, 0.1).unwrap();
    let d = lattice.auto_d();
    let layout = ising_layout(&lattice, d, Variant::Direct).unwrap();
    let mut circuit = Circuit::new(layout.clone());
    circuit.hadamard_register("C").unwrap();
    circuit.append(&build_ising_l(&lattice, d, &layout).unwrap()).unwrap();
    let mut s = StateVector::new(layout.total_qubits());
    s.apply_circuit(&circuit).unwrap();

    let c = layout.register("C").unwrap();
    let dreg = layout.register("D").unwrap();
    let a = layout.register("a").unwrap();
    let n = lattice.configurations() as f64;
    for l in 0..lattice.configurations() {
        let half = lattice.sigma_count(l) as u64 / 2;
        let idx = a.deposit(c.deposit(dreg.deposit(0, half), l), 1);
        let amp = s.amplitude(idx);
        assert!(
            (amp - Complex64::new(1.0 / n.sqrt(), 0.0)).norm() < 1e-10,
            "{rows}x{cols} config {l}: {amp}"
        );
    }
}

#[test]
fn pair_counting_is_exact_up_to_sixteen_sites() {
    for (r, c) in [(1, 2), (2, 2), (2, 3), (3, 3), (2, 5), (3, 4), (4, 4)] {
        check_pair_counting(r, c);
    }
}

#[test]
fn qft_matches_discrete_fourier_transform() {
    for w in 1..=5usize {
        let layout = RegisterLayout::new(&[("D", w)]).unwrap();
        let qft = qft_circuit(&layout, "D").unwrap();
        let dim = 1usize << w;
        for y in 0..dim {
            let mut s = StateVector::basis(w, y);
            s.apply_circuit(&qft).unwrap();
            for x in 0..dim {
                let want = Complex64::from_polar(1.0 / (dim as f64).sqrt(), 2.0 * PI * (x * y) as f64 / dim as f64);
                assert!((s.amplitude(x) - want).norm() < 1e-12, "w={w} y={y} x={x}");
            }
        }
    }
}

#[test]
fn gamma_reproduces_boltzmann_amplitudes() {
    for beta_j in [0.0, 0.1, 0.45, 1.2] {
        let lattice = IsingLattice::new(3, 3, beta_j).unwrap();
        let gamma = lattice.gamma();
        for l in 0..lattice.configurations() {
            let sigma = lattice.sigma_count(l) as f64;
            let via_gamma = gamma.powf(-sigma / 2.0);
            assert!((via_gamma - (-beta_j * sigma).exp()).abs() < 1e-12);
        }
    }
}

#[test]
fn post_selected_distribution_is_boltzmann() {
    for (rows, cols, beta_j) in [(2, 2, 0.1), (2, 3, 0.4), (3, 3, 0.1)] {
        let lattice = IsingLattice::new(rows, cols, beta_j).unwrap();
        for variant in [Variant::Direct, Variant::Controlled] {
            let mut config = BoltzmannConfig::new(lattice.clone(), variant);
            config.rounds = Rounds::None;
            let run = synthesize_boltzmann(&config).unwrap();
            let target = run.layout.register(variant.target_register()).unwrap();
            let c = run.layout.register("C").unwrap();
            let mut p = vec![0.0; lattice.configurations() as usize];
            for (i, a) in run.state.amplitudes().iter().enumerate() {
                if target.extract(i) == 0 {
                    p[c.extract(i) as usize] += a.norm_sqr();
                }
            }
            let total: f64 = p.iter().sum();
            let reference = boltzmann_reference(&lattice).unwrap();
            for (got, want) in p.iter().zip(&reference.probabilities) {
                assert!((got / total - want).abs() < 1e-9);
            }
            assert!((run.diagnostics.u_sq - run.diagnostics.u_sq_oracle).abs() < 1e-9);
        }
    }
}

#[test]
fn reference_distributions_are_normalized() {
    for (r, c, b) in [(2, 2, 0.1), (3, 3, 0.7), (4, 4, 0.05), (4, 4, 2.0 / 2.269)] {
        let lattice = IsingLattice::new(r, c, b).unwrap();
        let reference = boltzmann_reference(&lattice).unwrap();
        assert!((reference.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((reference.magnetization.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn magnetization_mode_follows_temperature() {
    let beta_c = 2.269;
    let hot = boltzmann_reference(&IsingLattice::square(4, 0.1 / beta_c).unwrap()).unwrap();
    let cold = boltzmann_reference(&IsingLattice::square(4, 2.0 / beta_c).unwrap()).unwrap();
    let mode = |m: &std::collections::BTreeMap<i32, f64>| {
        m.iter().max_by(|a, b| a.1.total_cmp(b.1)).map(|(&k, _)| k.abs()).unwrap()
    };
    assert_eq!(mode(&hot.magnetization), 0);
    assert_eq!(mode(&cold.magnetization), 16);
}

#[test]
fn two_by_two_controlled_norm_from_histogram() {
    let lattice = IsingLattice::square(2, 0.1).unwrap();
    let lambdas: Vec<u64> = (0..16).map(|l| lattice.sigma_count(l) as u64 / 2).collect();
    let norms = exact_norms(&lambdas, lattice.gamma(), 3, Variant::Controlled).unwrap();
    let by_hand = (2.0 + 12.0 * (-0.8f64).exp() + 2.0 * (-1.6f64).exp()) / 16.0;
    assert!((norms.u * norms.u - by_hand).abs() < 1e-12);
    assert!((by_hand - 0.4872).abs() < 1e-4);
}
