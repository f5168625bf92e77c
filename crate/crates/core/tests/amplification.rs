use proptest::prelude::*;
use qtransduce::amplify::{
    phase_flip, predicted_postamp, register_zero_flip_circuit, select_nu, source_flip_circuit, AmplificationSpec,
    Amplifier, NuRule, Predicate,
};
use qtransduce::ising::{build_boltzmann_synthesis, IsingLattice};
use qtransduce::simcore::{Circuit, Gate, RegisterLayout, StateVector};
use qtransduce::transduce::{build_synthesis, gamma_for_cutoff, transduction_layout, AmplitudeTable, TransductionPlan, Variant};

fn table_synthesis(alphas: &[f64], d: u32, variant: Variant) -> (Circuit, RegisterLayout) {
    let gamma = gamma_for_cutoff(0.01, d).unwrap();
    let table = AmplitudeTable::build(alphas, gamma, d, 0.01).unwrap();
    let plan = TransductionPlan::new(gamma, d, variant).unwrap();
    let layout = transduction_layout(table.n(), d, variant, false).unwrap();
    (build_synthesis(&table, &plan, &layout, false).unwrap(), layout)
}

fn check_rotation_law(circuit: Circuit, layout: &RegisterLayout, variant: Variant, rounds: u32) {
    let target = Predicate::register_equals(layout, variant.target_register(), 0).unwrap();
    let amp = Amplifier::new(&AmplificationSpec::new(circuit, target, 0));
    let mut s = StateVector::new(layout.total_qubits());
    amp.synthesize(&mut s).unwrap();
    let u = amp.target_probability(&s).sqrt();
    for nu in 1..=rounds {
        amp.iterate(&mut s).unwrap();
        let measured = amp.target_probability(&s);
        let predicted = predicted_postamp(u, nu);
        assert!((measured - predicted).abs() < 1e-6, "nu={nu}: {measured} vs {predicted}");
        assert!((s.norm() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rotation_law_on_tabulated_amplitudes(
        alphas in (1usize..=3).prop_flat_map(|n| proptest::collection::vec(0.01f64..=1.0, 1 << n)),
        d in 3u32..=4,
        controlled in any::<bool>(),
    ) {
        let variant = if controlled { Variant::Controlled } else { Variant::Direct };
        let (circuit, layout) = table_synthesis(&alphas, d, variant);
        check_rotation_law(circuit, &layout, variant, 10);
    }
}

#[test]
fn rotation_law_on_ising_circuits() {
    for (rows, cols) in [(2, 2), (2, 3)] {
        let lattice = IsingLattice::new(rows, cols, 0.3).unwrap();
        for variant in [Variant::Direct, Variant::Controlled] {
            let (circuit, layout, _) = build_boltzmann_synthesis(&lattice, lattice.auto_d(), variant).unwrap();
            check_rotation_law(circuit, &layout, variant, 6);
        }
    }
}

#[test]
fn gate_level_flips_match_predicates() {
    let layout = RegisterLayout::new(&[("D", 3), ("C", 3)]).unwrap();
    let mut prep = Circuit::new(layout.clone());
    for q in 0..6 {
        prep.push(Gate::ry(0.4 + 0.3 * q as f64, q)).unwrap();
        prep.push(Gate::phase(0.2 * q as f64, q)).unwrap();
    }
    prep.push(Gate::cx(0, 5)).unwrap();
    let mut s = StateVector::new(6);
    s.apply_circuit(&prep).unwrap();

    let mut by_gates = s.clone();
    by_gates.apply_circuit(&source_flip_circuit(&layout).unwrap()).unwrap();
    let mut by_predicate = s.clone();
    phase_flip(&mut by_predicate, &Predicate::AllZero);
    assert!(by_gates.distance(&by_predicate) < 1e-12);

    let mut by_gates = s.clone();
    by_gates.apply_circuit(&register_zero_flip_circuit(&layout, "D").unwrap()).unwrap();
    let mut by_predicate = s.clone();
    phase_flip(&mut by_predicate, &Predicate::register_equals(&layout, "D", 0).unwrap());
    assert!(by_gates.distance(&by_predicate) < 1e-12);
}

#[test]
fn rounded_rule_reproduces_table_round_counts() {
    let cases = [(0.167, 2), (0.063, 3), (0.016, 6), (0.487, 1), (0.182, 2), (0.048, 4)];
    for (u_sq, nu) in cases {
        assert_eq!(select_nu(f64::sqrt(u_sq), NuRule::Rounded).unwrap(), nu, "u^2 = {u_sq}");
    }
}

#[test]
fn optimal_rule_never_does_worse() {
    for i in 1..200 {
        let u = i as f64 / 200.0;
        let rounded = predicted_postamp(u, select_nu(u, NuRule::Rounded).unwrap());
        let optimal = predicted_postamp(u, select_nu(u, NuRule::Optimal).unwrap());
        assert!(optimal + 1e-12 >= rounded, "u = {u}");
    }
}
