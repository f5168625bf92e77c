use proptest::prelude::*;
use qtransduce::analysis::{exact_norms, exact_norms_masked};
use qtransduce::simcore::{RegisterLayout, StateVector};
use qtransduce::transduce::{
    build_synthesis, build_t1, build_t2, gamma_for_cutoff, phi_product, transduction_layout, AmplitudeTable,
    TransductionPlan, Variant,
};

fn t1_amplitude(gamma: f64, d: u32, lambda: u64) -> f64 {
    let plan = TransductionPlan::new(gamma, d, Variant::Direct).unwrap();
    let layout = RegisterLayout::new(&[("D", d as usize)]).unwrap();
    let mut s = StateVector::basis(d as usize, lambda as usize);
    s.apply_circuit(&build_t1(&plan, &layout).unwrap()).unwrap();
    let amp = s.amplitude(0);
    assert!(amp.im.abs() < 1e-15);
    amp.re
}

fn t2_amplitude(gamma: f64, d: u32, lambda: u64) -> f64 {
    let plan = TransductionPlan::new(gamma, d, Variant::Controlled).unwrap();
    let layout = RegisterLayout::new(&[("D", d as usize), ("E", d as usize)]).unwrap();
    let mut s = StateVector::basis(2 * d as usize, lambda as usize);
    s.apply_circuit(&build_t2(&plan, &layout).unwrap()).unwrap();
    let amp = s.amplitude(lambda as usize);
    assert!(amp.im.abs() < 1e-15);
    amp.re
}

#[test]
fn direct_identity_for_every_lambda() {
    for d in 1..=8u32 {
        for gamma in [1.001f64, 1.05, 1.5, 2.0, 7.0] {
            let phi = phi_product(gamma, d).unwrap();
            for lambda in 0..1u64 << d {
                let want = phi * gamma.powf(-(lambda as f64));
                let got = t1_amplitude(gamma, d, lambda);
                assert!((got - want).abs() < 1e-10, "d={d} gamma={gamma} lambda={lambda}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn controlled_identity_for_every_lambda() {
    for d in 1..=8u32 {
        for gamma in [1.001f64, 1.05, 1.5, 2.0, 7.0] {
            for lambda in 0..1u64 << d {
                let want = gamma.powf(-(lambda as f64));
                let got = t2_amplitude(gamma, d, lambda);
                assert!((got - want).abs() < 1e-10, "d={d} gamma={gamma} lambda={lambda}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn worked_examples() {
    // d = 2, gamma = 2, lambda = 3
    assert!((t1_amplitude(2.0, 2, 3) - 0.108_465).abs() < 1e-6);
    assert!((t2_amplitude(2.0, 2, 3) - 0.125).abs() < 1e-12);
}

#[test]
fn transduction_gate_counts() {
    for d in 1..=6 {
        let l = RegisterLayout::new(&[("D", d as usize), ("E", d as usize)]).unwrap();
        let t1 = build_t1(&TransductionPlan::new(1.3, d, Variant::Direct).unwrap(), &l).unwrap();
        let t2 = build_t2(&TransductionPlan::new(1.3, d, Variant::Controlled).unwrap(), &l).unwrap();
        assert_eq!(t1.controlled_gate_count(), 0);
        assert_eq!(t2.controlled_gate_count(), d as usize);
        assert!(t2.gates().all(|g| g.controls.len() == 1));
    }
}

fn synthesize(table: &AmplitudeTable, variant: Variant, exact_zero: bool) -> (StateVector, RegisterLayout) {
    let plan = TransductionPlan::new(table.gamma, table.d, variant).unwrap();
    let layout = transduction_layout(table.n(), table.d, variant, exact_zero).unwrap();
    let circuit = build_synthesis(table, &plan, &layout, exact_zero).unwrap();
    let mut s = StateVector::new(layout.total_qubits());
    s.apply_circuit(&circuit).unwrap();
    (s, layout)
}

/// Post-selected `C` amplitudes (target register at 0; flag ignored).
fn post_selected(s: &StateVector, layout: &RegisterLayout, variant: Variant) -> Vec<f64> {
    let target = layout.register(variant.target_register()).unwrap();
    let c = layout.register("C").unwrap();
    let mut out = vec![0.0; c.dimension() as usize];
    for (i, a) in s.amplitudes().iter().enumerate() {
        if target.extract(i) == 0 && a.norm_sqr() > 0.0 {
            out[c.extract(i) as usize] += a.norm_sqr();
        }
    }
    out.into_iter().map(f64::sqrt).collect()
}

fn arb_alphas(eps: f64) -> impl Strategy<Value = Vec<f64>> {
    (1usize..=4).prop_flat_map(move |n| proptest::collection::vec(eps..=1.0f64, 1 << n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `|<f_bar|f>| >= 1 - 2^-d ln(gamma)` with `gamma` set by a cutoff of 1e-3.
    #[test]
    fn fidelity_bound(alphas in arb_alphas(1e-3), d in 4u32..=10) {
        let eps = 1e-3;
        let gamma = gamma_for_cutoff(eps, d).unwrap();
        let table = AmplitudeTable::build(&alphas, gamma, d, eps).unwrap();
        let approx = table.transduced();
        let dot: f64 = alphas.iter().zip(&approx).map(|(a, b)| a * b).sum();
        let na = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb = approx.iter().map(|a| a * a).sum::<f64>().sqrt();
        let overlap = dot / (na * nb);
        let bound = 1.0 - 2f64.powi(-(d as i32)) * gamma.ln();
        prop_assert!(overlap >= bound, "overlap {overlap} < {bound}");
    }

    #[test]
    fn pre_amplification_norm_matches_closed_form(alphas in arb_alphas(0.01), d in 3u32..=5) {
        let gamma = gamma_for_cutoff(0.01, d).unwrap();
        let table = AmplitudeTable::build(&alphas, gamma, d, 0.01).unwrap();
        for variant in [Variant::Direct, Variant::Controlled] {
            let (s, layout) = synthesize(&table, variant, false);
            let u = s.project_probability(&layout, variant.target_register(), 0).unwrap().sqrt();
            let oracle = exact_norms(&table.lambdas, gamma, d, variant).unwrap();
            prop_assert!((u - oracle.u).abs() < 1e-10, "{variant:?}: {u} vs {}", oracle.u);
        }
    }

    #[test]
    fn post_selected_state_is_the_transduced_table(alphas in arb_alphas(0.01), d in 3u32..=5) {
        let gamma = gamma_for_cutoff(0.01, d).unwrap();
        let table = AmplitudeTable::build(&alphas, gamma, d, 0.01).unwrap();
        let want = table.transduced();
        let norm = want.iter().map(|a| a * a).sum::<f64>().sqrt();
        for variant in [Variant::Direct, Variant::Controlled] {
            let (s, layout) = synthesize(&table, variant, false);
            let got = post_selected(&s, &layout, variant);
            let got_norm = got.iter().map(|a| a * a).sum::<f64>().sqrt();
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g / got_norm - w / norm).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn exact_zero_without_saturated_branches_changes_nothing() {
    let alphas = [1.0, 0.5, 0.3, 0.2];
    let table = AmplitudeTable::build(&alphas, 1.2, 4, 0.01).unwrap();
    for variant in [Variant::Direct, Variant::Controlled] {
        let (plain, pl) = synthesize(&table, variant, false);
        let (forced, fl) = synthesize(&table, variant, true);
        let a = post_selected(&plain, &pl, variant);
        let b = post_selected(&forced, &fl, variant);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12, "{variant:?}: {x} vs {y}");
        }
    }
}

#[test]
fn exact_zero_removes_one_saturated_branch() {
    let alphas = [1.0, 0.5, 1e-4, 0.2];
    let table = AmplitudeTable::build(&alphas, 1.2, 4, 0.01).unwrap();
    assert!(table.is_saturated(2));
    for variant in [Variant::Direct, Variant::Controlled] {
        let (plain, pl) = synthesize(&table, variant, false);
        assert!(post_selected(&plain, &pl, variant)[2] > 0.0);
        let (forced, fl) = synthesize(&table, variant, true);
        let got = post_selected(&forced, &fl, variant);
        assert_eq!(got[2], 0.0, "{variant:?}");
        assert!(got[0] > 0.0 && got[1] > 0.0 && got[3] > 0.0);
        let keep = [true, true, false, true];
        let oracle = exact_norms_masked(&table.lambdas, &keep, table.gamma, table.d, variant).unwrap();
        let u_sq = forced.project_probability(&fl, variant.target_register(), 0).unwrap();
        assert!((u_sq - oracle.u * oracle.u).abs() < 1e-12);
    }
}

#[test]
fn exact_zero_with_everything_saturated() {
    let table = AmplitudeTable::build(&[0.0; 4], 1.2, 3, 0.01).unwrap();
    for variant in [Variant::Direct, Variant::Controlled] {
        let (forced, fl) = synthesize(&table, variant, true);
        let p = forced.project_probability(&fl, variant.target_register(), 0).unwrap();
        assert_eq!(p, 0.0, "{variant:?}");
    }
}
