//! Prepares `sum_l alpha_l |l>` from a table of moduli with both transducer
//! variants and compares the statevector against the closed form.

use qtransduce::analysis::exact_norms_for_table;
use qtransduce::simcore::StateVector;
use qtransduce::transduce::{
    build_synthesis, gamma_for_cutoff, transduction_layout, AmplitudeTable, TransductionPlan, Variant,
};

fn main() -> qtransduce::Result<()> {
    let alphas = [1.0, 0.7, 0.45, 0.3, 0.2, 0.12, 0.05, 0.0005];
    let (d, eps) = (5, 1e-2);
    let gamma = gamma_for_cutoff(eps, d)?;
    let table = AmplitudeTable::build(&alphas, gamma, d, eps)?;
    println!("gamma = {gamma:.5}, lambdas = {:?}", table.lambdas);

    for variant in [Variant::Direct, Variant::Controlled] {
        let plan = TransductionPlan::new(gamma, d, variant)?;
        let layout = transduction_layout(table.n(), d, variant, false)?;
        let circuit = build_synthesis(&table, &plan, &layout, false)?;
        let mut state = StateVector::new(layout.total_qubits());
        state.apply_circuit(&circuit)?;

        let success = state.project_probability(&layout, variant.target_register(), 0)?;
        let oracle = exact_norms_for_table(&table, variant)?;
        println!(
            "{:>10}: {} qubits, {} gates, u^2 = {success:.6} (closed form {:.6})",
            variant.name(),
            layout.total_qubits(),
            circuit.len(),
            oracle.u * oracle.u
        );

        let c = layout.register("C")?;
        let target = layout.register(variant.target_register())?;
        let norm = success.sqrt();
        let ideal = table.transduced();
        let ideal_norm = ideal.iter().map(|a| a * a).sum::<f64>().sqrt();
        for (l, alpha) in alphas.iter().enumerate() {
            let mut amp = 0.0;
            for (i, a) in state.amplitudes().iter().enumerate() {
                if c.extract(i) == l as u64 && target.extract(i) == 0 {
                    amp += a.norm_sqr();
                }
            }
            println!(
                "    l = {l}: alpha = {alpha:<7} gamma^-lambda = {:.5}  post-selected {:.5} (expected {:.5})",
                ideal[l],
                amp.sqrt() / norm,
                ideal[l] / ideal_norm
            );
        }
    }
    Ok(())
}
