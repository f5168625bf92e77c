//! Grover rounds on a transduced state follow `sin^2((2 nu + 1) asin u)`.

use qtransduce::amplify::{predicted_postamp, select_nu, AmplificationSpec, Amplifier, NuRule, Predicate};
use qtransduce::simcore::StateVector;
use qtransduce::transduce::{
    build_synthesis, gamma_for_cutoff, transduction_layout, AmplitudeTable, TransductionPlan, Variant,
};

fn main() -> qtransduce::Result<()> {
    let alphas: Vec<f64> = (0..16).map(|l| (-0.35 * l as f64).exp()).collect();
    let (d, variant) = (5, Variant::Controlled);
    let gamma = gamma_for_cutoff(1e-3, d)?;
    let table = AmplitudeTable::build(&alphas, gamma, d, 1e-3)?;
    let plan = TransductionPlan::new(gamma, d, variant)?;
    let layout = transduction_layout(table.n(), d, variant, false)?;
    let circuit = build_synthesis(&table, &plan, &layout, false)?;
    let target = Predicate::register_equals(&layout, variant.target_register(), 0)?;
    let amp = Amplifier::new(&AmplificationSpec::new(circuit, target, 0));

    let mut state = StateVector::new(layout.total_qubits());
    amp.synthesize(&mut state)?;
    let u = amp.target_probability(&state).sqrt();
    println!("u^2 = {:.6}", u * u);
    println!("nu (pi/4u rounded) = {}", select_nu(u, NuRule::Rounded)?);
    println!("nu (optimal)       = {}", select_nu(u, NuRule::Optimal)?);
    println!("{:>3} {:>10} {:>10}", "nu", "simulated", "predicted");
    for nu in 0..=6 {
        if nu > 0 {
            amp.iterate(&mut state)?;
        }
        println!("{nu:>3} {:>10.6} {:>10.6}", amp.target_probability(&state), predicted_postamp(u, nu));
    }
    Ok(())
}
