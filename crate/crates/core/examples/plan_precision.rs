//! Register widths needed for a cutoff `eps` and a relative precision `delta`.
//!
//! cargo run --example plan_precision -- 0.001 0.001

use qtransduce::experiment::plan;

fn main() -> qtransduce::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("a number"));
    let eps = args.next().unwrap_or(1e-3);
    let delta = args.next().unwrap_or(1e-3);
    let p = plan(eps, delta)?;
    println!("eps = {eps}, delta = {delta}, gamma = {:.6}", p.gamma);
    println!("d = {}", p.d);
    println!("direct transduction:     {} qubits", p.direct_qubits);
    println!("controlled transduction: {} qubits", p.controlled_qubits);
    println!("comparator:              {} qubits ({} per register)", p.comparator_qubits, p.comparator_d);
    Ok(())
}
