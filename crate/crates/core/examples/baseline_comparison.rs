//! Pre-amplification norms of the rotation oracle, the comparator method and
//! both multiplicative transducers on one table.

use qtransduce::baselines::compare_norms;

fn main() -> qtransduce::Result<()> {
    let alphas = [1.0, 0.83, 0.61, 0.47, 0.3, 0.22, 0.13, 0.05];
    for d in [3, 4, 6] {
        let report = compare_norms(&alphas, d, None)?;
        println!("d = {d}, gamma = {:.4}", report.gamma);
        for row in &report.rows {
            println!("  {:<26} norm {:.6}  extra qubits {:>3}", row.method, row.norm, row.qubits);
        }
    }
    Ok(())
}
