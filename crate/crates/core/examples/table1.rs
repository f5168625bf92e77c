//! Norms, rounds and efficiencies for 2x2, 3x3 and 4x4 lattices at
//! `beta J = 0.1`, both variants.
//!
//! The 4x4 controlled row needs 27 qubits (2 GiB); pass `--allow-large` to run it.

use qtransduce::amplify::NuRule;
use qtransduce::experiment::{run_table1, DEFAULT_SHOTS};

fn main() -> qtransduce::Result<()> {
    let large = std::env::args().any(|a| a == "--allow-large");
    let report = run_table1(NuRule::Rounded, DEFAULT_SHOTS, 1, large)?;
    println!("{:<8} {:<11} {:>6} {:>2} {:>3} {:>9} {:>9} {:>9}", "lattice", "variant", "qubits", "d", "nu", "u^2", "A'^2", "eff");
    for row in &report.rows {
        let g = &row.diagnostics;
        println!(
            "{:<8} {:<11} {:>6} {:>2} {:>3} {:>9.6} {:>9.6} {:>9.6}",
            format!("{0}x{0}", row.expected.size),
            row.expected.variant.name(),
            g.total_qubits,
            g.d,
            g.nu,
            g.u_sq,
            g.a_prime_sq,
            g.efficiency.unwrap_or(f64::NAN)
        );
    }
    for skipped in &report.skipped {
        println!("skipped: {skipped}");
    }
    report.check()
}
