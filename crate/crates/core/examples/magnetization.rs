//! Magnetization histogram of a 4x4 lattice above and below the critical
//! temperature.

use std::collections::BTreeMap;

use qtransduce::amplify::NuRule;
use qtransduce::analysis::boltzmann_reference;
use qtransduce::ising::{synthesize_boltzmann, BoltzmannConfig, IsingLattice, Rounds, BETA_CRITICAL_J};
use qtransduce::transduce::Variant;

fn main() -> qtransduce::Result<()> {
    for relative in [0.1, 2.0] {
        let lattice = IsingLattice::square(4, relative / BETA_CRITICAL_J)?;
        let mut config = BoltzmannConfig::new(lattice.clone(), Variant::Direct);
        config.rounds = Rounds::Rule(NuRule::Optimal);
        let mut run = synthesize_boltzmann(&config)?;
        let counts = run.sample_post_selected(1 << 16, 3)?;
        let kept: u64 = counts.values().sum();
        let mut by_m: BTreeMap<i32, u64> = BTreeMap::new();
        for (&l, &n) in &counts {
            *by_m.entry(lattice.magnetization(l)).or_insert(0) += n;
        }
        let reference = boltzmann_reference(&lattice)?;
        println!(
            "beta = {relative} beta_c ({} rounds, {kept} post-selected shots)",
            run.diagnostics.nu
        );
        for (m, p) in &reference.magnetization {
            let f = by_m.get(m).copied().unwrap_or(0) as f64 / kept as f64;
            let bar = "#".repeat((f * 60.0).round() as usize);
            println!("  M = {m:>3}  {f:.4} (exact {p:.4}) {bar}");
        }
    }
    Ok(())
}
