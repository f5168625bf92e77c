//! Samples a 3x3 Ising lattice and checks the Sigma histogram against exact
//! enumeration.

use std::collections::BTreeMap;

use qtransduce::analysis::{boltzmann_reference, distribution_tests};
use qtransduce::ising::{synthesize_boltzmann, BoltzmannConfig, IsingLattice};
use qtransduce::transduce::Variant;

fn main() -> qtransduce::Result<()> {
    let lattice = IsingLattice::square(3, 0.3)?;
    let config = BoltzmannConfig::new(lattice.clone(), Variant::Controlled);
    let mut run = synthesize_boltzmann(&config)?;
    let counts = run.sample_post_selected(1 << 16, 7)?;
    let g = &run.diagnostics;
    println!(
        "{} qubits, d = {}, u^2 = {:.5}, nu = {}, A'^2 = {:.5}, efficiency = {:.5}",
        g.total_qubits,
        g.d,
        g.u_sq,
        g.nu,
        g.a_prime_sq,
        g.efficiency.unwrap_or(0.0)
    );

    let reference = boltzmann_reference(&lattice)?;
    let mut by_sigma: BTreeMap<u32, u64> = BTreeMap::new();
    for (&l, &n) in &counts {
        *by_sigma.entry(lattice.sigma_count(l)).or_insert(0) += n;
    }
    let kept: u64 = counts.values().sum();
    println!("{:>5} {:>8} {:>10} {:>10}", "Sigma", "g", "observed", "exact");
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    for (s, bin) in &reference.sigma {
        let n = by_sigma.get(s).copied().unwrap_or(0);
        println!("{s:>5} {:>8} {:>10.5} {:>10.5}", bin.density, n as f64 / kept as f64, bin.probability);
        observed.push(n);
        expected.push(bin.probability);
    }
    let t = distribution_tests(&observed, &expected)?;
    println!("chi2 = {:.2} on {} dof, p = {:.3}, tvd = {:.4}", t.statistic, t.dof, t.p_value, t.tvd);
    Ok(())
}
