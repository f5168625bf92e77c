//! Periodic square-lattice Ising model and its Boltzmann state synthesis.
//!
//! Qubit `i` of register `C` is spin site `i` (row-major), `|1>` meaning up.
//! With `Sigma_l` the number of opposing nearest-neighbour pairs, the target
//! amplitudes are `alpha_l = exp(-beta_j * Sigma_l)`. Choosing
//! `gamma = exp(2 beta_j)` makes `lambda_l = Sigma_l / 2` an exact integer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::amplify::{select_nu, Amplifier, AmplificationSpec, NuRule, Predicate};
use crate::analysis::{exact_norms, SynthesisDiagnostics};
use crate::error::{Error, Result};
use crate::simcore::{statevector_bytes, Circuit, Gate, RegisterLayout, StateVector};
use crate::transduce::{build_t1, build_t2, TransductionPlan, Variant};

/// Inverse critical temperature of the infinite square lattice, in units of `1/J`.
pub const BETA_CRITICAL_J: f64 = 2.269;

/// Largest lattice swept configuration-by-configuration.
pub const MAX_BRUTE_FORCE_SITES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingLattice {
    pub rows: usize,
    pub cols: usize,
    pub beta_j: f64,
    /// Each site paired with its right and down periodic neighbours.
    pub pairs: Vec<(usize, usize)>,
}

impl IsingLattice {
    pub fn new(rows: usize, cols: usize, beta_j: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("lattice needs at least one row and column".into()));
        }
        if rows * cols > 40 {
            return Err(Error::InvalidArgument(format!("{rows}x{cols} lattice is too large")));
        }
        if !(beta_j >= 0.0 && beta_j.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta*J must be finite and >= 0, got {beta_j}")));
        }
        let mut pairs = Vec::with_capacity(2 * rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let site = r * cols + c;
                pairs.push((site, r * cols + (c + 1) % cols));
                pairs.push((site, ((r + 1) % rows) * cols + c));
            }
        }
        Ok(Self {
            rows,
            cols,
            beta_j,
            pairs,
        })
    }

    pub fn square(size: usize, beta_j: f64) -> Result<Self> {
        Self::new(size, size, beta_j)
    }

    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn configurations(&self) -> u64 {
        1u64 << self.sites()
    }

    /// Number of opposing-spin pairs in configuration `config`.
    pub fn sigma_count(&self, config: u64) -> u32 {
        self.pairs
            .iter()
            .filter(|(a, b)| ((config >> a) ^ (config >> b)) & 1 == 1)
            .count() as u32
    }

    /// `M = sum_i s_i` with `s_i = +1` for a set bit.
    pub fn magnetization(&self, config: u64) -> i32 {
        let up = (config & (self.configurations() - 1)).count_ones() as i32;
        2 * up - self.sites() as i32
    }

    /// `E_l / J = -(2N - 2 Sigma_l)`.
    pub fn energy_over_j(&self, config: u64) -> f64 {
        -((self.pairs.len() as f64) - 2.0 * self.sigma_count(config) as f64)
    }

    /// Largest `Sigma / 2` over all configurations: exact by enumeration for
    /// small lattices, the bound `N` otherwise.
    pub fn max_half_sigma(&self) -> u64 {
        if self.sites() <= MAX_BRUTE_FORCE_SITES {
            (0..self.configurations())
                .map(|l| self.sigma_count(l) as u64 / 2)
                .max()
                .unwrap_or(0)
        } else {
            self.pairs.len() as u64 / 2
        }
    }

    /// Smallest register width with `2^d > max Sigma / 2`.
    pub fn auto_d(&self) -> u32 {
        let max = self.max_half_sigma();
        let mut d = 1;
        while (1u64 << d) <= max {
            d += 1;
        }
        d
    }

    pub fn gamma(&self) -> f64 {
        (2.0 * self.beta_j).exp()
    }
}

/// Ising amplitudes in transduction form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannTarget {
    pub lattice: IsingLattice,
    pub gamma: f64,
    pub d: u32,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<u64>,
}

impl BoltzmannTarget {
    pub fn new(lattice: &IsingLattice, d: u32) -> Result<Self> {
        if lattice.sites() > MAX_BRUTE_FORCE_SITES + 7 {
            return Err(Error::InvalidArgument("lattice too large to tabulate".into()));
        }
        check_d(lattice, d)?;
        let lambdas: Vec<u64> = (0..lattice.configurations())
            .map(|l| lattice.sigma_count(l) as u64 / 2)
            .collect();
        let alphas = (0..lattice.configurations())
            .map(|l| (-lattice.beta_j * lattice.sigma_count(l) as f64).exp())
            .collect();
        Ok(Self {
            lattice: lattice.clone(),
            gamma: lattice.gamma(),
            d,
            alphas,
            lambdas,
        })
    }
}

fn check_d(lattice: &IsingLattice, d: u32) -> Result<()> {
    if d == 0 || d > 16 {
        return Err(Error::InvalidArgument(format!("d = {d} out of range")));
    }
    let max = lattice.max_half_sigma();
    if (1u64 << d) <= max {
        return Err(Error::LambdaOverflow {
            index: 0,
            lambda: max,
            d,
        });
    }
    Ok(())
}

/// Register layout `D, [E], C, a` for an Ising synthesis circuit.
pub fn ising_layout(lattice: &IsingLattice, d: u32, variant: Variant) -> Result<RegisterLayout> {
    let d = d as usize;
    let mut regs = vec![("D", d)];
    if variant == Variant::Controlled {
        regs.push(("E", d));
    }
    regs.push(("C", lattice.sites()));
    regs.push(("a", 1));
    RegisterLayout::new(&regs)
}

/// Quantum Fourier transform `|y> -> 2^(-w/2) sum_x exp(2 pi i x y / 2^w) |x>`
/// on one register, little-endian.
pub fn qft_circuit(layout: &RegisterLayout, register: &str) -> Result<Circuit> {
    let reg = layout.register(register)?.clone();
    let w = reg.width;
    let mut circuit = Circuit::new(layout.clone());
    for j in (0..w).rev() {
        circuit.push(Gate::h(reg.qubit(j)))?;
        for m in (0..j).rev() {
            let angle = PI / (1u64 << (j - m)) as f64;
            circuit.push(Gate::phase(angle, reg.qubit(j)).controlled(reg.qubit(m)))?;
        }
    }
    for k in 0..w / 2 {
        circuit.push(Gate::swap(reg.qubit(k), reg.qubit(w - 1 - k)))?;
    }
    Ok(circuit)
}

/// Gate-level pair-counting oracle `|l>_C |0>_D -> |l>_C |Sigma_l / 2>_D`.
///
/// `D` is put in uniform superposition and the ancilla `a` in `|1>`. For each
/// pair the XOR of the two spins is computed onto the second site, every qubit
/// `D_k` picks up a controlled phase `pi 2^k / 2^d`, and the XOR is undone.
/// The accumulated phase `exp(i pi x Sigma_l / 2^d)` on `|x>_D` is read out by
/// the inverse Fourier transform.
pub fn build_ising_l(lattice: &IsingLattice, d: u32, layout: &RegisterLayout) -> Result<Circuit> {
    check_d(lattice, d)?;
    let c = layout.register("C")?.clone();
    let dreg = layout.register("D")?.clone();
    let a = layout.register("a")?.clone();
    if c.width != lattice.sites() || dreg.width != d as usize {
        return Err(Error::InvalidLayout("layout does not match lattice and d".into()));
    }
    let mut circuit = Circuit::new(layout.clone());
    circuit.push(Gate::x(a.qubit(0)))?;
    circuit.hadamard_register("D")?;
    let scale = PI / (1u64 << d) as f64;
    for &(i, j) in &lattice.pairs {
        if i == j {
            continue;
        }
        let (qi, qj) = (c.qubit(i), c.qubit(j));
        circuit.push(Gate::cx(qi, qj))?;
        for k in 0..d as usize {
            let angle = scale * (1u64 << k) as f64;
            circuit.push(Gate::phase(angle, dreg.qubit(k)).controlled(qj))?;
        }
        circuit.push(Gate::cx(qi, qj))?;
    }
    circuit.append(&qft_circuit(layout, "D")?.inverse())?;
    Ok(circuit)
}

/// Synthesis circuit `U = T L H_C` for the Boltzmann amplitudes.
pub fn build_boltzmann_synthesis(
    lattice: &IsingLattice,
    d: u32,
    variant: Variant,
) -> Result<(Circuit, RegisterLayout, TransductionPlan)> {
    let layout = ising_layout(lattice, d, variant)?;
    let plan = TransductionPlan::new(lattice.gamma(), d, variant)?;
    let mut circuit = Circuit::new(layout.clone());
    circuit.hadamard_register("C")?;
    circuit.append(&build_ising_l(lattice, d, &layout)?)?;
    let transduce = match variant {
        Variant::Direct => build_t1(&plan, &layout)?,
        Variant::Controlled => build_t2(&plan, &layout)?,
    };
    circuit.append(&transduce)?;
    Ok((circuit, layout, plan))
}

/// How many amplification rounds to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounds {
    None,
    Rule(NuRule),
    Fixed(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannConfig {
    pub lattice: IsingLattice,
    pub variant: Variant,
    /// Register width; `None` picks the smallest that fits.
    pub d: Option<u32>,
    pub rounds: Rounds,
    pub memory_budget: u64,
}

/// Default statevector budget, enough for 26 qubits.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Budget that admits the 27-qubit controlled 4x4 run.
pub const LARGE_MEMORY_BUDGET: u64 = 3 << 30;

impl BoltzmannConfig {
    pub fn new(lattice: IsingLattice, variant: Variant) -> Self {
        Self {
            lattice,
            variant,
            d: None,
            rounds: Rounds::Rule(NuRule::Rounded),
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn resolved_d(&self) -> u32 {
        self.d.unwrap_or_else(|| self.lattice.auto_d())
    }

    pub fn total_qubits(&self) -> usize {
        let d = self.resolved_d() as usize;
        let regs = match self.variant {
            Variant::Direct => d,
            Variant::Controlled => 2 * d,
        };
        regs + self.lattice.sites() + 1
    }

    pub fn memory_required(&self) -> u64 {
        statevector_bytes(self.total_qubits())
    }
}

/// Final state of a Boltzmann synthesis plus everything needed to read it.
#[derive(Clone, Debug)]
pub struct BoltzmannRun {
    pub state: StateVector,
    pub layout: RegisterLayout,
    pub plan: TransductionPlan,
    pub diagnostics: SynthesisDiagnostics,
}

impl BoltzmannRun {
    /// Samples the final state and records the post-selection efficiency.
    /// Returns counts of the `C` register over shots whose target register
    /// read 0.
    pub fn sample_post_selected(&mut self, shots: u64, seed: u64) -> Result<std::collections::BTreeMap<u64, u64>> {
        let counts = self.state.sample(shots, seed)?;
        let target = self.layout.register(self.plan.variant.target_register())?;
        let c = self.layout.register("C")?;
        let mut kept = std::collections::BTreeMap::new();
        let mut accepted = 0u64;
        for (idx, n) in counts {
            if target.extract(idx) == 0 {
                accepted += n;
                *kept.entry(c.extract(idx)).or_insert(0) += n;
            }
        }
        self.diagnostics.shots = shots;
        self.diagnostics.seed = Some(seed);
        self.diagnostics.efficiency = Some(accepted as f64 / shots as f64);
        Ok(kept)
    }
}

/// Builds and simulates the Boltzmann sampler circuit, with amplification.
pub fn synthesize_boltzmann(config: &BoltzmannConfig) -> Result<BoltzmannRun> {
    let d = config.resolved_d();
    let needed = config.memory_required();
    if needed > config.memory_budget {
        return Err(Error::MemoryBudget {
            qubits: config.total_qubits(),
            bytes: needed,
            budget: config.memory_budget,
        });
    }
    let (circuit, layout, plan) = build_boltzmann_synthesis(&config.lattice, d, config.variant)?;
    let target = Predicate::register_equals(&layout, config.variant.target_register(), 0)?;

    let lambdas: Vec<u64> = (0..config.lattice.configurations())
        .map(|l| config.lattice.sigma_count(l) as u64 / 2)
        .collect();
    let oracle = exact_norms(&lambdas, plan.gamma, d, config.variant)?;

    let mut state = StateVector::with_budget(layout.total_qubits(), config.memory_budget)?;
    let spec = AmplificationSpec::new(circuit, target, 0);
    let amplifier = Amplifier::new(&spec);
    amplifier.synthesize(&mut state)?;
    let u_sq = amplifier.target_probability(&state);

    let nu = match config.rounds {
        Rounds::None => 0,
        Rounds::Fixed(n) => n,
        Rounds::Rule(rule) => select_nu(u_sq.sqrt(), rule)?,
    };
    for _ in 0..nu {
        amplifier.iterate(&mut state)?;
    }
    let measured = amplifier.target_probability(&state);

    let diagnostics = SynthesisDiagnostics {
        u_sq,
        u_sq_oracle: oracle.u * oracle.u,
        nu,
        a_prime_sq: crate::amplify::predicted_postamp(u_sq.sqrt(), nu),
        a_prime_sq_measured: measured,
        efficiency: None,
        shots: 0,
        seed: None,
        total_qubits: layout.total_qubits(),
        d,
    };
    Ok(BoltzmannRun {
        state,
        layout,
        plan,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_enumeration() {
        let lat = IsingLattice::square(3, 0.1).unwrap();
        assert_eq!(lat.pairs.len(), 18);
        let lat = IsingLattice::new(2, 3, 0.1).unwrap();
        assert_eq!(lat.pairs.len(), 12);
    }

    #[test]
    fn sigma_examples() {
        let lat = IsingLattice::square(2, 0.1).unwrap();
        assert_eq!(lat.sigma_count(0), 0);
        assert_eq!(lat.sigma_count(0b1001), 8);
        let mut hist = std::collections::BTreeMap::new();
        for l in 0..16 {
            *hist.entry(lat.sigma_count(l)).or_insert(0) += 1;
        }
        assert_eq!(hist.into_iter().collect::<Vec<_>>(), vec![(0, 2), (4, 12), (8, 2)]);
    }

    #[test]
    fn sigma_is_always_even() {
        for (r, c) in [(2, 2), (3, 3), (2, 3), (3, 4)] {
            let lat = IsingLattice::new(r, c, 0.1).unwrap();
            assert!((0..lat.configurations()).all(|l| lat.sigma_count(l) % 2 == 0));
        }
    }

    #[test]
    fn auto_d_matches_table() {
        assert_eq!(IsingLattice::square(2, 0.1).unwrap().auto_d(), 3);
        assert_eq!(IsingLattice::square(3, 0.1).unwrap().auto_d(), 3);
        assert_eq!(IsingLattice::square(4, 0.1).unwrap().auto_d(), 5);
    }

    #[test]
    fn magnetization_range() {
        let lat = IsingLattice::square(2, 0.1).unwrap();
        assert_eq!(lat.magnetization(0), -4);
        assert_eq!(lat.magnetization(0b1111), 4);
        assert_eq!(lat.magnetization(0b0101), 0);
    }

    #[test]
    fn gamma_reproduces_alpha() {
        let lat = IsingLattice::square(3, 0.1).unwrap();
        let target = BoltzmannTarget::new(&lat, 3).unwrap();
        for (a, l) in target.alphas.iter().zip(&target.lambdas) {
            assert!((target.gamma.powf(-(*l as f64)) - a).abs() < 1e-14);
        }
    }

    #[test]
    fn d_too_small_is_rejected() {
        let lat = IsingLattice::square(2, 0.1).unwrap();
        let layout = ising_layout(&lat, 2, Variant::Direct).unwrap();
        assert!(matches!(build_ising_l(&lat, 2, &layout), Err(Error::LambdaOverflow { .. })));
    }

    #[test]
    fn memory_budget_refusal() {
        let lat = IsingLattice::square(4, 0.1).unwrap();
        let mut cfg = BoltzmannConfig::new(lat, Variant::Controlled);
        cfg.memory_budget = 1 << 20;
        assert!(matches!(synthesize_boltzmann(&cfg), Err(Error::MemoryBudget { .. })));
        assert_eq!(cfg.total_qubits(), 27);
    }
}
