//! Reference synthesis methods used for comparison: the rotation oracle
//! (one ancilla rotated by `acos(alpha_l)` per branch) and the comparator
//! method (digitized `alpha` compared against a uniform counter register).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::DEFAULT_MEMORY_BUDGET;
use crate::simcore::{Circuit, Gate, Register, RegisterLayout, StateVector, XorOracle};
use crate::transduce::{build_synthesis, gamma_for_cutoff, AmplitudeTable, TransductionPlan, Variant};

fn check_alphas(alphas: &[f64]) -> Result<usize> {
    if alphas.is_empty() || !alphas.len().is_power_of_two() {
        return Err(Error::InvalidArgument(format!("need 2^n amplitudes, got {}", alphas.len())));
    }
    if let Some((i, a)) = alphas.iter().enumerate().find(|(_, a)| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidArgument(format!("alpha[{i}] = {a} outside [0, 1]")));
    }
    Ok(alphas.len().trailing_zeros() as usize)
}

/// Layout `a, C`.
pub fn rotation_layout(n: usize) -> Result<RegisterLayout> {
    RegisterLayout::new(&[("a", 1), ("C", n)])
}

/// `H_C` followed by a rotation of the ancilla by `RotY(2 acos alpha_l)` on
/// each branch `l`, each a multi-controlled gate selecting that branch.
pub fn rotation_oracle_circuit(alphas: &[f64], layout: &RegisterLayout) -> Result<Circuit> {
    let n = check_alphas(alphas)?;
    let c = layout.register("C")?.clone();
    let a = layout.register("a")?.qubit(0);
    if c.width != n {
        return Err(Error::InvalidLayout(format!("C has {} qubits, table needs {n}", c.width)));
    }
    let mut circuit = Circuit::new(layout.clone());
    circuit.hadamard_register("C")?;
    for (l, &alpha) in alphas.iter().enumerate() {
        let theta = alpha.acos();
        if theta == 0.0 {
            continue;
        }
        let mut gate = Gate::ry(2.0 * theta, a);
        for bit in 0..n {
            gate = if l >> bit & 1 == 1 {
                gate.controlled(c.qubit(bit))
            } else {
                gate.anti_controlled(c.qubit(bit))
            };
        }
        circuit.push(gate)?;
    }
    Ok(circuit)
}

pub fn rotation_oracle_synthesis(alphas: &[f64]) -> Result<(StateVector, RegisterLayout)> {
    let n = check_alphas(alphas)?;
    let layout = rotation_layout(n)?;
    let circuit = rotation_oracle_circuit(alphas, &layout)?;
    let mut state = StateVector::with_budget(layout.total_qubits(), DEFAULT_MEMORY_BUDGET)?;
    state.apply_circuit(&circuit)?;
    Ok((state, layout))
}

/// Digitized amplitudes `floor(2^d alpha)` in `[0, 2^d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparatorSpec {
    pub d: u32,
    pub alphas_discrete: Vec<u64>,
}

impl ComparatorSpec {
    pub fn new(alphas: &[f64], d: u32) -> Result<Self> {
        check_alphas(alphas)?;
        if d == 0 || d > 20 {
            return Err(Error::InvalidArgument(format!("comparator width d = {d} out of range")));
        }
        let scale = (1u64 << d) as f64;
        Ok(Self {
            d,
            alphas_discrete: alphas.iter().map(|a| (scale * a).floor() as u64).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.alphas_discrete.len().trailing_zeros() as usize
    }
}

/// Layout `D, E, w, g, C`. `D` holds `d + 1` bits so that the full-scale
/// value `2^d` (from `alpha = 1`) is representable.
pub fn comparator_layout(n: usize, d: u32) -> Result<RegisterLayout> {
    let d = d as usize;
    RegisterLayout::new(&[("D", d + 1), ("E", d), ("w", d), ("g", 1), ("C", n)])
}

/// Ripple comparator: `g ^= [E >= D]`, with the borrow chain of `E - D` held
/// in the work register `w` and uncomputed afterwards.
pub fn comparator_circuit(layout: &RegisterLayout) -> Result<Circuit> {
    let dreg = layout.register("D")?.clone();
    let e = layout.register("E")?.clone();
    let w = layout.register("w")?.clone();
    let g = layout.register("g")?.qubit(0);
    let d = e.width;
    if dreg.width != d + 1 || w.width != d {
        return Err(Error::InvalidLayout(
            "comparator needs |D| = |E| + 1 and |w| = |E|".into(),
        ));
    }
    let mut borrow = Vec::new();
    for i in 0..d {
        let (x, a, b) = (e.qubit(i), dreg.qubit(i), w.qubit(i));
        // b_{i+1} = (!x & a) | (x == a) & b_i; the two terms never overlap
        borrow.push(Gate::x(b).anti_controlled(x).controlled(a));
        if i > 0 {
            let prev = w.qubit(i - 1);
            borrow.push(Gate::x(b).anti_controlled(x).anti_controlled(a).controlled(prev));
            borrow.push(Gate::x(b).controlled(x).controlled(a).controlled(prev));
        }
    }
    let mut circuit = Circuit::new(layout.clone());
    for gate in &borrow {
        circuit.push(gate.clone())?;
    }
    // E has no bit d, so the final borrow is a_d | b_d; g flips on its negation
    circuit.push(
        Gate::x(g)
            .anti_controlled(dreg.qubit(d))
            .anti_controlled(w.qubit(d - 1)),
    )?;
    for gate in borrow.iter().rev() {
        circuit.push(gate.clone())?;
    }
    Ok(circuit)
}

/// `H_E C A H_E H_C`: the `|0>_E |0>_g` projection carries `alpha~_l / 2^d / sqrt(N)`.
pub fn comparator_synthesis_circuit(spec: &ComparatorSpec, layout: &RegisterLayout) -> Result<Circuit> {
    let c = layout.register("C")?.clone();
    let dreg: Register = layout.register("D")?.clone();
    if c.width != spec.n() || layout.register("E")?.width != spec.d as usize {
        return Err(Error::InvalidLayout("register widths do not match the comparator spec".into()));
    }
    let mut circuit = Circuit::new(layout.clone());
    circuit.hadamard_register("C")?;
    circuit.push_oracle(XorOracle::new(c, dreg, spec.alphas_discrete.clone())?)?;
    circuit.hadamard_register("E")?;
    circuit.append(&comparator_circuit(layout)?)?;
    circuit.hadamard_register("E")?;
    Ok(circuit)
}

pub fn comparator_synthesis(spec: &ComparatorSpec) -> Result<(StateVector, RegisterLayout)> {
    let layout = comparator_layout(spec.n(), spec.d)?;
    let circuit = comparator_synthesis_circuit(spec, &layout)?;
    let mut state = StateVector::with_budget(layout.total_qubits(), DEFAULT_MEMORY_BUDGET)?;
    state.apply_circuit(&circuit)?;
    Ok((state, layout))
}

/// Probability that branch `l` passes the comparator (`E = 0`, `g = 0`),
/// simulated without the `C` register, on which the circuit acts classically.
pub fn comparator_branch_probability(spec: &ComparatorSpec, l: usize) -> Result<f64> {
    let d = spec.d as usize;
    let layout = RegisterLayout::new(&[("D", d + 1), ("E", d), ("w", d), ("g", 1)])?;
    let value = *spec
        .alphas_discrete
        .get(l)
        .ok_or_else(|| Error::InvalidArgument(format!("branch {l} out of range")))?;
    let mut circuit = Circuit::new(layout.clone());
    circuit.hadamard_register("E")?;
    circuit.append(&comparator_circuit(&layout)?)?;
    circuit.hadamard_register("E")?;
    let mut state = StateVector::with_budget(layout.total_qubits(), DEFAULT_MEMORY_BUDGET)?;
    state.amplitudes_mut()[0] = Complex64::new(0.0, 0.0);
    state.amplitudes_mut()[layout.register("D")?.deposit(0, value)] = Complex64::new(1.0, 0.0);
    state.apply_circuit(&circuit)?;
    state.project_probability_all(&layout, &[("E", 0), ("g", 0)])
}

/// Smallest `d'` with `2^-d' <= eps`: the register width the comparator
/// method needs when cutoff and absolute precision coincide.
pub fn comparator_precision(cutoff_eps: f64) -> Result<u32> {
    if !(cutoff_eps > 0.0 && cutoff_eps < 1.0) {
        return Err(Error::InvalidArgument(format!("cutoff must lie in (0, 1), got {cutoff_eps}")));
    }
    let mut d = 1;
    while 2f64.powi(-(d as i32)) > cutoff_eps {
        d += 1;
    }
    Ok(d)
}

/// One method's pre-amplification norm on a given table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub method: String,
    pub d: u32,
    pub norm: f64,
    /// Qubits beyond `C` used by the method (1 for the rotation oracle,
    /// `3d + 1` for the comparator, `d` direct, `2d` controlled).
    pub qubits: usize,
    /// Qubits of the simulated layout (`C` included, except for the
    /// comparator, which is simulated branch by branch).
    pub simulated_qubits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub n: usize,
    pub cutoff_eps: f64,
    pub gamma: f64,
    pub rows: Vec<NormRow>,
}

impl NormReport {
    pub fn row(&self, method: &str) -> Option<&NormRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Simulates all four methods on the same table. The multiplicative methods
/// use the largest `gamma` keeping every `alpha >= eps` representable in `d`
/// qubits; `eps` defaults to `2^-d`.
pub fn compare_norms(alphas: &[f64], d: u32, cutoff_eps: Option<f64>) -> Result<NormReport> {
    let n = check_alphas(alphas)?;
    let eps = cutoff_eps.unwrap_or_else(|| 2f64.powi(-(d as i32)));
    let mut rows = Vec::new();

    let (state, layout) = rotation_oracle_synthesis(alphas)?;
    rows.push(NormRow {
        method: "rotation".into(),
        d,
        norm: state.project_probability(&layout, "a", 0)?.sqrt(),
        qubits: 1,
        simulated_qubits: layout.total_qubits(),
    });

    let spec = ComparatorSpec::new(alphas, d)?;
    let mut mass = 0.0;
    for l in 0..alphas.len() {
        mass += comparator_branch_probability(&spec, l)?;
    }
    rows.push(NormRow {
        method: "comparator".into(),
        d,
        norm: (mass / alphas.len() as f64).sqrt(),
        qubits: 3 * d as usize + 1,
        simulated_qubits: 3 * d as usize + 2,
    });

    let gamma = gamma_for_cutoff(eps, d)?;
    let table = AmplitudeTable::build(alphas, gamma, d, eps)?;
    for variant in [Variant::Direct, Variant::Controlled] {
        let plan = TransductionPlan::new(gamma, d, variant)?;
        let layout = crate::transduce::transduction_layout(n, d, variant, false)?;
        let circuit = build_synthesis(&table, &plan, &layout, false)?;
        let mut state = StateVector::with_budget(layout.total_qubits(), DEFAULT_MEMORY_BUDGET)?;
        state.apply_circuit(&circuit)?;
        let norm = state.project_probability(&layout, variant.target_register(), 0)?.sqrt();
        rows.push(NormRow {
            method: format!("multiplicative-{}", variant.name()),
            d,
            norm,
            qubits: match variant {
                Variant::Direct => d as usize,
                Variant::Controlled => 2 * d as usize,
            },
            simulated_qubits: layout.total_qubits(),
        });
    }
    Ok(NormReport {
        n,
        cutoff_eps: eps,
        gamma,
        rows,
    })
}
