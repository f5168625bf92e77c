//! Amplitude amplification with `Q = -I_s U^-1 I_t U`.
//!
//! States are tracked in the synthesized frame: after `nu` rounds the state
//! is `U Q^nu |0...0>`, so one round maps `psi` to `U Q U^-1 psi =
//! -U I_s U^-1 I_t psi`. The target projection then has probability
//! `sin^2((2 nu + 1) asin u)`, `u` being the norm of the target projection
//! of `U |0...0>`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{Circuit, Gate, Program, Register, RegisterLayout, StateVector};

/// Basis-state predicate used by the selective phase inversions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// Only the all-zero basis state.
    AllZero,
    /// Every listed register holds its paired value.
    Registers(Vec<(Register, u64)>),
    /// Every basis state.
    Everything,
}

impl Predicate {
    /// `register == value` for one named register.
    pub fn register_equals(layout: &RegisterLayout, name: &str, value: u64) -> Result<Self> {
        Self::registers_equal(layout, &[(name, value)])
    }

    pub fn registers_equal(layout: &RegisterLayout, conditions: &[(&str, u64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(conditions.len());
        for (name, value) in conditions {
            let reg = layout.register(name)?;
            if *value >= reg.dimension() {
                return Err(Error::RegisterValue {
                    register: name.to_string(),
                    value: *value,
                    width: reg.width,
                });
            }
            out.push((reg.clone(), *value));
        }
        Ok(Predicate::Registers(out))
    }

    /// `(mask, value)` with `index & mask == value` exactly on matches.
    pub fn pattern(&self) -> (usize, usize) {
        match self {
            Predicate::AllZero => (usize::MAX, 0),
            Predicate::Everything => (0, 0),
            Predicate::Registers(regs) => {
                let mut mask = 0;
                let mut want = 0;
                for (reg, value) in regs {
                    mask |= reg.mask();
                    want |= reg.deposit(0, *value);
                }
                (mask, want)
            }
        }
    }

    pub fn matches(&self, index: usize) -> bool {
        let (mask, want) = self.pattern();
        index & mask == want
    }
}

/// Negates the amplitudes of every basis state matching `predicate`.
pub fn phase_flip(state: &mut StateVector, predicate: &Predicate) {
    let (mask, want) = predicate.pattern();
    if mask == usize::MAX {
        let a = state.amplitudes_mut();
        a[0] = -a[0];
        return;
    }
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if i & mask == want {
            *a = -*a;
        }
    }
}

/// Gate-level `I - 2|0><0|` on the given qubits: X on each, a multi-controlled
/// Z, X on each again.
pub fn zero_flip_circuit(layout: &RegisterLayout, qubits: &[usize]) -> Result<Circuit> {
    let mut circuit = Circuit::new(layout.clone());
    let (&target, controls) = qubits
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("zero flip needs at least one qubit".into()))?;
    for &q in qubits {
        circuit.push(Gate::x(q))?;
    }
    let mut mcz = Gate::z(target);
    for &q in controls {
        mcz = mcz.controlled(q);
    }
    circuit.push(mcz)?;
    for &q in qubits {
        circuit.push(Gate::x(q))?;
    }
    Ok(circuit)
}

/// Gate-level source inversion `I_s` over the whole layout.
pub fn source_flip_circuit(layout: &RegisterLayout) -> Result<Circuit> {
    let all: Vec<usize> = (0..layout.total_qubits()).collect();
    zero_flip_circuit(layout, &all)
}

/// Gate-level target inversion for `register == 0`.
pub fn register_zero_flip_circuit(layout: &RegisterLayout, register: &str) -> Result<Circuit> {
    let qubits: Vec<usize> = layout.register(register)?.qubits().collect();
    zero_flip_circuit(layout, &qubits)
}

/// Synthesis circuit `U`, the source/target predicates and the round count.
#[derive(Clone, Debug)]
pub struct AmplificationSpec {
    pub synthesis: Circuit,
    pub source: Predicate,
    pub target: Predicate,
    pub nu: u32,
}

impl AmplificationSpec {
    pub fn new(synthesis: Circuit, target: Predicate, nu: u32) -> Self {
        Self {
            synthesis,
            source: Predicate::AllZero,
            target,
            nu,
        }
    }
}

/// `U` and `U^-1` compiled once for repeated rounds.
#[derive(Clone, Debug)]
pub struct Amplifier {
    forward: Program,
    backward: Program,
    source: Predicate,
    target: Predicate,
}

impl Amplifier {
    pub fn new(spec: &AmplificationSpec) -> Self {
        Self {
            forward: Program::compile(&spec.synthesis),
            backward: Program::compile(&spec.synthesis.inverse()),
            source: spec.source.clone(),
            target: spec.target.clone(),
        }
    }

    /// `psi <- U |0...0>`.
    pub fn synthesize(&self, state: &mut StateVector) -> Result<()> {
        state.apply_program(&self.forward)
    }

    /// One round, `psi <- -U I_s U^-1 I_t psi`.
    pub fn iterate(&self, state: &mut StateVector) -> Result<()> {
        phase_flip(state, &self.target);
        state.apply_program(&self.backward)?;
        phase_flip(state, &self.source);
        state.apply_program(&self.forward)?;
        for a in state.amplitudes_mut() {
            *a = -*a;
        }
        Ok(())
    }

    /// Probability mass on the target predicate.
    pub fn target_probability(&self, state: &StateVector) -> f64 {
        let (mask, want) = self.target.pattern();
        state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Applies one amplification round to `state` (see the module docs for the frame).
pub fn grover_iterate(state: &mut StateVector, spec: &AmplificationSpec) -> Result<()> {
    Amplifier::new(spec).iterate(state)
}

/// Builds `U Q^nu |0...0>` from scratch.
pub fn amplified_state(spec: &AmplificationSpec) -> Result<StateVector> {
    let amp = Amplifier::new(spec);
    let mut state = StateVector::new(spec.synthesis.layout().total_qubits());
    amp.synthesize(&mut state)?;
    for _ in 0..spec.nu {
        amp.iterate(&mut state)?;
    }
    Ok(state)
}

/// How the number of amplification rounds is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuRule {
    /// `round(pi / (4u))`.
    #[default]
    Rounded,
    /// Whichever neighbour of `pi/(4 theta) - 1/2` maximizes the success
    /// probability.
    Optimal,
}

impl std::str::FromStr for NuRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rounded" | "round" => Ok(NuRule::Rounded),
            "optimal" => Ok(NuRule::Optimal),
            other => Err(Error::InvalidArgument(format!("unknown nu rule `{other}`"))),
        }
    }
}

fn check_u(u: f64) -> Result<()> {
    if u > 0.0 && u <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("pre-amplification norm must lie in (0, 1], got {u}")))
    }
}

pub fn select_nu(u: f64, rule: NuRule) -> Result<u32> {
    check_u(u)?;
    Ok(match rule {
        NuRule::Rounded => (PI / (4.0 * u)).round() as u32,
        NuRule::Optimal => {
            let theta = u.asin();
            let centre = (PI / (4.0 * theta) - 0.5).max(0.0);
            let lo = centre.floor() as u32;
            let hi = centre.ceil() as u32;
            let p = |nu: u32| predicted_postamp(u, nu);
            if p(hi) > p(lo) {
                hi
            } else {
                lo
            }
        }
    })
}

/// `sin^2((2 nu + 1) asin u)`.
pub fn predicted_postamp(u: f64, nu: u32) -> f64 {
    ((2 * nu + 1) as f64 * u.clamp(0.0, 1.0).asin()).sin().powi(2)
}
