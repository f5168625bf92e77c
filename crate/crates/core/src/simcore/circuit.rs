use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::layout::{Register, RegisterLayout};
use crate::error::{Error, Result};

/// Basis-permutation oracle `|x>_in |y>_out -> |x>_in |y XOR table[x]>_out`.
///
/// This is how classically tabulated functions enter a circuit. It is its own
/// inverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XorOracle {
    pub input: Register,
    pub output: Register,
    pub table: Arc<Vec<u64>>,
}

impl XorOracle {
    pub fn new(input: Register, output: Register, table: Vec<u64>) -> Result<Self> {
        if table.len() as u64 != input.dimension() {
            return Err(Error::InvalidArgument(format!(
                "oracle table has {} entries, input register `{}` has {} values",
                table.len(),
                input.name,
                input.dimension()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= output.dimension()) {
            return Err(Error::RegisterValue {
                register: output.name.clone(),
                value: v,
                width: output.width,
            });
        }
        let overlap = input.mask() & output.mask();
        if overlap != 0 {
            return Err(Error::InvalidArgument("oracle input and output overlap".into()));
        }
        Ok(Self {
            input,
            output,
            table: Arc::new(table),
        })
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.input.qubits().chain(self.output.qubits())
    }

    #[inline]
    pub fn map_basis(&self, index: usize) -> usize {
        let x = self.input.extract(index) as usize;
        index ^ ((self.table[x] as usize) << self.output.offset)
    }

    pub(crate) fn apply_to(&self, amps: &mut [Complex64]) {
        for i in 0..amps.len() {
            let j = self.map_basis(i);
            if j > i {
                amps.swap(i, j);
            }
        }
    }
}

/// One step of a circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Instruction {
    Gate(Gate),
    Oracle(XorOracle),
}

impl Instruction {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Instruction::Gate(g) => g.qubits().collect(),
            Instruction::Oracle(o) => o.qubits().collect(),
        }
    }

    pub fn is_monomial(&self) -> bool {
        match self {
            Instruction::Gate(g) => g.is_monomial(),
            Instruction::Oracle(_) => true,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Instruction::Gate(g) => Instruction::Gate(g.inverse()),
            Instruction::Oracle(o) => Instruction::Oracle(o.clone()),
        }
    }
}

impl From<Gate> for Instruction {
    fn from(g: Gate) -> Self {
        Instruction::Gate(g)
    }
}

/// Ordered, invertible gate sequence over a fixed register layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    layout: RegisterLayout,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            instructions: Vec::new(),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Gate(g) => Some(g),
            Instruction::Oracle(_) => None,
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.layout.total_qubits())?;
        self.instructions.push(Instruction::Gate(gate));
        Ok(self)
    }

    pub fn push_oracle(&mut self, oracle: XorOracle) -> Result<&mut Self> {
        let total = self.layout.total_qubits();
        if let Some(q) = oracle.qubits().find(|&q| q >= total) {
            return Err(Error::QubitOutOfRange { index: q, total });
        }
        self.instructions.push(Instruction::Oracle(oracle));
        Ok(self)
    }

    /// Appends every instruction of `other`, which must share this layout.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.layout != self.layout {
            return Err(Error::LayoutMismatch {
                circuit: other.layout.total_qubits(),
                state: self.layout.total_qubits(),
            });
        }
        self.instructions.extend(other.instructions.iter().cloned());
        Ok(self)
    }

    /// Hadamard on every qubit of a register.
    pub fn hadamard_register(&mut self, name: &str) -> Result<&mut Self> {
        let reg = self.layout.register(name)?.clone();
        for q in reg.qubits() {
            self.push(Gate::h(q))?;
        }
        Ok(self)
    }

    pub fn inverse(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            instructions: self.instructions.iter().rev().map(Instruction::inverse).collect(),
        }
    }

    pub fn controlled_gate_count(&self) -> usize {
        self.gates().filter(|g| !g.controls.is_empty()).count()
    }
}
