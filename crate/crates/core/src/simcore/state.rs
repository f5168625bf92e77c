use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circuit::Circuit;
use super::exec::Program;
use super::gate::Gate;
use super::layout::RegisterLayout;
use crate::error::{Error, Result};

/// Tolerance on `| ||psi|| - 1 |` accepted as normalized input.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Bytes needed for a dense statevector of `qubits` qubits.
pub fn statevector_bytes(qubits: usize) -> u64 {
    (std::mem::size_of::<Complex64>() as u64) << qubits
}

/// Seeded sampling generator.
///
/// Sampling uses ChaCha8 seeded with `seed_from_u64(seed)`. Work split into
/// independent chunks draws chunk `c` from stream `c` of the same seed
/// (`set_stream(c)`), so the result never depends on how chunks are
/// scheduled. Single-threaded sampling uses stream 0.
pub fn sampling_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Dense statevector; qubit `i` is bit `i` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits < usize::BITS as usize - 1, "too many qubits");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    /// Allocates `|0...0>` only if it fits within `budget` bytes.
    pub fn with_budget(num_qubits: usize, budget: u64) -> Result<Self> {
        let bytes = statevector_bytes(num_qubits);
        if bytes > budget {
            return Err(Error::MemoryBudget {
                qubits: num_qubits,
                bytes,
                budget,
            });
        }
        Ok(Self::new(num_qubits))
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            Err(Error::NotNormalized(n))
        } else {
            Ok(())
        }
    }

    /// L2 distance to another state of the same size.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.check_normalized()?;
        gate.apply_to(&mut self.amplitudes);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        let program = Program::compile(circuit);
        self.apply_program(&program)
    }

    /// Runs an already compiled circuit; reuse the program when the same
    /// circuit is applied many times.
    pub fn apply_program(&mut self, program: &Program) -> Result<()> {
        if program.total_qubits() != self.num_qubits {
            return Err(Error::LayoutMismatch {
                circuit: program.total_qubits(),
                state: self.num_qubits,
            });
        }
        program.run(&mut self.amplitudes);
        Ok(())
    }

    /// Probability that `register` reads `value`.
    pub fn project_probability(&self, layout: &RegisterLayout, register: &str, value: u64) -> Result<f64> {
        let reg = layout.register(register)?;
        self.check_layout(layout)?;
        if value >= reg.dimension() {
            return Err(Error::RegisterValue {
                register: register.to_string(),
                value,
                width: reg.width,
            });
        }
        let mask = reg.mask();
        let want = (value as usize) << reg.offset;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Probability mass on basis states where every listed register holds
    /// the paired value.
    pub fn project_probability_all(&self, layout: &RegisterLayout, conditions: &[(&str, u64)]) -> Result<f64> {
        self.check_layout(layout)?;
        let mut mask = 0usize;
        let mut want = 0usize;
        for (name, value) in conditions {
            let reg = layout.register(name)?;
            mask |= reg.mask();
            want |= ((*value as usize) << reg.offset) & reg.mask();
        }
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn check_layout(&self, layout: &RegisterLayout) -> Result<()> {
        if layout.total_qubits() != self.num_qubits {
            return Err(Error::LayoutMismatch {
                circuit: layout.total_qubits(),
                state: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Draws `shots` basis indices from `|amplitude|^2`.
    ///
    /// The uniforms are sorted and matched against the cumulative
    /// distribution in one sweep, so memory stays proportional to `shots`
    /// rather than the state size.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let total: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if total <= 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let mut rng = sampling_rng(seed, 0);
        let mut draws: Vec<f64> = (0..shots).map(|_| rng.gen::<f64>() * total).collect();
        draws.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite draws"));

        let mut counts = BTreeMap::new();
        let mut cumulative = 0.0;
        let mut next = 0usize;
        let mut last_nonzero = 0usize;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            last_nonzero = i;
            cumulative += p;
            let start = next;
            while next < draws.len() && draws[next] < cumulative {
                next += 1;
            }
            if next > start {
                *counts.entry(i).or_insert(0) += (next - start) as u64;
            }
            if next == draws.len() {
                break;
            }
        }
        // draws lost to round-off at the top of the cumulative sum
        if next < draws.len() {
            *counts.entry(last_nonzero).or_insert(0) += (draws.len() - next) as u64;
        }
        Ok(counts)
    }
}
