//! Fused execution of circuits.
//!
//! A circuit is cut into groups of consecutive instructions that together
//! touch at most [`MAX_GROUP_QUBITS`] qubits. Each group costs one sweep over
//! the statevector: the amplitudes of every coset (fixed values of the qubits
//! outside the group) are gathered into a small buffer, the group is applied
//! there, and the buffer is scattered back. Within a group, runs of monomial
//! instructions (X, Z, phases, swaps and XOR oracles, with any controls) are
//! precomposed into one permutation-with-phases table, or a plain diagonal
//! when the permutation is the identity.

use num_complex::Complex64;

use super::circuit::{Circuit, Instruction, XorOracle};
use super::gate::{Control, Gate, GateKind};
use super::layout::Register;

/// Upper bound on the number of qubits fused into one group.
pub const MAX_GROUP_QUBITS: usize = 12;

/// Cosets are gathered `2^b` at a time, `b` counting free low qubits, while
/// the buffer stays within `2^MAX_BUFFER_BITS` amplitudes.
const MAX_BUFFER_BITS: usize = 15;
const MAX_BATCH_BITS: usize = 4;

#[derive(Clone, Debug)]
enum LocalOp {
    Gate(Gate),
    Diagonal(Vec<Complex64>),
    Monomial {
        dest: Vec<u32>,
        phase: Vec<Complex64>,
    },
}

#[derive(Clone, Debug)]
struct Group {
    /// Offsets of the local basis states relative to a coset base.
    offsets: Vec<usize>,
    /// Mask of the qubits belonging to the group.
    mask: usize,
    contiguous_low: bool,
    /// Buffer index is `local * 2^batch_bits + t` for `t` over consecutive
    /// cosets; gates in `ops` have their qubits shifted up by `batch_bits`.
    batch_bits: usize,
    /// The buffer is gathered as contiguous segments of `segment` amplitudes
    /// starting at these offsets.
    segment: usize,
    segment_offsets: Vec<usize>,
    ops: Vec<LocalOp>,
}

#[derive(Clone, Debug)]
enum Step {
    Group(Group),
    Gate(Gate),
    Oracle(XorOracle),
}

/// A circuit lowered to fused sweeps.
#[derive(Clone, Debug)]
pub struct Program {
    total_qubits: usize,
    steps: Vec<Step>,
}

impl Program {
    pub fn compile(circuit: &Circuit) -> Self {
        let total = circuit.layout().total_qubits();
        let limit = MAX_GROUP_QUBITS.min(total);
        let mut steps = Vec::new();
        let mut pending: Vec<&Instruction> = Vec::new();
        let mut mask = 0usize;

        for instr in circuit.instructions() {
            let qmask = instr.qubits().iter().fold(0usize, |m, &q| m | (1 << q));
            if qmask.count_ones() as usize > limit {
                if !pending.is_empty() {
                    steps.push(Step::Group(build_group(&pending, mask)));
                    pending.clear();
                    mask = 0;
                }
                steps.push(match instr {
                    Instruction::Gate(g) => Step::Gate(g.clone()),
                    Instruction::Oracle(o) => Step::Oracle(o.clone()),
                });
                continue;
            }
            if (mask | qmask).count_ones() as usize > limit {
                steps.push(Step::Group(build_group(&pending, mask)));
                pending.clear();
                mask = 0;
            }
            mask |= qmask;
            pending.push(instr);
        }
        if !pending.is_empty() {
            steps.push(Step::Group(build_group(&pending, mask)));
        }
        Self {
            total_qubits: total,
            steps,
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    /// Number of sweeps over the statevector one application costs.
    pub fn sweeps(&self) -> usize {
        self.steps.len()
    }

    pub(crate) fn run(&self, amps: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), 1usize << self.total_qubits);
        let mut buf = Vec::new();
        let mut scratch = Vec::new();
        for step in &self.steps {
            match step {
                Step::Group(g) => g.run(amps, &mut buf, &mut scratch),
                Step::Gate(g) => g.apply_to(amps),
                Step::Oracle(o) => o.apply_to(amps),
            }
        }
    }
}

fn build_group(instrs: &[&Instruction], mask: usize) -> Group {
    let qubits: Vec<usize> = (0..usize::BITS as usize).filter(|q| mask >> q & 1 == 1).collect();
    let k = qubits.len();
    let local_of = |q: usize| qubits.iter().position(|&x| x == q).expect("qubit in group");
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|l| {
            qubits
                .iter()
                .enumerate()
                .filter(|(bit, _)| l >> bit & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | (1 << q))
        })
        .collect();
    let contiguous_low = qubits.iter().enumerate().all(|(i, &q)| i == q);
    let batch_bits = (mask.trailing_zeros() as usize)
        .min(MAX_BATCH_BITS)
        .min(MAX_BUFFER_BITS.saturating_sub(k));
    let lowest = mask.trailing_zeros() as usize;
    let run_bits = if batch_bits == lowest {
        qubits.iter().enumerate().take_while(|(i, &q)| q == lowest + i).count()
    } else {
        0
    };
    let segment = 1usize << (batch_bits + run_bits);
    let segment_offsets: Vec<usize> = offsets.iter().copied().step_by(1 << run_bits).collect();

    let mut ops = Vec::new();
    let mut run: Vec<Instruction> = Vec::new();
    for instr in instrs {
        let local = localize(instr, &local_of);
        if local.is_monomial() {
            run.push(local);
        } else {
            flush_monomial_run(&mut run, k, &mut ops);
            if let Instruction::Gate(g) = local {
                ops.push(LocalOp::Gate(shift_gate(g, batch_bits)));
            }
        }
    }
    flush_monomial_run(&mut run, k, &mut ops);

    Group {
        offsets,
        mask,
        contiguous_low,
        batch_bits,
        segment,
        segment_offsets,
        ops,
    }
}

fn shift_gate(mut g: Gate, by: usize) -> Gate {
    g.target += by;
    if let GateKind::Swap(p) = g.kind {
        g.kind = GateKind::Swap(p + by);
    }
    for c in &mut g.controls {
        c.qubit += by;
    }
    g
}

fn localize(instr: &Instruction, local_of: &impl Fn(usize) -> usize) -> Instruction {
    match instr {
        Instruction::Gate(g) => {
            let kind = match g.kind {
                GateKind::Swap(p) => GateKind::Swap(local_of(p)),
                k => k,
            };
            Instruction::Gate(Gate {
                kind,
                target: local_of(g.target),
                controls: g
                    .controls
                    .iter()
                    .map(|c| Control {
                        qubit: local_of(c.qubit),
                        polarity: c.polarity,
                    })
                    .collect(),
            })
        }
        Instruction::Oracle(o) => {
            // registers are contiguous globally, so they stay contiguous among
            // the sorted group qubits
            let relocate = |r: &Register| Register {
                name: r.name.clone(),
                offset: local_of(r.offset),
                width: r.width,
            };
            Instruction::Oracle(XorOracle {
                input: relocate(&o.input),
                output: relocate(&o.output),
                table: o.table.clone(),
            })
        }
    }
}

fn flush_monomial_run(run: &mut Vec<Instruction>, k: usize, ops: &mut Vec<LocalOp>) {
    if run.is_empty() {
        return;
    }
    let m = 1usize << k;
    let mut dest = Vec::with_capacity(m);
    let mut phase = Vec::with_capacity(m);
    for l in 0..m {
        let mut idx = l;
        let mut ph = Complex64::new(1.0, 0.0);
        for instr in run.iter() {
            match instr {
                Instruction::Gate(g) => {
                    let (j, p) = g.map_basis(idx);
                    idx = j;
                    ph *= p;
                }
                Instruction::Oracle(o) => idx = o.map_basis(idx),
            }
        }
        dest.push(idx as u32);
        phase.push(ph);
    }
    run.clear();
    let identity = dest.iter().enumerate().all(|(l, &d)| d as usize == l);
    if identity {
        if phase.iter().any(|p| *p != Complex64::new(1.0, 0.0)) {
            ops.push(LocalOp::Diagonal(phase));
        }
    } else {
        ops.push(LocalOp::Monomial { dest, phase });
    }
}

impl LocalOp {
    /// `amps` holds `dim * batch` amplitudes, `batch` per local basis state.
    #[inline]
    fn apply(&self, amps: &mut [Complex64], batch: usize, scratch: &mut Vec<Complex64>) {
        match self {
            LocalOp::Gate(g) => g.apply_to(amps),
            LocalOp::Diagonal(d) => {
                for (chunk, p) in amps.chunks_exact_mut(batch).zip(d) {
                    for a in chunk {
                        *a *= p;
                    }
                }
            }
            LocalOp::Monomial { dest, phase } => {
                scratch.clear();
                scratch.resize(amps.len(), Complex64::new(0.0, 0.0));
                if batch == 1 {
                    for l in 0..amps.len() {
                        scratch[dest[l] as usize] = phase[l] * amps[l];
                    }
                } else {
                    for (l, src) in amps.chunks_exact(batch).enumerate() {
                        let d = dest[l] as usize * batch;
                        let p = phase[l];
                        for (o, a) in scratch[d..d + batch].iter_mut().zip(src) {
                            *o = p * a;
                        }
                    }
                }
                amps.copy_from_slice(scratch);
            }
        }
    }
}

impl Group {
    fn run(&self, amps: &mut [Complex64], buf: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        let m = self.offsets.len();
        if self.contiguous_low {
            for chunk in amps.chunks_exact_mut(m) {
                for op in &self.ops {
                    op.apply(chunk, 1, scratch);
                }
            }
            return;
        }
        let batch = 1usize << self.batch_bits;
        let skip = self.mask | (batch - 1);
        buf.clear();
        buf.resize(m * batch, Complex64::new(0.0, 0.0));
        let dim = amps.len();
        let mut base = 0usize;
        while base < dim {
            if self.segment == 1 {
                for (b, &off) in buf.iter_mut().zip(&self.offsets) {
                    *b = amps[base + off];
                }
            } else {
                for (b, &off) in buf.chunks_exact_mut(self.segment).zip(&self.segment_offsets) {
                    b.copy_from_slice(&amps[base + off..base + off + self.segment]);
                }
            }
            for op in &self.ops {
                op.apply(buf, batch, scratch);
            }
            if self.segment == 1 {
                for (b, &off) in buf.iter().zip(&self.offsets) {
                    amps[base + off] = *b;
                }
            } else {
                for (b, &off) in buf.chunks_exact(self.segment).zip(&self.segment_offsets) {
                    amps[base + off..base + off + self.segment].copy_from_slice(b);
                }
            }
            // next base whose group bits and batch bits are all zero
            base = ((base | skip) + 1) & !skip;
        }
    }
}
