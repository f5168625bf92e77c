//! Dense statevector simulator: registers, gates, circuits and sampling.
//!
//! Amplitudes are `f64` complex numbers. A 27-qubit state takes 2 GiB.

mod circuit;
mod exec;
mod gate;
mod layout;
mod state;

pub use circuit::{Circuit, Instruction, XorOracle};
pub use exec::{Program, MAX_GROUP_QUBITS};
pub use gate::{Control, Gate, GateKind, Polarity};
pub use layout::{Register, RegisterLayout};
pub use state::{sampling_rng, statevector_bytes, StateVector, NORM_TOLERANCE};
