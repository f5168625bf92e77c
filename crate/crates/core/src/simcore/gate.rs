use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which basis value of a control qubit enables the gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    /// Fires when the control qubit is `|1>`.
    One,
    /// Fires when the control qubit is `|0>` (anti-control).
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

/// Gate kinds understood by the simulator.
///
/// `RotY(theta)` is `[[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]]`
/// and `Phase(theta)` is `diag(1, e^{i theta})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Z,
    RotY(f64),
    Phase(f64),
    /// Exchanges the target with `partner`.
    Swap(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn h(target: usize) -> Self {
        Self::new(GateKind::H, target)
    }

    pub fn x(target: usize) -> Self {
        Self::new(GateKind::X, target)
    }

    pub fn z(target: usize) -> Self {
        Self::new(GateKind::Z, target)
    }

    pub fn ry(angle: f64, target: usize) -> Self {
        Self::new(GateKind::RotY(angle), target)
    }

    pub fn phase(angle: f64, target: usize) -> Self {
        Self::new(GateKind::Phase(angle), target)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap(b), a)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::x(target).controlled(control)
    }

    /// Adds a control on `|1>`.
    pub fn controlled(mut self, qubit: usize) -> Self {
        self.controls.push(Control {
            qubit,
            polarity: Polarity::One,
        });
        self
    }

    /// Adds a control on `|0>`.
    pub fn anti_controlled(mut self, qubit: usize) -> Self {
        self.controls.push(Control {
            qubit,
            polarity: Polarity::Zero,
        });
        self
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    /// Every qubit the gate touches, target first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        let partner = match self.kind {
            GateKind::Swap(p) => Some(p),
            _ => None,
        };
        std::iter::once(self.target)
            .chain(partner)
            .chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn validate(&self, total_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= total_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    total: total_qubits,
                });
            }
        }
        let mut seen: Vec<usize> = self.qubits().collect();
        let n = seen.len();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::InvalidGate(format!(
                "gate {:?} on {} reuses a qubit among target/partner/controls",
                self.kind, self.target
            )));
        }
        match self.kind {
            GateKind::RotY(a) | GateKind::Phase(a) if !a.is_finite() => {
                Err(Error::InvalidGate(format!("non-finite angle {a}")))
            }
            _ => Ok(()),
        }
    }

    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            GateKind::RotY(a) => GateKind::RotY(-a),
            GateKind::Phase(a) => GateKind::Phase(-a),
            k => k,
        };
        Self {
            kind,
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    /// True when the gate maps each basis state onto a single basis state
    /// (a permutation with phases).
    pub fn is_monomial(&self) -> bool {
        !matches!(self.kind, GateKind::H | GateKind::RotY(_))
    }

    /// `(mask, value)` such that the gate fires on indices with
    /// `index & mask == value`.
    #[inline]
    pub fn control_pattern(&self) -> (usize, usize) {
        let mut mask = 0;
        let mut value = 0;
        for c in &self.controls {
            mask |= 1 << c.qubit;
            if c.polarity == Polarity::One {
                value |= 1 << c.qubit;
            }
        }
        (mask, value)
    }

    /// 2x2 matrix `[[m00, m01], [m10, m11]]` for single-target kinds.
    pub fn matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = |re: f64| Complex64::new(re, 0.0);
        let zero = c(0.0);
        let one = c(1.0);
        Some(match self.kind {
            GateKind::H => [
                [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
                [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
            ],
            GateKind::X => [[zero, one], [one, zero]],
            GateKind::Z => [[one, zero], [zero, c(-1.0)]],
            GateKind::RotY(theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co), c(-s)], [c(s), c(co)]]
            }
            GateKind::Phase(theta) => [[one, zero], [zero, Complex64::from_polar(1.0, theta)]],
            GateKind::Swap(_) => return None,
        })
    }

    /// Image of basis state `index` under a monomial gate.
    pub fn map_basis(&self, index: usize) -> (usize, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let (mask, value) = self.control_pattern();
        if index & mask != value {
            return (index, one);
        }
        let t = 1usize << self.target;
        match self.kind {
            GateKind::X => (index ^ t, one),
            GateKind::Z => {
                if index & t != 0 {
                    (index, -one)
                } else {
                    (index, one)
                }
            }
            GateKind::Phase(theta) => {
                if index & t != 0 {
                    (index, Complex64::from_polar(1.0, theta))
                } else {
                    (index, one)
                }
            }
            GateKind::Swap(p) => {
                let pb = 1usize << p;
                let a = index & t != 0;
                let b = index & pb != 0;
                if a != b {
                    (index ^ t ^ pb, one)
                } else {
                    (index, one)
                }
            }
            GateKind::H | GateKind::RotY(_) => panic!("map_basis called on a non-monomial gate"),
        }
    }

    /// Applies the gate in place to `amps`, a dense vector whose length is a
    /// power of two covering every qubit the gate touches.
    pub(crate) fn apply_to(&self, amps: &mut [Complex64]) {
        let (cmask, cval) = self.control_pattern();
        let t = 1usize << self.target;
        match self.kind {
            GateKind::Swap(p) => {
                let pb = 1usize << p;
                for i in 0..amps.len() {
                    // visit each swapped pair once, from the (1, 0) side
                    if i & t != 0 && i & pb == 0 && i & cmask == cval {
                        amps.swap(i, i ^ t ^ pb);
                    }
                }
            }
            GateKind::Z | GateKind::Phase(_) => {
                let ph = match self.kind {
                    GateKind::Phase(theta) => Complex64::from_polar(1.0, theta),
                    _ => Complex64::new(-1.0, 0.0),
                };
                let mask = cmask | t;
                let val = cval | t;
                if cmask == 0 {
                    for chunk in amps.chunks_exact_mut(2 * t) {
                        for a in &mut chunk[t..] {
                            *a *= ph;
                        }
                    }
                } else {
                    for (i, a) in amps.iter_mut().enumerate() {
                        if i & mask == val {
                            *a *= ph;
                        }
                    }
                }
            }
            GateKind::X => {
                if cmask == 0 {
                    for chunk in amps.chunks_exact_mut(2 * t) {
                        let (lo, hi) = chunk.split_at_mut(t);
                        lo.swap_with_slice(hi);
                    }
                } else {
                    let n = amps.len();
                    let mut block = 0;
                    while block < n {
                        for i in block..block + t {
                            if i & cmask == cval {
                                amps.swap(i, i + t);
                            }
                        }
                        block += 2 * t;
                    }
                }
            }
            GateKind::H | GateKind::RotY(_) => {
                // both matrices are real
                let m = self.matrix().expect("single-target gate");
                let (m00, m01, m10, m11) = (m[0][0].re, m[0][1].re, m[1][0].re, m[1][1].re);
                let n = amps.len();
                let mut block = 0;
                while block < n {
                    if cmask == 0 {
                        let (lo, hi) = amps[block..block + 2 * t].split_at_mut(t);
                        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                            let (x, y) = (*a, *b);
                            *a = x * m00 + y * m01;
                            *b = x * m10 + y * m11;
                        }
                    } else {
                        for i in block..block + t {
                            if i & cmask != cval {
                                continue;
                            }
                            let (x, y) = (amps[i], amps[i + t]);
                            amps[i] = x * m00 + y * m01;
                            amps[i + t] = x * m10 + y * m11;
                        }
                    }
                    block += 2 * t;
                }
            }
        }
    }
}
