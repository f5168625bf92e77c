use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named, contiguous block of qubits.
///
/// Bit `i` of a register value lives on qubit `offset + i`, so register
/// values are read little-endian out of the basis index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

impl Register {
    pub fn qubits(&self) -> Range<usize> {
        self.offset..self.offset + self.width
    }

    pub fn qubit(&self, bit: usize) -> usize {
        debug_assert!(bit < self.width);
        self.offset + bit
    }

    /// Mask of this register's bits inside a basis index.
    pub fn mask(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            ((1usize << self.width) - 1) << self.offset
        }
    }

    /// Reads the register value out of a full basis index.
    #[inline]
    pub fn extract(&self, index: usize) -> u64 {
        ((index & self.mask()) >> self.offset) as u64
    }

    /// Writes `value` into the register bits of `index`.
    #[inline]
    pub fn deposit(&self, index: usize, value: u64) -> usize {
        (index & !self.mask()) | (((value as usize) << self.offset) & self.mask())
    }

    pub fn dimension(&self) -> u64 {
        1u64 << self.width
    }
}

/// Ordered set of named registers covering `[0, total_qubits)` without gaps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total_qubits: usize,
}

impl RegisterLayout {
    /// Builds a layout by stacking registers from qubit 0 upwards in the
    /// given order.
    pub fn new<S: AsRef<str>>(registers: &[(S, usize)]) -> Result<Self> {
        let mut out = Vec::with_capacity(registers.len());
        let mut offset = 0;
        for (name, width) in registers {
            let name = name.as_ref();
            if name.is_empty() {
                return Err(Error::InvalidLayout("empty register name".into()));
            }
            if *width == 0 {
                return Err(Error::InvalidLayout(format!("register `{name}` has width 0")));
            }
            if out.iter().any(|r: &Register| r.name == name) {
                return Err(Error::InvalidLayout(format!("duplicate register `{name}`")));
            }
            out.push(Register {
                name: name.to_string(),
                offset,
                width: *width,
            });
            offset += width;
        }
        if offset > 40 {
            return Err(Error::InvalidLayout(format!(
                "{offset} qubits is beyond what a dense statevector can hold"
            )));
        }
        Ok(Self {
            registers: out,
            total_qubits: offset,
        })
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn has(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registers_are_contiguous_and_disjoint() {
        let layout = RegisterLayout::new(&[("D", 3), ("C", 4), ("a", 1)]).unwrap();
        assert_eq!(layout.total_qubits(), 8);
        let c = layout.register("C").unwrap();
        assert_eq!(c.qubits(), 3..7);
        let mut covered = 0usize;
        for r in layout.registers() {
            assert_eq!(covered & r.mask(), 0);
            covered |= r.mask();
        }
        assert_eq!(covered, (1 << 8) - 1);
    }

    #[test]
    fn extract_and_deposit_are_little_endian() {
        let layout = RegisterLayout::new(&[("D", 2), ("C", 3)]).unwrap();
        let c = layout.register("C").unwrap();
        let idx = c.deposit(0b11, 0b101);
        assert_eq!(idx, 0b101_11);
        assert_eq!(c.extract(idx), 0b101);
        assert_eq!(layout.register("D").unwrap().extract(idx), 0b11);
    }

    #[test]
    fn rejects_duplicates_and_unknown_names() {
        assert!(RegisterLayout::new(&[("C", 2), ("C", 1)]).is_err());
        let layout = RegisterLayout::new(&[("C", 2)]).unwrap();
        assert!(matches!(layout.register("E"), Err(Error::UnknownRegister(_))));
    }
}
