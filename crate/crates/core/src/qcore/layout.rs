use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{QError, QResult};

/// Which party holds a register. `Env` marks purifying or discarded degrees
/// of freedom that no party can act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Holder {
    Alice,
    Bob,
    Referee,
    Env,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub id: String,
    pub dim: usize,
    pub holder: Holder,
}

impl Register {
    pub fn new(id: impl Into<String>, dim: usize, holder: Holder) -> Self {
        Register { id: id.into(), dim, holder }
    }

    pub fn qubit(id: impl Into<String>, holder: Holder) -> Self {
        Register::new(id, 2, holder)
    }
}

/// Ordered list of registers. The global index convention is row-major by
/// position: the first register is the most significant digit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> QResult<Self> {
        let mut seen = HashSet::new();
        for r in &registers {
            if r.dim == 0 {
                return Err(QError::InvalidArgument(format!(
                    "register `{}` has dimension 0",
                    r.id
                )));
            }
            if !seen.insert(r.id.clone()) {
                return Err(QError::DuplicateRegister(r.id.clone()));
            }
        }
        Ok(RegisterLayout { registers })
    }

    /// Layout with no registers; total dimension 1.
    pub fn empty() -> Self {
        RegisterLayout { registers: vec![] }
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn position(&self, id: &str) -> QResult<usize> {
        self.registers
            .iter()
            .position(|r| r.id == id)
            .ok_or_else(|| QError::UnknownRegister(id.to_string()))
    }

    pub fn register(&self, id: &str) -> QResult<&Register> {
        Ok(&self.registers[self.position(id)?])
    }

    pub fn has(&self, id: &str) -> bool {
        self.registers.iter().any(|r| r.id == id)
    }

    /// Positions of the given ids, in the order given.
    pub fn positions(&self, ids: &[String]) -> QResult<Vec<usize>> {
        ids.iter().map(|id| self.position(id)).collect()
    }

    /// Stride (row-major) of the register at `pos`.
    pub fn stride(&self, pos: usize) -> usize {
        self.registers[pos + 1..].iter().map(|r| r.dim).product()
    }

    pub fn ids(&self) -> Vec<String> {
        self.registers.iter().map(|r| r.id.clone()).collect()
    }

    pub fn ids_held_by(&self, holder: Holder) -> Vec<String> {
        self.registers
            .iter()
            .filter(|r| r.holder == holder)
            .map(|r| r.id.clone())
            .collect()
    }

    pub fn set_holder(&mut self, id: &str, holder: Holder) -> QResult<()> {
        let pos = self.position(id)?;
        self.registers[pos].holder = holder;
        Ok(())
    }

    /// Concatenation; duplicate ids are rejected.
    pub fn join(&self, other: &RegisterLayout) -> QResult<RegisterLayout> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        RegisterLayout::new(regs)
    }

    pub(crate) fn registers_mut(&mut self) -> &mut Vec<Register> {
        &mut self.registers
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_are_row_major() {
        let l = RegisterLayout::new(vec![
            Register::new("a", 2, Holder::Alice),
            Register::new("b", 3, Holder::Bob),
            Register::new("c", 4, Holder::Bob),
        ])
        .unwrap();
        assert_eq!(l.total_dim(), 24);
        assert_eq!(l.stride(0), 12);
        assert_eq!(l.stride(1), 4);
        assert_eq!(l.stride(2), 1);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = RegisterLayout::new(vec![
            Register::qubit("q", Holder::Alice),
            Register::qubit("q", Holder::Bob),
        ]);
        assert!(matches!(r, Err(QError::DuplicateRegister(_))));
    }

    #[test]
    fn empty_layout_has_dim_one() {
        assert_eq!(RegisterLayout::empty().total_dim(), 1);
    }
}
