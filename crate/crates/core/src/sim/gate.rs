use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary gates understood by every backend.
///
/// `Mcz` is the multi-controlled Z on all of its targets (any arity ≥ 1).
/// It is simulated natively; the cost model expands it into Clifford+T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Cnot,
    Cz,
    Mcz,
}

impl Gate {
    pub fn name(self) -> &'static str {
        match self {
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::S => "S",
            Gate::Sdg => "Sdg",
            Gate::T => "T",
            Gate::Tdg => "Tdg",
            Gate::Cnot => "CNOT",
            Gate::Cz => "CZ",
            Gate::Mcz => "MCZ",
        }
    }

    /// Fixed arity, or `None` for the variadic `Mcz`.
    pub fn arity(self) -> Option<usize> {
        match self {
            Gate::Cnot | Gate::Cz => Some(2),
            Gate::Mcz => None,
            _ => Some(1),
        }
    }

    pub fn is_clifford(self, targets: usize) -> bool {
        match self {
            Gate::T | Gate::Tdg => false,
            Gate::Mcz => targets <= 2,
            _ => true,
        }
    }

    pub fn check_arity(self, got: usize) -> Result<()> {
        match self.arity() {
            Some(expected) if expected != got => Err(Error::Arity {
                gate: self.name(),
                expected,
                got,
            }),
            None if got == 0 => Err(Error::Arity {
                gate: self.name(),
                expected: 1,
                got,
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate on positional qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Op {
    pub gate: Gate,
    pub targets: Vec<usize>,
}

impl Op {
    pub fn new(gate: Gate, targets: impl Into<Vec<usize>>) -> Self {
        Self {
            gate,
            targets: targets.into(),
        }
    }
}

/// A gate sequence on `width` positional qubits `0..width`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    pub ops: Vec<Op>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate, targets: impl Into<Vec<usize>>) -> &mut Self {
        self.ops.push(Op::new(gate, targets));
        self
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for op in &self.ops {
            op.gate.check_arity(op.targets.len())?;
            for (i, &t) in op.targets.iter().enumerate() {
                if t >= self.width {
                    return Err(Error::InvalidArgument(format!(
                        "target {t} outside circuit width {}",
                        self.width
                    )));
                }
                if op.targets[..i].contains(&t) {
                    return Err(Error::InvalidArgument(format!(
                        "repeated target {t} in {}",
                        op.gate
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_clifford(&self) -> bool {
        self.ops
            .iter()
            .all(|op| op.gate.is_clifford(op.targets.len()))
    }
}
