//! Exact simulation backends.
//!
//! Qubits are addressed by stable labels. The order of [`Backend::live_qubits`]
//! is the tensor order and the first live qubit is the most significant bit of
//! the amplitude index. Labels are never reused; "recycling" frees the storage
//! of a measured or released qubit, not its name.

mod density;
mod dry;
mod events;
mod gate;
mod statevector;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Sampler;

pub use density::DensityMatrix;
pub use dry::DryRun;
pub use events::{Event, EventLog, Stage};
pub use gate::{Circuit, Gate, Op};
pub use statevector::{pure_trace_distance, Statevector, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Qubit(pub u32);

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

impl FromStr for Qubit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('q')
            .and_then(|d| d.parse().ok())
            .map(Qubit)
            .ok_or_else(|| Error::Parse(format!("bad qubit label {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl Basis {
    /// The other basis. Selective gadgets switch settings by swapping X and Z.
    pub fn flip(self) -> Self {
        match self {
            Basis::X => Basis::Z,
            Basis::Z => Basis::X,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::X => "X",
            Basis::Z => "Z",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" => Ok(Basis::X),
            "Z" => Ok(Basis::Z),
            _ => Err(Error::Parse(format!("bad basis {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub qubit: Qubit,
    pub basis: Basis,
    pub bit: u8,
}

/// Operations shared by the exact simulator and the bookkeeping-only backend.
///
/// Protocol code is written once against this trait. [`Statevector`] evolves
/// amplitudes; [`DryRun`] only tracks liveness and the event log, and draws
/// every measurement outcome uniformly.
pub trait Backend {
    /// Adds one fresh qubit per character of `init`, each in `0`, `1`, `+` or `-`.
    fn allocate(&mut self, init: &str) -> Result<Vec<Qubit>>;

    fn apply(&mut self, gate: Gate, targets: &[Qubit]) -> Result<()>;

    /// Measures and removes `qubit`.
    fn measure<S: Sampler + ?Sized>(
        &mut self,
        qubit: Qubit,
        basis: Basis,
        sampler: &mut S,
    ) -> Result<MeasurementOutcome>;

    /// Removes a qubit known to be in |0⟩ without recording a measurement.
    fn release(&mut self, qubit: Qubit) -> Result<()>;

    /// Takes ownership of `other` as a tensor factor on the right, returning
    /// the new labels of its qubits in `other`'s order.
    fn absorb(&mut self, other: Self) -> Result<Vec<Qubit>>
    where
        Self: Sized;

    fn live_qubits(&self) -> &[Qubit];

    fn mul_global_phase(&mut self, phase: Complex64);

    fn log(&self) -> &EventLog;

    fn log_mut(&mut self) -> &mut EventLog;

    fn set_stage(&mut self, stage: Stage) {
        self.log_mut().set_stage(stage);
    }

    fn is_live(&self, qubit: Qubit) -> bool {
        self.live_qubits().contains(&qubit)
    }

    fn num_live(&self) -> usize {
        self.live_qubits().len()
    }
}

/// Applies a positional circuit with `qubits[i]` playing circuit qubit `i`.
pub fn apply_circuit<B: Backend + ?Sized>(
    backend: &mut B,
    circuit: &Circuit,
    qubits: &[Qubit],
) -> Result<()> {
    if circuit.width != qubits.len() {
        return Err(Error::SizeMismatch {
            expected: circuit.width,
            got: qubits.len(),
        });
    }
    circuit.validate()?;
    let mut targets = Vec::with_capacity(4);
    for op in &circuit.ops {
        targets.clear();
        targets.extend(op.targets.iter().map(|&t| qubits[t]));
        backend.apply(op.gate, &targets)?;
    }
    Ok(())
}

pub(crate) fn check_targets(gate: Gate, targets: &[Qubit], live: &[Qubit]) -> Result<()> {
    gate.check_arity(targets.len())?;
    for (i, q) in targets.iter().enumerate() {
        if !live.contains(q) {
            return Err(Error::DeadQubit(*q));
        }
        if targets[..i].contains(q) {
            return Err(Error::DuplicateTarget(*q));
        }
    }
    Ok(())
}

pub(crate) fn check_init(init: &str) -> Result<()> {
    if init.is_empty() {
        return Err(Error::InvalidArgument(
            "allocate needs at least one qubit".into(),
        ));
    }
    match init.chars().find(|c| !matches!(c, '0' | '1' | '+' | '-')) {
        Some(c) => Err(Error::InvalidArgument(format!(
            "unknown initial state {c:?}"
        ))),
        None => Ok(()),
    }
}
