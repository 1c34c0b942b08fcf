//! Teleportation gadgets: Bell-pair gate teleportation and the selective
//! source, destination and gate variants.
//!
//! Every gadget returns the Pauli byproduct inferred from its measurement
//! outcomes. A byproduct `(x, z)` on one qubit means the qubit holds
//! `X^x Z^z` applied to the intended state.

mod bell;
mod selective;
pub mod tables;
mod transcript;

use num_complex::Complex64;

use crate::algebra::PauliString;
use crate::error::{Error, Result};
use crate::sim::{Backend, Gate, Qubit, Stage};

pub use bell::{
    bell_measure, gate_teleport, prepare_bell_pairs, prepare_gate_resource, ResourceState,
    TeleportOutput,
};
pub use selective::{
    is_diagonal, selective_destination_teleport, selective_gate_teleport,
    selective_source_teleport, Choice, DestinationGadget, SelectiveGateGadget, SelectiveOutput,
    SourceGadget,
};
pub use transcript::Transcript;

/// Applies `i^phase · X^x · Z^z` to `qubits`, folding the phase into the
/// backend's global phase. A qubit with both bits set gets one `Y` gate.
pub fn apply_pauli<B: Backend + ?Sized>(
    backend: &mut B,
    qubits: &[Qubit],
    p: &PauliString,
) -> Result<()> {
    if p.num_qubits() != qubits.len() {
        return Err(Error::SizeMismatch {
            expected: qubits.len(),
            got: p.num_qubits(),
        });
    }
    let mut phase = p.phase_complex();
    for (i, &q) in qubits.iter().enumerate() {
        match (p.x_bits()[i], p.z_bits()[i]) {
            (true, true) => {
                // X·Z = −i·Y.
                backend.apply(Gate::Y, &[q])?;
                phase *= Complex64::new(0.0, -1.0);
            }
            (true, false) => backend.apply(Gate::X, &[q])?,
            (false, true) => backend.apply(Gate::Z, &[q])?,
            (false, false) => {}
        }
    }
    backend.mul_global_phase(phase);
    Ok(())
}

/// Runs `f` with the log stage set to `stage`, then restores the old stage.
pub(crate) fn staged<B: Backend + ?Sized, T>(
    backend: &mut B,
    stage: Stage,
    f: impl FnOnce(&mut B) -> Result<T>,
) -> Result<T> {
    let old = backend.log().stage();
    backend.set_stage(stage);
    let out = f(backend);
    backend.set_stage(old);
    out
}
