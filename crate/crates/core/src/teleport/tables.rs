//! Outcome-to-byproduct tables of the selective gadgets.
//!
//! Entry `[choice][(first << 1) | second]` is the byproduct `(x, z)` for the
//! outcome bits of the gadget's two measurements: source then ancilla for the
//! destination gadget, `a` then `b` for the source gadget. In every case `x`
//! is the outcome of the Z-measured wire and `z` that of the X-measured wire.
//!
//! The tables are frozen here; [`derive_destination_table`] and
//! [`derive_source_table`] recompute them by simulating every branch.

use num_complex::Complex64;

use super::selective::{Choice, DestinationGadget, SourceGadget};
use crate::error::{Error, Result};
use crate::rng::ForcedOutcomes;
use crate::sim::{Backend, DensityMatrix, Qubit, Statevector};

pub type ByproductTable = [[(u8, u8); 4]; 2];

pub const DESTINATION_TABLE: ByproductTable = [
    [(0, 0), (0, 1), (1, 0), (1, 1)],
    [(0, 0), (1, 0), (0, 1), (1, 1)],
];

pub const SOURCE_TABLE: ByproductTable = [
    [(0, 0), (1, 0), (0, 1), (1, 1)],
    [(0, 0), (0, 1), (1, 0), (1, 1)],
];

/// Fixed generic single-qubit probe state used by the derivations.
fn probe(seed: f64) -> [Complex64; 2] {
    [
        Complex64::new(seed.cos(), 0.0),
        Complex64::from_polar(seed.sin(), 0.7 + seed),
    ]
}

fn pauli_on(x: u8, z: u8, psi: [Complex64; 2]) -> [Complex64; 2] {
    let mut v = psi;
    if z == 1 {
        v[1] = -v[1];
    }
    if x == 1 {
        v.swap(0, 1);
    }
    v
}

/// Finds the `(x, z)` with `X^x Z^z |ψ⟩` equal to the single-qubit state of
/// `qubit`, which must be unentangled from the rest.
fn identify(state: &Statevector, qubit: Qubit, psi: [Complex64; 2]) -> Result<(u8, u8)> {
    let rho = state.reduced_density(&[qubit])?;
    for (x, z) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let target = DensityMatrix::from_pure(&pauli_on(x, z, psi))?;
        if rho.trace_distance(&target)? < 1e-9 {
            return Ok((x, z));
        }
    }
    Err(Error::InvalidArgument(format!(
        "output on {qubit} is not a Pauli image of the input"
    )))
}

fn branch_bits(branch: usize) -> (u8, u8) {
    ((branch >> 1) as u8, (branch & 1) as u8)
}

/// Recomputes the destination table by running all four branches of both
/// settings on a generic input.
pub fn derive_destination_table() -> Result<ByproductTable> {
    let psi = probe(0.4);
    let mut table = [[(0, 0); 4]; 2];
    for choice in [Choice::A, Choice::B] {
        for (branch, entry) in table[choice.bit() as usize].iter_mut().enumerate() {
            let mut state = Statevector::from_amplitudes(psi.to_vec())?;
            let source = state.live_qubits()[0];
            let g = DestinationGadget::prepare(&mut state)?;
            g.entangle(&mut state, source)?;
            let mut forced = ForcedOutcomes::branch(branch as u64, 2);
            let (chosen, _, m) = g.measure(&mut state, source, choice, &mut forced)?;
            debug_assert_eq!((m[0].bit, m[1].bit), branch_bits(branch));
            *entry = identify(&state, chosen, psi)?;
            let other = state.reduced_density(&[g.unchosen(choice)])?;
            let plus = [Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
            if identify(&state, g.unchosen(choice), plus).is_err() {
                return Err(Error::InvalidArgument(format!(
                    "unchosen destination is not a Pauli image of |+>: {:?}",
                    other.matrix()
                )));
            }
        }
    }
    Ok(table)
}

/// Recomputes the source table with distinct generic states on both sources.
pub fn derive_source_table() -> Result<ByproductTable> {
    let alpha = probe(0.4);
    let beta = probe(1.1);
    let mut table = [[(0, 0); 4]; 2];
    for choice in [Choice::A, Choice::B] {
        for (branch, entry) in table[choice.bit() as usize].iter_mut().enumerate() {
            let joint: Vec<Complex64> = alpha
                .iter()
                .flat_map(|a| beta.iter().map(move |b| a * b))
                .collect();
            let mut state = Statevector::from_amplitudes(joint)?;
            let (a, b) = (state.live_qubits()[0], state.live_qubits()[1]);
            let g = SourceGadget::prepare(&mut state)?;
            g.entangle(&mut state, a, b)?;
            let mut forced = ForcedOutcomes::branch(branch as u64, 2);
            g.measure(&mut state, a, b, choice, &mut forced)?;
            let expected = match choice {
                Choice::A => alpha,
                Choice::B => beta,
            };
            *entry = identify(&state, g.dest, expected)?;
        }
    }
    Ok(table)
}

/// Compares candidate tables against freshly derived ones.
pub fn verify_tables(destination: &ByproductTable, source: &ByproductTable) -> Result<()> {
    let d = derive_destination_table()?;
    if &d != destination {
        return Err(Error::InvalidArgument(format!(
            "destination table {destination:?} disagrees with simulation {d:?}"
        )));
    }
    let s = derive_source_table()?;
    if &s != source {
        return Err(Error::InvalidArgument(format!(
            "source table {source:?} disagrees with simulation {s:?}"
        )));
    }
    Ok(())
}
