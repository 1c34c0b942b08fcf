use super::{apply_pauli, staged, Transcript};
use crate::algebra::{CliffordTableau, PauliString};
use crate::error::{Error, Result};
use crate::rng::Sampler;
use crate::sim::{apply_circuit, Backend, Basis, Circuit, Gate, Qubit, Stage};

/// Prepares `count` Bell pairs `(|00⟩ + |11⟩)/√2` on fresh qubits.
pub fn prepare_bell_pairs<B: Backend + ?Sized>(
    backend: &mut B,
    count: usize,
) -> Result<Vec<(Qubit, Qubit)>> {
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one Bell pair".into()));
    }
    (0..count)
        .map(|_| {
            let q = backend.allocate("+0")?;
            backend.apply(Gate::Cnot, &[q[0], q[1]])?;
            Ok((q[0], q[1]))
        })
        .collect()
}

/// Precomputed resource `|Γ(U)⟩`: `n` Bell pairs with `U` on the output halves.
#[derive(Debug, Clone)]
pub struct ResourceState<B> {
    pub state: B,
    pub n: usize,
    pub input_half: Vec<Qubit>,
    pub output_half: Vec<Qubit>,
    pub unitary_tag: String,
}

/// Builds `|Γ(U)⟩` inside `backend`, logging every operation as `Prep`.
pub fn prepare_gate_resource<B: Backend>(
    mut backend: B,
    u: &Circuit,
    n: usize,
    tag: impl Into<String>,
) -> Result<ResourceState<B>> {
    if u.width != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: u.width,
        });
    }
    let (input_half, output_half) = staged(&mut backend, Stage::Prep, |b| {
        let pairs = prepare_bell_pairs(b, n)?;
        let (input, output): (Vec<Qubit>, Vec<Qubit>) = pairs.into_iter().unzip();
        apply_circuit(b, u, &output)?;
        Ok((input, output))
    })?;
    Ok(ResourceState {
        state: backend,
        n,
        input_half,
        output_half,
        unitary_tag: tag.into(),
    })
}

/// Bell-basis measurement of each pair `(a, b)`: `CNOT a→b`, then `a` in the
/// X basis and `b` in the Z basis.
///
/// Returns, per pair, the byproduct bits `(x, z)` a teleportation through it
/// leaves behind: `x` is the Z-basis outcome and `z` the X-basis outcome.
pub fn bell_measure<B: Backend + ?Sized, S: Sampler + ?Sized>(
    backend: &mut B,
    pairs: &[(Qubit, Qubit)],
    sampler: &mut S,
    transcript: &mut Transcript,
) -> Result<Vec<(bool, bool)>> {
    let mut bits = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        backend.apply(Gate::Cnot, &[a, b])?;
        let mx = backend.measure(a, Basis::X, sampler)?;
        let mz = backend.measure(b, Basis::Z, sampler)?;
        transcript.outcomes.push(mx);
        transcript.outcomes.push(mz);
        bits.push((mz.bit == 1, mx.bit == 1));
    }
    Ok(bits)
}

#[derive(Debug, Clone)]
pub struct TeleportOutput<B> {
    pub state: B,
    /// Qubits holding the result, in logical order.
    pub qubits: Vec<Qubit>,
    /// `P = X^x Z^z` from the Bell outcomes; the raw output is `U·P·|ψ⟩`.
    pub byproduct: PauliString,
    pub transcript: Transcript,
}

/// Consumes `resource` on `input`.
///
/// Without a tableau the output is `U·P·|ψ⟩`. With the tableau of `U`, the
/// Pauli `U P† U†` is applied and the output is `U|ψ⟩` up to global phase.
pub fn gate_teleport<B: Backend, S: Sampler + ?Sized>(
    input: B,
    resource: ResourceState<B>,
    tableau: Option<&CliffordTableau>,
    sampler: &mut S,
) -> Result<TeleportOutput<B>> {
    let n = resource.n;
    if input.num_live() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: input.num_live(),
        });
    }
    if let Some(t) = tableau {
        if t.num_qubits() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: t.num_qubits(),
            });
        }
    }
    let mut state = resource.state;
    let mut transcript = Transcript::default();
    let (byproduct, output) = staged(&mut state, Stage::Consume, |b| {
        let psi = b.absorb(input)?;
        let pairs: Vec<(Qubit, Qubit)> = psi
            .iter()
            .copied()
            .zip(resource.input_half.iter().copied())
            .collect();
        let bits = bell_measure(b, &pairs, sampler, &mut transcript)?;
        let (x, z): (Vec<bool>, Vec<bool>) = bits.into_iter().unzip();
        let byproduct = PauliString::from_bits(x, z, 0)?;
        if let Some(t) = tableau {
            let correction = t.conjugate(&byproduct.adjoint())?;
            apply_pauli(b, &resource.output_half, &correction)?;
        }
        Ok((byproduct, resource.output_half.clone()))
    })?;
    transcript.byproducts.push(byproduct.clone());
    Ok(TeleportOutput {
        state,
        qubits: output,
        byproduct,
        transcript,
    })
}
