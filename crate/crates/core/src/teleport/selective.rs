use super::tables::{ByproductTable, DESTINATION_TABLE, SOURCE_TABLE};
use super::{staged, Transcript};
use crate::algebra::PauliString;
use crate::error::{Error, Result};
use crate::rng::Sampler;
use crate::sim::{apply_circuit, Backend, Basis, Circuit, Gate, MeasurementOutcome, Qubit, Stage};

/// Measurement setting of a selective gadget.
///
/// `A` selects the first destination, the first source, or the first unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Choice {
    A,
    B,
}

impl Choice {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Choice::B
        } else {
            Choice::A
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Choice::A => 0,
            Choice::B => 1,
        }
    }

    fn index(self) -> usize {
        self.bit() as usize
    }
}

fn lookup(table: &ByproductTable, choice: Choice, first: u8, second: u8) -> (bool, bool) {
    let (x, z) = table[choice.index()][((first << 1) | second) as usize];
    (x == 1, z == 1)
}

/// Single-qubit selective destination teleportation.
///
/// Wires: `ancilla = |0⟩`, `dest_a = dest_b = |+⟩`. The circuit is
/// `CNOT source→ancilla`, `CNOT dest_a→source`, `CNOT dest_b→ancilla`; only the
/// last gate is independent of the source and can be staged early.
/// Setting `A` measures the source in Z and the ancilla in X; `B` swaps them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DestinationGadget {
    pub ancilla: Qubit,
    pub dest_a: Qubit,
    pub dest_b: Qubit,
}

impl DestinationGadget {
    pub fn prepare<B: Backend + ?Sized>(backend: &mut B) -> Result<Self> {
        let q = backend.allocate("0++")?;
        let g = Self {
            ancilla: q[0],
            dest_a: q[1],
            dest_b: q[2],
        };
        backend.apply(Gate::Cnot, &[g.dest_b, g.ancilla])?;
        Ok(g)
    }

    pub fn entangle<B: Backend + ?Sized>(&self, backend: &mut B, source: Qubit) -> Result<()> {
        backend.apply(Gate::Cnot, &[source, self.ancilla])?;
        backend.apply(Gate::Cnot, &[self.dest_a, source])
    }

    /// Returns the chosen destination, the byproduct bits on it, and the two
    /// outcomes (source first).
    pub fn measure<B: Backend + ?Sized, S: Sampler + ?Sized>(
        &self,
        backend: &mut B,
        source: Qubit,
        choice: Choice,
        sampler: &mut S,
    ) -> Result<(Qubit, (bool, bool), [MeasurementOutcome; 2])> {
        let source_basis = match choice {
            Choice::A => Basis::Z,
            Choice::B => Basis::X,
        };
        let ms = backend.measure(source, source_basis, sampler)?;
        let ma = backend.measure(self.ancilla, source_basis.flip(), sampler)?;
        let chosen = match choice {
            Choice::A => self.dest_a,
            Choice::B => self.dest_b,
        };
        Ok((
            chosen,
            lookup(&DESTINATION_TABLE, choice, ms.bit, ma.bit),
            [ms, ma],
        ))
    }

    pub fn unchosen(&self, choice: Choice) -> Qubit {
        match choice {
            Choice::A => self.dest_b,
            Choice::B => self.dest_a,
        }
    }
}

/// Single-qubit selective source teleportation onto `dest = |0⟩` via
/// `CNOT a→dest` and `CNOT b→dest`. Setting `A` measures `a` in X and `b` in
/// Z, teleporting `a`; `B` swaps the bases and teleports `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceGadget {
    pub dest: Qubit,
}

impl SourceGadget {
    pub fn prepare<B: Backend + ?Sized>(backend: &mut B) -> Result<Self> {
        Ok(Self {
            dest: backend.allocate("0")?[0],
        })
    }

    pub fn entangle<B: Backend + ?Sized>(&self, backend: &mut B, a: Qubit, b: Qubit) -> Result<()> {
        backend.apply(Gate::Cnot, &[a, self.dest])?;
        backend.apply(Gate::Cnot, &[b, self.dest])
    }

    /// Returns the byproduct bits on `dest` and the outcomes (`a` first).
    pub fn measure<B: Backend + ?Sized, S: Sampler + ?Sized>(
        &self,
        backend: &mut B,
        a: Qubit,
        b: Qubit,
        choice: Choice,
        sampler: &mut S,
    ) -> Result<((bool, bool), [MeasurementOutcome; 2])> {
        let a_basis = match choice {
            Choice::A => Basis::X,
            Choice::B => Basis::Z,
        };
        let ma = backend.measure(a, a_basis, sampler)?;
        let mb = backend.measure(b, a_basis.flip(), sampler)?;
        Ok((lookup(&SOURCE_TABLE, choice, ma.bit, mb.bit), [ma, mb]))
    }
}

/// Teleports `source` into one of two fresh qubits. Returns the chosen
/// destination, the other destination (left holding a Pauli-rotated `|+⟩`)
/// and the byproduct on the chosen one.
pub fn selective_destination_teleport<B: Backend + ?Sized, S: Sampler + ?Sized>(
    backend: &mut B,
    source: Qubit,
    choice: Choice,
    sampler: &mut S,
    transcript: &mut Transcript,
) -> Result<(Qubit, Qubit, PauliString)> {
    let g = staged(backend, Stage::Prep, |b| DestinationGadget::prepare(b))?;
    let (chosen, (x, z), outcomes) = staged(backend, Stage::Consume, |b| {
        g.entangle(b, source)?;
        g.measure(b, source, choice, sampler)
    })?;
    let p = PauliString::from_bits(vec![x], vec![z], 0)?;
    transcript.record(&outcomes, Some(choice), std::slice::from_ref(&p));
    Ok((chosen, g.unchosen(choice), p))
}

/// Teleports `a` or `b` into a fresh qubit. Returns it and its byproduct.
pub fn selective_source_teleport<B: Backend + ?Sized, S: Sampler + ?Sized>(
    backend: &mut B,
    a: Qubit,
    b: Qubit,
    choice: Choice,
    sampler: &mut S,
    transcript: &mut Transcript,
) -> Result<(Qubit, PauliString)> {
    let g = staged(backend, Stage::Prep, |be| SourceGadget::prepare(be))?;
    let ((x, z), outcomes) = staged(backend, Stage::Consume, |be| {
        g.entangle(be, a, b)?;
        g.measure(be, a, b, choice, sampler)
    })?;
    let p = PauliString::from_bits(vec![x], vec![z], 0)?;
    transcript.record(&outcomes, Some(choice), std::slice::from_ref(&p));
    Ok((g.dest, p))
}

/// True when every gate of the circuit is diagonal in the computational basis.
pub fn is_diagonal(c: &Circuit) -> bool {
    c.ops.iter().all(|op| {
        matches!(
            op.gate,
            Gate::Z | Gate::S | Gate::Sdg | Gate::T | Gate::Tdg | Gate::Cz | Gate::Mcz
        )
    })
}

/// Per-qubit selective gate teleportation registers, one set of four wires
/// (`ancilla |0⟩`, `dest_a |+⟩`, `dest_b |+⟩`, `out |0⟩`) per input qubit.
///
/// For diagonal `U_A`, `U_B` every gate that does not touch the input
/// commutes past the input's gates, so the whole register can be prepared
/// before the input exists.
#[derive(Debug, Clone)]
pub struct SelectiveGateGadget {
    dest: Vec<DestinationGadget>,
    src: Vec<SourceGadget>,
    staged: bool,
}

#[derive(Debug, Clone)]
pub struct SelectiveOutput {
    /// Qubits holding `P1·U·P2·|ψ⟩`, one per input qubit.
    pub qubits: Vec<Qubit>,
    /// Byproduct after the chosen unitary.
    pub p1: PauliString,
    /// Byproduct before the chosen unitary.
    pub p2: PauliString,
    pub outcomes: Vec<MeasurementOutcome>,
}

impl SelectiveGateGadget {
    /// Allocates and fully prepares the registers for diagonal `ua`, `ub`.
    pub fn prepare<B: Backend + ?Sized>(
        backend: &mut B,
        ua: &Circuit,
        ub: &Circuit,
    ) -> Result<Self> {
        if !is_diagonal(ua) || !is_diagonal(ub) {
            return Err(Error::InvalidArgument(
                "only diagonal unitaries can be staged before the input".into(),
            ));
        }
        let mut g = Self::allocate(backend, ua.width, ub.width)?;
        g.wire_unitaries(backend, ua, ub)?;
        g.staged = true;
        Ok(g)
    }

    fn allocate<B: Backend + ?Sized>(backend: &mut B, wa: usize, wb: usize) -> Result<Self> {
        if wa != wb || wa == 0 {
            return Err(Error::SizeMismatch {
                expected: wa,
                got: wb,
            });
        }
        let mut dest = Vec::with_capacity(wa);
        let mut src = Vec::with_capacity(wa);
        for _ in 0..wa {
            dest.push(DestinationGadget::prepare(backend)?);
            src.push(SourceGadget::prepare(backend)?);
        }
        Ok(Self {
            dest,
            src,
            staged: false,
        })
    }

    fn wire_unitaries<B: Backend + ?Sized>(
        &self,
        backend: &mut B,
        ua: &Circuit,
        ub: &Circuit,
    ) -> Result<()> {
        let a: Vec<Qubit> = self.dest.iter().map(|d| d.dest_a).collect();
        let b: Vec<Qubit> = self.dest.iter().map(|d| d.dest_b).collect();
        apply_circuit(backend, ua, &a)?;
        apply_circuit(backend, ub, &b)?;
        for (d, s) in self.dest.iter().zip(&self.src) {
            s.entangle(backend, d.dest_a, d.dest_b)?;
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.dest.len()
    }

    /// Qubits owned by the gadget, excluding inputs.
    pub fn qubit_count(&self) -> usize {
        4 * self.width()
    }

    /// Consumes a prepared gadget on `inputs`.
    pub fn consume<B: Backend + ?Sized, S: Sampler + ?Sized>(
        self,
        backend: &mut B,
        inputs: &[Qubit],
        choice: Choice,
        sampler: &mut S,
    ) -> Result<SelectiveOutput> {
        if !self.staged {
            return Err(Error::InvalidArgument(
                "gadget registers were not prepared".into(),
            ));
        }
        if inputs.len() != self.width() {
            return Err(Error::SizeMismatch {
                expected: self.width(),
                got: inputs.len(),
            });
        }
        for (d, &q) in self.dest.iter().zip(inputs) {
            d.entangle(backend, q)?;
        }
        self.measure_all(backend, inputs, choice, sampler)
    }

    fn measure_all<B: Backend + ?Sized, S: Sampler + ?Sized>(
        &self,
        backend: &mut B,
        inputs: &[Qubit],
        choice: Choice,
        sampler: &mut S,
    ) -> Result<SelectiveOutput> {
        let n = self.width();
        let mut outcomes = Vec::with_capacity(4 * n);
        let (mut x2, mut z2) = (vec![false; n], vec![false; n]);
        for (i, (d, &q)) in self.dest.iter().zip(inputs).enumerate() {
            let (_, (x, z), m) = d.measure(backend, q, choice, sampler)?;
            (x2[i], z2[i]) = (x, z);
            outcomes.extend(m);
        }
        let (mut x1, mut z1) = (vec![false; n], vec![false; n]);
        for (i, (d, s)) in self.dest.iter().zip(&self.src).enumerate() {
            let ((x, z), m) = s.measure(backend, d.dest_a, d.dest_b, choice, sampler)?;
            (x1[i], z1[i]) = (x, z);
            outcomes.extend(m);
        }
        Ok(SelectiveOutput {
            qubits: self.src.iter().map(|s| s.dest).collect(),
            p1: PauliString::from_bits(x1, z1, 0)?,
            p2: PauliString::from_bits(x2, z2, 0)?,
            outcomes,
        })
    }
}

/// Applies `U_A` or `U_B` to the state on `inputs` by selective gate
/// teleportation. The result is `P1·U·P2·|ψ⟩` on the returned qubits.
///
/// Diagonal unitaries are staged ahead of the input. Other unitaries follow
/// the gadget's drawn order, with the unitaries applied after the input has
/// been entangled, and every gate is then logged as consume-side work.
pub fn selective_gate_teleport<B: Backend + ?Sized, S: Sampler + ?Sized>(
    backend: &mut B,
    inputs: &[Qubit],
    ua: &Circuit,
    ub: &Circuit,
    choice: Choice,
    sampler: &mut S,
    transcript: &mut Transcript,
) -> Result<SelectiveOutput> {
    if ua.width != inputs.len() {
        return Err(Error::SizeMismatch {
            expected: inputs.len(),
            got: ua.width,
        });
    }
    let out = if is_diagonal(ua) && is_diagonal(ub) {
        let g = staged(backend, Stage::Prep, |b| {
            SelectiveGateGadget::prepare(b, ua, ub)
        })?;
        staged(backend, Stage::Consume, |b| {
            g.consume(b, inputs, choice, sampler)
        })?
    } else {
        let g = staged(backend, Stage::Prep, |b| {
            SelectiveGateGadget::allocate(b, ua.width, ub.width)
        })?;
        staged(backend, Stage::Consume, |b| {
            for (d, &q) in g.dest.iter().zip(inputs) {
                d.entangle(b, q)?;
            }
            g.wire_unitaries(b, ua, ub)?;
            g.measure_all(b, inputs, choice, sampler)
        })?
    };
    transcript.record(
        &out.outcomes,
        Some(choice),
        &[out.p2.clone(), out.p1.clone()],
    );
    Ok(out)
}
