use crate::error::{Error, Result};
use crate::rng::Sampler;
use crate::sim::{Backend, Basis, Gate, Op, Qubit};

/// One step of a multi-controlled Z decomposition.
///
/// Wire indices `0..targets` are the gate's qubits and `targets..` are
/// ancillas that start in `|0⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompStep {
    Gate(Op),
    /// Measure `ancilla` in the X basis; on outcome 1 apply `CZ` to `controls`.
    /// Uncomputes `ancilla = controls[0] ∧ controls[1]` without T gates.
    MeasureUncompute {
        ancilla: usize,
        controls: [usize; 2],
    },
}

/// Clifford+T realization of `C^{j−1}Z` on `targets` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MczDecomposition {
    pub targets: usize,
    pub ancillas: usize,
    pub steps: Vec<DecompStep>,
}

impl MczDecomposition {
    pub fn t_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, DecompStep::Gate(op) if matches!(op.gate, Gate::T | Gate::Tdg)))
            .count()
    }

    /// Runs the decomposition on `qubits`, borrowing fresh ancillas from the
    /// backend. Ancillas are consumed by their uncompute measurements.
    pub fn apply<B: Backend, S: Sampler + ?Sized>(
        &self,
        backend: &mut B,
        qubits: &[Qubit],
        sampler: &mut S,
    ) -> Result<()> {
        if qubits.len() != self.targets {
            return Err(Error::Arity {
                gate: "mcz",
                expected: self.targets,
                got: qubits.len(),
            });
        }
        let mut wires = qubits.to_vec();
        if self.ancillas > 0 {
            wires.extend(backend.allocate(&"0".repeat(self.ancillas))?);
        }
        for step in &self.steps {
            match step {
                DecompStep::Gate(op) => {
                    let qs: Vec<Qubit> = op.targets.iter().map(|&t| wires[t]).collect();
                    backend.apply(op.gate, &qs)?;
                }
                DecompStep::MeasureUncompute { ancilla, controls } => {
                    let m = backend.measure(wires[*ancilla], Basis::X, sampler)?;
                    if m.bit == 1 {
                        backend.apply(Gate::Cz, &[wires[controls[0]], wires[controls[1]]])?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn op(gate: Gate, targets: &[usize]) -> DecompStep {
    DecompStep::Gate(Op {
        gate,
        targets: targets.to_vec(),
    })
}

/// Seven-T `CCZ` on wires `a, b, c`.
fn ccz(a: usize, b: usize, c: usize) -> Vec<DecompStep> {
    vec![
        op(Gate::Cnot, &[b, c]),
        op(Gate::Tdg, &[c]),
        op(Gate::Cnot, &[a, c]),
        op(Gate::T, &[c]),
        op(Gate::Cnot, &[b, c]),
        op(Gate::Tdg, &[c]),
        op(Gate::Cnot, &[a, c]),
        op(Gate::T, &[b]),
        op(Gate::T, &[c]),
        op(Gate::Cnot, &[a, b]),
        op(Gate::T, &[a]),
        op(Gate::Tdg, &[b]),
        op(Gate::Cnot, &[a, b]),
    ]
}

/// Frozen construction for `C^{j−1}Z` on `j` qubits.
///
/// `j = 1, 2` are `Z` and `CZ`; `j = 3` is the seven-T `CCZ`. For `j ≥ 4` an
/// AND ladder writes `q_0 ∧ … ∧ q_{j−2}` into the last of `j − 2` ancillas
/// (each AND is `H·CCZ·H`), applies `CZ` with `q_{j−1}`, then uncomputes every
/// AND by X measurement and a conditional `CZ`. T-count `7(j − 2)`.
pub fn decompose_mcz(j: usize) -> MczDecomposition {
    let (ancillas, steps) = match j {
        0 => (0, Vec::new()),
        1 => (0, vec![op(Gate::Z, &[0])]),
        2 => (0, vec![op(Gate::Cz, &[0, 1])]),
        3 => (0, ccz(0, 1, 2)),
        _ => {
            let anc = j - 2;
            let a = |i: usize| j + i;
            let mut steps = Vec::new();
            let controls = |i: usize| if i == 0 { [0, 1] } else { [a(i - 1), i + 1] };
            for i in 0..anc {
                let [c0, c1] = controls(i);
                steps.push(op(Gate::H, &[a(i)]));
                steps.extend(ccz(c0, c1, a(i)));
                steps.push(op(Gate::H, &[a(i)]));
            }
            steps.push(op(Gate::Cz, &[a(anc - 1), j - 1]));
            for i in (0..anc).rev() {
                steps.push(DecompStep::MeasureUncompute {
                    ancilla: a(i),
                    controls: controls(i),
                });
            }
            (anc, steps)
        }
    };
    MczDecomposition {
        targets: j,
        ancillas,
        steps,
    }
}
