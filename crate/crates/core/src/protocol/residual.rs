use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, ZkElement};
use crate::error::{Error, Result};
use crate::sim::{Backend, Gate, Qubit};

/// Copies of a register produced by [`fanout`], with the CNOT tree that made them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fanout {
    /// `copies[0]` is the original register.
    pub copies: Vec<Vec<Qubit>>,
    cnots: Vec<(Qubit, Qubit)>,
    /// Rounds of the doubling tree, `⌈log₂ m⌉`.
    pub tree_depth: usize,
}

/// Layers charged to one fanout or unfanout by the constant-depth construction
/// with classical feedback. Only used for the analytic depth column.
pub const ANALYTIC_FANOUT_DEPTH: usize = 1;

/// `Σ c_i |i⟩ ↦ Σ c_i |i⟩^{⊗m}` by a per-qubit CNOT doubling tree onto fresh
/// `|0⟩` ancillas.
pub fn fanout<B: Backend + ?Sized>(
    backend: &mut B,
    register: &[Qubit],
    m: usize,
) -> Result<Fanout> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "fanout needs m ≥ 2, got {m}"
        )));
    }
    let fresh = backend.allocate(&"0".repeat(register.len() * (m - 1)))?;
    let mut copies = vec![register.to_vec()];
    copies.extend(fresh.chunks(register.len()).map(<[Qubit]>::to_vec));
    let mut cnots = Vec::new();
    let mut filled = 1;
    let mut tree_depth = 0;
    while filled < m {
        let round = filled.min(m - filled);
        for src in 0..round {
            for (i, &q) in copies[src].iter().enumerate() {
                let pair = (q, copies[filled + src][i]);
                backend.apply(Gate::Cnot, &[pair.0, pair.1])?;
                cnots.push(pair);
            }
        }
        filled += round;
        tree_depth += 1;
    }
    Ok(Fanout {
        copies,
        cnots,
        tree_depth,
    })
}

/// Inverse of [`fanout`]; the ancilla copies return to `|0⟩` and are released.
pub fn unfanout<B: Backend + ?Sized>(backend: &mut B, fan: Fanout) -> Result<()> {
    for &(c, t) in fan.cnots.iter().rev() {
        backend.apply(Gate::Cnot, &[c, t])?;
    }
    for copy in &fan.copies[1..] {
        for &q in copy {
            backend.release(q)?;
        }
    }
    Ok(())
}

/// Greedy largest-first partition of monomials into groups of pairwise
/// disjoint supports.
pub fn color_monomials(monomials: impl IntoIterator<Item = Monomial>) -> Vec<Vec<Monomial>> {
    let mut sorted: Vec<Monomial> = monomials.into_iter().collect();
    sorted.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut groups: Vec<(u64, Vec<Monomial>)> = Vec::new();
    for m in sorted {
        match groups.iter_mut().find(|(used, _)| used & m.mask() == 0) {
            Some((used, members)) => {
                *used |= m.mask();
                members.push(m);
            }
            None => groups.push((m.mask(), vec![m])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// How a residual was applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub monomials: usize,
    /// Disjoint-support groups; zero on the serial path.
    pub groups: usize,
    /// Register copies used by the parallel path, including the original.
    pub copies: usize,
    /// Depth of the simulated CNOT trees plus one transversal layer.
    pub simulated_depth: usize,
    /// Same, with each fanout and unfanout charged [`ANALYTIC_FANOUT_DEPTH`].
    pub analytic_depth: usize,
}

/// Applies a diagonal residual to `qubits`.
///
/// Serially this is the element's multi-controlled Z circuit. In parallel the
/// monomials are colored into disjoint groups, the register is fanned out to
/// one copy per group (at least two), each group acts transversally on its own
/// copy, and the copies are folded back. Diagonal gates act identically on
/// every computational-basis copy, so both paths give the same state.
pub fn apply_residual_direct<B: Backend + ?Sized>(
    backend: &mut B,
    qubits: &[Qubit],
    residual: &ZkElement,
    parallel: bool,
) -> Result<ResidualReport> {
    if residual.num_qubits() != qubits.len() {
        return Err(Error::SizeMismatch {
            expected: qubits.len(),
            got: residual.num_qubits(),
        });
    }
    let apply_group = |backend: &mut B, register: &[Qubit], group: &[Monomial]| -> Result<()> {
        for m in group {
            let targets: Vec<Qubit> = m.indices().iter().map(|&i| register[i]).collect();
            backend.apply(Gate::Mcz, &targets)?;
        }
        Ok(())
    };
    let monomials: Vec<Monomial> = residual.monomials().collect();
    let mut report = ResidualReport {
        monomials: monomials.len(),
        ..ResidualReport::default()
    };
    if !parallel || monomials.is_empty() {
        apply_group(backend, qubits, &monomials)?;
        report.copies = 1;
        report.simulated_depth = monomials.len();
        report.analytic_depth = monomials.len();
    } else {
        let groups = color_monomials(monomials);
        let fan = fanout(backend, qubits, groups.len().max(2))?;
        for (group, copy) in groups.iter().zip(&fan.copies) {
            apply_group(backend, copy, group)?;
        }
        report.groups = groups.len();
        report.copies = fan.copies.len();
        report.simulated_depth = 2 * fan.tree_depth + 1;
        report.analytic_depth = 2 * ANALYTIC_FANOUT_DEPTH + 1;
        unfanout(backend, fan)?;
    }
    if residual.is_negative() {
        backend.mul_global_phase(Complex64::new(-1.0, 0.0));
    }
    Ok(report)
}
