use serde::{Deserialize, Serialize};

use super::PauliString;
use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate};

/// Images `U X_i U†` and `U Z_i U†` of the Pauli generators under a Clifford `U`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordTableau {
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        Self {
            x_images: (0..n).map(|i| PauliString::x_on(n, &[i])).collect(),
            z_images: (0..n).map(|i| PauliString::z_on(n, &[i])).collect(),
        }
    }

    /// Tableau of the whole circuit; fails on any non-Clifford gate.
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        circuit.validate()?;
        let mut t = Self::identity(circuit.width);
        for op in &circuit.ops {
            for p in t.x_images.iter_mut().chain(t.z_images.iter_mut()) {
                conjugate_by_gate(p, op.gate, &op.targets)?;
            }
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.x_images.len()
    }

    pub fn x_image(&self, i: usize) -> &PauliString {
        &self.x_images[i]
    }

    pub fn z_image(&self, i: usize) -> &PauliString {
        &self.z_images[i]
    }

    /// `Π_i (U X_i U†)^{x_i} · Π_i (U Z_i U†)^{z_i}` from the stored images.
    pub fn factorize_correction(&self, x: &[bool], z: &[bool]) -> Result<PauliString> {
        let n = self.num_qubits();
        if x.len() != n || z.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: if x.len() != n { x.len() } else { z.len() },
            });
        }
        let mut acc = PauliString::identity(n);
        for (img, _) in self.x_images.iter().zip(x).filter(|(_, &b)| b) {
            acc = acc.multiply(img)?;
        }
        for (img, _) in self.z_images.iter().zip(z).filter(|(_, &b)| b) {
            acc = acc.multiply(img)?;
        }
        Ok(acc)
    }

    /// `U p U†`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != self.num_qubits() {
            return Err(Error::SizeMismatch {
                expected: self.num_qubits(),
                got: p.num_qubits(),
            });
        }
        let mut out = self.factorize_correction(p.x_bits(), p.z_bits())?;
        out.mul_phase(p.phase());
        Ok(out)
    }

    /// Checks that the images obey the commutation relations of `X_i`, `Z_j`:
    /// images of distinct generators commute, `X_i` and `Z_i` images anticommute.
    pub fn is_symplectic(&self) -> bool {
        let n = self.num_qubits();
        for i in 0..n {
            for j in 0..n {
                let xz = self.x_images[i].commutes_with(&self.z_images[j]);
                if xz == (i == j) {
                    return false;
                }
                if !self.x_images[i].commutes_with(&self.x_images[j])
                    || !self.z_images[i].commutes_with(&self.z_images[j])
                {
                    return false;
                }
            }
        }
        true
    }
}

/// Replaces `p` by `G p G†` for a Clifford gate `G` on `targets`.
pub fn conjugate_by_gate(p: &mut PauliString, gate: Gate, targets: &[usize]) -> Result<()> {
    gate.check_arity(targets.len())?;
    let gate = match (gate, targets.len()) {
        (Gate::Mcz, 1) => Gate::Z,
        (Gate::Mcz, 2) => Gate::Cz,
        (Gate::Mcz, _) | (Gate::T, _) | (Gate::Tdg, _) => {
            return Err(Error::NotClifford(gate.name()))
        }
        (g, _) => g,
    };
    let q = targets[0];
    let a = p.x_bits()[q];
    let b = p.z_bits()[q];
    match gate {
        Gate::H => {
            p.x_mut()[q] = b;
            p.z_mut()[q] = a;
            if a && b {
                p.mul_phase(2);
            }
        }
        Gate::S | Gate::Sdg => {
            if a {
                p.z_mut()[q] ^= true;
                p.mul_phase(if gate == Gate::S { 1 } else { 3 });
            }
        }
        Gate::X if b => p.mul_phase(2),
        Gate::Z if a => p.mul_phase(2),
        Gate::Y if a ^ b => p.mul_phase(2),
        Gate::X | Gate::Y | Gate::Z => {}
        Gate::Cnot => {
            let t = targets[1];
            let xc = p.x_bits()[q];
            let zt = p.z_bits()[t];
            p.x_mut()[t] ^= xc;
            p.z_mut()[q] ^= zt;
        }
        Gate::Cz => {
            let r = targets[1];
            let xa = p.x_bits()[q];
            let xb = p.x_bits()[r];
            p.z_mut()[q] ^= xb;
            p.z_mut()[r] ^= xa;
            if xa && xb {
                p.mul_phase(2);
            }
        }
        Gate::T | Gate::Tdg | Gate::Mcz => unreachable!("filtered above"),
    }
    Ok(())
}
