use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signed Pauli operator `i^phase · X^x · Z^z`, with the X part acting first
/// from the left. Under this convention `Y = i·X·Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    x: Vec<bool>,
    z: Vec<bool>,
    /// Power of `i`, always in `0..4`.
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            x: vec![false; n],
            z: vec![false; n],
            phase: 0,
        }
    }

    pub fn from_bits(x: Vec<bool>, z: Vec<bool>, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::SizeMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        Ok(Self {
            x,
            z,
            phase: phase % 4,
        })
    }

    /// `X_s`: X on every listed qubit.
    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for &q in qubits {
            p.x[q] = true;
        }
        p
    }

    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for &q in qubits {
            p.z[q] = true;
        }
        p
    }

    /// Single-qubit `X`, `Y` or `Z` on `qubit`.
    pub fn single(n: usize, qubit: usize, which: char) -> Result<Self> {
        let mut p = Self::identity(n);
        match which {
            'X' => p.x[qubit] = true,
            'Z' => p.z[qubit] = true,
            'Y' => {
                p.x[qubit] = true;
                p.z[qubit] = true;
                p.phase = 1;
            }
            _ => return Err(Error::Parse(format!("unknown Pauli {which:?}"))),
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_complex(&self) -> Complex64 {
        Complex64::i().powu(self.phase as u32)
    }

    pub(crate) fn x_mut(&mut self) -> &mut [bool] {
        &mut self.x
    }

    pub(crate) fn z_mut(&mut self) -> &mut [bool] {
        &mut self.z
    }

    /// Multiplies the phase by `i^k`.
    pub fn mul_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) % 4;
    }

    /// Indices where the X part is set.
    pub fn x_support(&self) -> Vec<usize> {
        self.x
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    /// True when the operator is `±I` or `±iI`.
    pub fn is_identity_up_to_phase(&self) -> bool {
        !self.x.iter().chain(&self.z).any(|&b| b)
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.is_identity_up_to_phase()
    }

    /// Number of qubits with a non-identity factor.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .filter(|(a, b)| **a || **b)
            .count()
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::SizeMismatch {
                expected: self.num_qubits(),
                got: other.num_qubits(),
            });
        }
        // Z^b X^c = (-1)^{b·c} X^c Z^b.
        let swaps = self
            .z
            .iter()
            .zip(&other.x)
            .filter(|(b, c)| **b && **c)
            .count();
        Ok(PauliString {
            x: self.x.iter().zip(&other.x).map(|(a, c)| a ^ c).collect(),
            z: self.z.iter().zip(&other.z).map(|(b, d)| b ^ d).collect(),
            phase: ((self.phase as usize + other.phase as usize + 2 * swaps) % 4) as u8,
        })
    }

    /// `(i^p X^x Z^z)† = i^{-p} (-1)^{x·z} X^x Z^z`.
    pub fn adjoint(&self) -> PauliString {
        let overlap = self
            .x
            .iter()
            .zip(&self.z)
            .filter(|(a, b)| **a && **b)
            .count();
        PauliString {
            x: self.x.clone(),
            z: self.z.clone(),
            phase: ((4 - self.phase as usize + 2 * overlap) % 4) as u8,
        }
    }

    /// True when the two operators commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let count = (0..self.num_qubits())
            .filter(|&i| (self.x[i] && other.z[i]) ^ (self.z[i] && other.x[i]))
            .count();
        count % 2 == 0
    }

    /// Parses the text form produced by `Display`: `phase;xbits;zbits`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.trim().split(';');
        let (Some(ph), Some(xs), Some(zs), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse(format!("expected phase;x;z, got {text:?}")));
        };
        let phase = match ph {
            "+" => 0,
            "+i" => 1,
            "-" => 2,
            "-i" => 3,
            _ => return Err(Error::Parse(format!("bad Pauli phase {ph:?}"))),
        };
        let bits = |s: &str| {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Parse(format!("bad bit {c:?} in {text:?}"))),
                })
                .collect::<Result<Vec<bool>>>()
        };
        Self::from_bits(bits(xs)?, bits(zs)?, phase)
            .map_err(|_| Error::Parse(format!("x and z lengths differ in {text:?}")))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ph = ["+", "+i", "-", "-i"][self.phase as usize];
        let bits = |v: &[bool]| {
            v.iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>()
        };
        write!(f, "{ph};{};{}", bits(&self.x), bits(&self.z))
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    /// Panics on a width mismatch; use [`PauliString::multiply`] to get an error.
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs).expect("Pauli widths differ")
    }
}
