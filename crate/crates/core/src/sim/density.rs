use nalgebra::DMatrix;
use num_complex::Complex64;

use super::Qubit;
use crate::error::{Error, Result};

/// Largest density matrix accepted, in qubits.
pub const MAX_DENSITY_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense mixed state. Qubit `live[0]` is the most significant index bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
    live: Vec<Qubit>,
}

fn default_labels(n: usize) -> Vec<Qubit> {
    (0..n as u32).map(Qubit).collect()
}

fn check_width(n: usize) -> Result<()> {
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::TooLarge {
            what: "density matrix",
            got: n,
            max: MAX_DENSITY_QUBITS,
        });
    }
    Ok(())
}

impl DensityMatrix {
    /// Wraps a matrix after checking unit trace and Hermiticity within 1e-10.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_power_of_two() || matrix.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be square with power-of-two side, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_width(n)?;
        let dm = Self {
            matrix,
            live: default_labels(n),
        };
        dm.check_invariants()?;
        Ok(dm)
    }

    /// `|ψ⟩⟨ψ|` for normalized-or-not amplitudes.
    pub fn from_pure(amps: &[Complex64]) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        Self::from_pure_partial(amps, n, default_labels(n))
    }

    /// Reduced state of the leading `keep` qubits of a pure state.
    pub(crate) fn from_pure_partial(
        amps: &[Complex64],
        keep: usize,
        labels: Vec<Qubit>,
    ) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(
                "amplitude count is not a power of two".into(),
            ));
        }
        check_width(keep)?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let total = amps.len().trailing_zeros() as usize;
        let rest = 1usize << (total - keep);
        let dim = 1usize << keep;
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            (0..rest)
                .map(|e| amps[i * rest + e] * amps[j * rest + e].conj())
                .sum::<Complex64>()
                / norm2
        });
        Ok(Self {
            matrix,
            live: labels,
        })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_width(n)?;
        let dim = 1usize << n;
        let matrix =
            DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        Ok(Self {
            matrix,
            live: default_labels(n),
        })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn live_qubits(&self) -> &[Qubit] {
        &self.live
    }

    pub fn num_qubits(&self) -> usize {
        self.live.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Checks trace one and Hermiticity within 1e-10, and in debug builds a
    /// spectrum bounded below by -1e-9.
    pub fn check_invariants(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("trace {tr} differs from 1")));
        }
        let dev = (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if dev > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "not Hermitian, deviation {dev:e}"
            )));
        }
        if cfg!(debug_assertions) {
            let min = self.min_eigenvalue();
            if min < -1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `self ⊗ other`; the right factor's labels continue after the left's.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        check_width(self.num_qubits() + other.num_qubits())?;
        let offset = self.live.iter().map(|q| q.0 + 1).max().unwrap_or(0);
        let mut live = self.live.clone();
        live.extend(other.live.iter().map(|q| Qubit(q.0 + offset)));
        Ok(Self {
            matrix: self.matrix.kronecker(&other.matrix),
            live,
        })
    }

    fn position(&self, q: Qubit) -> Result<usize> {
        self.live
            .iter()
            .position(|&l| l == q)
            .ok_or(Error::DeadQubit(q))
    }

    fn shift(&self, q: Qubit) -> Result<usize> {
        Ok(self.num_qubits() - 1 - self.position(q)?)
    }

    /// `ρ ↦ U ρ U†`.
    pub fn conjugate(&self, unitary: &DMatrix<Complex64>) -> Result<DensityMatrix> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::SizeMismatch {
                expected: self.dim(),
                got: unitary.nrows(),
            });
        }
        Ok(Self {
            matrix: unitary * &self.matrix * unitary.adjoint(),
            live: self.live.clone(),
        })
    }

    /// Conjugation by `exp(-i·angle·SWAP) = cos(angle)·I - i·sin(angle)·SWAP`,
    /// where SWAP exchanges `reg_a[i]` with `reg_b[i]` for every `i`.
    pub fn partial_swap(
        &self,
        reg_a: &[Qubit],
        reg_b: &[Qubit],
        angle: f64,
    ) -> Result<DensityMatrix> {
        if reg_a.len() != reg_b.len() {
            return Err(Error::SizeMismatch {
                expected: reg_a.len(),
                got: reg_b.len(),
            });
        }
        let mut seen = Vec::with_capacity(2 * reg_a.len());
        for &q in reg_a.iter().chain(reg_b) {
            if seen.contains(&q) {
                return Err(Error::DuplicateTarget(q));
            }
            seen.push(q);
        }
        let pairs = reg_a
            .iter()
            .zip(reg_b)
            .map(|(&a, &b)| Ok((self.shift(a)?, self.shift(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let dim = self.dim();
        let perm: Vec<usize> = (0..dim)
            .map(|i| {
                pairs.iter().fold(i, |acc, &(sa, sb)| {
                    let ba = (i >> sa) & 1;
                    let bb = (i >> sb) & 1;
                    (acc & !(1 << sa) & !(1 << sb)) | (bb << sa) | (ba << sb)
                })
            })
            .collect();
        let (s, c) = angle.sin_cos();
        let rho = &self.matrix;
        let ics = Complex64::new(0.0, c * s);
        // U ρ U† = c²ρ + s²PρP + i·c·s·(ρP - Pρ), with (PρP)ij = ρ[πi][πj].
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            rho[(i, j)] * (c * c)
                + rho[(perm[i], perm[j])] * (s * s)
                + ics * (rho[(i, perm[j])] - rho[(perm[i], j)])
        });
        Ok(Self {
            matrix,
            live: self.live.clone(),
        })
    }

    /// Traces out `discard`, keeping the remaining qubits in their order.
    pub fn partial_trace(&self, discard: &[Qubit]) -> Result<DensityMatrix> {
        for (i, &q) in discard.iter().enumerate() {
            self.position(q)?;
            if discard[..i].contains(&q) {
                return Err(Error::DuplicateTarget(q));
            }
        }
        let keep: Vec<Qubit> = self
            .live
            .iter()
            .copied()
            .filter(|q| !discard.contains(q))
            .collect();
        let keep_shifts = keep
            .iter()
            .map(|&q| self.shift(q))
            .collect::<Result<Vec<_>>>()?;
        let disc_shifts = discard
            .iter()
            .map(|&q| self.shift(q))
            .collect::<Result<Vec<_>>>()?;
        let gather = |idx: usize, shifts: &[usize]| {
            shifts
                .iter()
                .fold(0usize, |acc, &s| (acc << 1) | ((idx >> s) & 1))
        };
        let dim = self.dim();
        let kidx: Vec<usize> = (0..dim).map(|i| gather(i, &keep_shifts)).collect();
        let didx: Vec<usize> = (0..dim).map(|i| gather(i, &disc_shifts)).collect();
        let kdim = 1usize << keep.len();
        let mut out = DMatrix::from_element(kdim, kdim, ZERO);
        for i in 0..dim {
            for j in 0..dim {
                if didx[i] == didx[j] {
                    out[(kidx[i], kidx[j])] += self.matrix[(i, j)];
                }
            }
        }
        Ok(Self {
            matrix: out,
            live: keep,
        })
    }

    /// `(1/2)·Σ|λ|` over the eigenvalues of the Hermitian difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::SizeMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mut diff = &self.matrix - &other.matrix;
        // Symmetrize so the Hermitian solver sees an exactly Hermitian input.
        diff = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        let sum: f64 = diff.symmetric_eigenvalues().iter().map(|l| l.abs()).sum();
        Ok((0.5 * sum).clamp(0.0, 1.0))
    }

    /// Renames the qubits; the tensor order is unchanged.
    pub fn with_labels(mut self, labels: Vec<Qubit>) -> Result<Self> {
        if labels.len() != self.num_qubits() {
            return Err(Error::SizeMismatch {
                expected: self.num_qubits(),
                got: labels.len(),
            });
        }
        self.live = labels;
        Ok(self)
    }
}
