//! Dense matrix oracles.
//!
//! Everything here is built from explicit Kronecker products so that tests can
//! check the simulator and the symbolic algebra against an independent model.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PauliString;
use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate};

pub type CMatrix = DMatrix<Complex64>;

/// Widest register the dense helpers will expand.
pub const MAX_DENSE_QUBITS: usize = 10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge {
            what: "dense matrix",
            got: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// Matrix of a gate on its own targets, first target most significant.
pub fn gate_matrix(gate: Gate, arity: usize) -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let m2 = |a: [Complex64; 4]| CMatrix::from_row_slice(2, 2, &a);
    match gate {
        Gate::X => m2([zero, one, one, zero]),
        Gate::Y => m2([zero, c(0.0, -1.0), c(0.0, 1.0), zero]),
        Gate::Z => m2([one, zero, zero, -one]),
        Gate::H => m2([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        Gate::S => m2([one, zero, zero, c(0.0, 1.0)]),
        Gate::Sdg => m2([one, zero, zero, c(0.0, -1.0)]),
        Gate::T => m2([one, zero, zero, t]),
        Gate::Tdg => m2([one, zero, zero, t.conj()]),
        Gate::Cnot => {
            let mut m = CMatrix::identity(4, 4);
            m[(2, 2)] = zero;
            m[(3, 3)] = zero;
            m[(2, 3)] = one;
            m[(3, 2)] = one;
            m
        }
        Gate::Cz | Gate::Mcz => {
            let dim = 1usize << arity;
            let mut m = CMatrix::identity(dim, dim);
            m[(dim - 1, dim - 1)] = -one;
            m
        }
    }
}

/// Lifts a matrix acting on `targets` (first target most significant) to `n`
/// qubits, with qubit 0 most significant.
pub fn embed(n: usize, targets: &[usize], small: &CMatrix) -> Result<CMatrix> {
    check(n)?;
    let k = targets.len();
    if small.nrows() != 1 << k {
        return Err(Error::SizeMismatch {
            expected: 1 << k,
            got: small.nrows(),
        });
    }
    let dim = 1usize << n;
    let local = |idx: usize| {
        targets
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | ((idx >> (n - 1 - t)) & 1))
    };
    let rest_mask = targets
        .iter()
        .fold(dim - 1, |m, &t| m & !(1 << (n - 1 - t)));
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        if i & rest_mask == j & rest_mask {
            small[(local(i), local(j))]
        } else {
            c(0.0, 0.0)
        }
    }))
}

pub fn circuit_unitary(circuit: &Circuit) -> Result<CMatrix> {
    circuit.validate()?;
    let dim = 1usize << circuit.width;
    check(circuit.width)?;
    let mut u = CMatrix::identity(dim, dim);
    for op in &circuit.ops {
        let g = embed(
            circuit.width,
            &op.targets,
            &gate_matrix(op.gate, op.targets.len()),
        )?;
        u = g * u;
    }
    Ok(u)
}

/// `i^phase · X^x · Z^z` as a dense matrix.
pub fn pauli_matrix(p: &PauliString) -> Result<CMatrix> {
    let n = p.num_qubits();
    check(n)?;
    let mut m = CMatrix::identity(1, 1);
    for q in 0..n {
        let mut f = CMatrix::identity(2, 2);
        if p.x_bits()[q] {
            f = gate_matrix(Gate::X, 1) * f;
        }
        if p.z_bits()[q] {
            f *= gate_matrix(Gate::Z, 1);
        }
        m = m.kronecker(&f);
    }
    Ok(m * p.phase_complex())
}

pub fn diagonal(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        entries.len(),
        entries.iter().map(|&e| c(e, 0.0)),
    ))
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Entrywise distance after aligning the global phase of `b` to `a`.
pub fn max_abs_diff_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let inner: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if inner.norm() > 1e-300 {
        inner / inner.norm()
    } else {
        c(1.0, 0.0)
    };
    max_abs_diff(a, &(b * phase))
}

/// Applies a dense matrix to a state vector.
pub fn apply_to(m: &CMatrix, amps: &[Complex64]) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(amps);
    (m * v).iter().copied().collect()
}
