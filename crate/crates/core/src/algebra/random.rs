//! Seeded generators for test inputs.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::sim::{apply_circuit, Backend, Circuit, Gate, Statevector};

/// Default generator length for random Clifford circuits on `n` qubits.
pub fn default_clifford_length(n: usize) -> usize {
    5 * n * n
}

/// Gates drawn uniformly from `{H, S, CNOT, CZ}` on uniformly chosen distinct
/// targets. Two-qubit gates are skipped when `n = 1`. This is a test input
/// generator and is not uniform over the Clifford group.
pub fn random_clifford_circuit<R: Rng + ?Sized>(n: usize, length: usize, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(n);
    if n == 0 {
        return c;
    }
    let choices: &[Gate] = if n >= 2 {
        &[Gate::H, Gate::S, Gate::Cnot, Gate::Cz]
    } else {
        &[Gate::H, Gate::S]
    };
    for _ in 0..length {
        let gate = choices[rng.random_range(0..choices.len())];
        let a = rng.random_range(0..n);
        if gate.arity() == Some(2) {
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            c.push(gate, [a, b]);
        } else {
            c.push(gate, [a]);
        }
    }
    c
}

/// Product state where each qubit gets a random `H`/`T` word of length 6.
pub fn random_product_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Statevector> {
    let mut state = Statevector::product(&"0".repeat(n))?;
    let qubits = state.live_qubits().to_vec();
    for &q in &qubits {
        for _ in 0..6 {
            let gate = if rng.random_bool(0.5) {
                Gate::H
            } else {
                Gate::T
            };
            state.apply(gate, &[q])?;
        }
    }
    state.log_mut().clear();
    Ok(state)
}

/// Stabilizer state from a random `{H, S, CNOT, CZ}` circuit on `|0…0⟩`.
pub fn random_stabilizer_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Statevector> {
    let mut state = Statevector::product(&"0".repeat(n))?;
    let circuit = random_clifford_circuit(n, default_clifford_length(n), rng);
    let qubits = state.live_qubits().to_vec();
    apply_circuit(&mut state, &circuit, &qubits)?;
    state.log_mut().clear();
    Ok(state)
}

/// Normalized complex Gaussian amplitudes (Haar-distributed pure state).
pub fn random_amplitudes<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    amps
}

pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Statevector> {
    Statevector::from_amplitudes(random_amplitudes(n, rng))
}
