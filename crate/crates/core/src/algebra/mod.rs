//! Classical algebra: Pauli strings, Clifford tableaux and the diagonal
//! multi-controlled-Z group.

pub mod dense;
mod pauli;
pub mod random;
mod tableau;
mod zk;

pub use pauli::PauliString;
pub use tableau::{conjugate_by_gate, CliffordTableau};
pub use zk::{
    binomial, nonempty_subsets_up_to, subsets_of_size, Monomial, ZkElement, MAX_DENSE_ZK_QUBITS,
    MAX_ZK_QUBITS,
};
