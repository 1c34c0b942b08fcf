//! Quantum computation with precomputed resource states.
//!
//! Exact statevector and density-matrix simulation, gate teleportation with
//! byproduct tracking, selective teleportation gadgets, the `Z^(k)` cascade
//! protocol, density matrix exponentiation and gate-count ledgers.

pub mod algebra;
pub mod cost;
pub mod dme;
pub mod error;
pub mod protocol;
pub mod rng;
pub mod selftest;
pub mod sim;
pub mod teleport;

pub use error::{Error, Result};
