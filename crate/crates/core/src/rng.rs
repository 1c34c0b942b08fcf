//! Seeded randomness.
//!
//! Every stochastic routine takes its randomness explicitly. The project-wide
//! generator is [`SimRng`] (ChaCha8). Independent trials derive their generator
//! from a master seed with [`trial_rng`]: the master seed keys the generator and
//! the trial index selects the ChaCha stream, so trial `i` is reproducible in
//! isolation and independent of how many other trials ran.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sim::Qubit;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn trial_rng(master_seed: u64, trial: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Source of measurement outcomes.
///
/// `p_one` is the Born probability of reading 1. Random generators sample it;
/// [`ForcedOutcomes`] replays a fixed branch, which is how tests enumerate
/// every measurement branch of a gadget.
pub trait Sampler {
    fn sample_bit(&mut self, qubit: Qubit, p_one: f64) -> Result<u8>;
}

impl<R: RngCore> Sampler for R {
    fn sample_bit(&mut self, _qubit: Qubit, p_one: f64) -> Result<u8> {
        Ok(u8::from(self.random::<f64>() < p_one))
    }
}

/// Replays a predetermined list of outcome bits.
#[derive(Debug, Clone)]
pub struct ForcedOutcomes {
    bits: Vec<u8>,
    cursor: usize,
}

impl ForcedOutcomes {
    pub fn new(bits: Vec<u8>) -> Self {
        Self { bits, cursor: 0 }
    }

    /// The `index`-th of `2^len` branches, most significant bit first.
    pub fn branch(index: u64, len: usize) -> Self {
        let bits = (0..len)
            .map(|i| ((index >> (len - 1 - i)) & 1) as u8)
            .collect();
        Self::new(bits)
    }

    pub fn consumed(&self) -> usize {
        self.cursor
    }
}

/// Outcomes with probability below this are treated as impossible branches.
const BRANCH_EPS: f64 = 1e-12;

impl Sampler for ForcedOutcomes {
    fn sample_bit(&mut self, qubit: Qubit, p_one: f64) -> Result<u8> {
        let bit = *self.bits.get(self.cursor).ok_or_else(|| {
            Error::InvalidArgument(format!("forced outcome list exhausted at {}", self.cursor))
        })?;
        self.cursor += 1;
        let p = if bit == 1 { p_one } else { 1.0 - p_one };
        if p < BRANCH_EPS {
            return Err(Error::ImpossibleBranch { qubit, bit });
        }
        Ok(bit)
    }
}
