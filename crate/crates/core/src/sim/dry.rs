use num_complex::Complex64;

use super::{check_init, check_targets, Backend, Basis, EventLog, Gate, MeasurementOutcome, Qubit};
use crate::error::{Error, Result};
use crate::rng::Sampler;

/// Backend that keeps no amplitudes.
///
/// It validates liveness and arity exactly like [`super::Statevector`] and
/// produces the same event log, but every measurement reads a uniformly random
/// bit. Protocol byproducts are uniform, so ledgers from a dry run have the
/// same distribution as those from an exact run. Used for sizes the exact
/// simulator cannot hold.
#[derive(Debug, Clone)]
pub struct DryRun {
    live: Vec<Qubit>,
    next_label: u32,
    global_phase: Complex64,
    log: EventLog,
}

impl Default for DryRun {
    fn default() -> Self {
        Self::new()
    }
}

impl DryRun {
    pub fn new() -> Self {
        Self {
            live: Vec::new(),
            next_label: 0,
            global_phase: Complex64::new(1.0, 0.0),
            log: EventLog::new(),
        }
    }

    /// A register of `n` qubits with unspecified contents.
    pub fn with_qubits(n: usize) -> Self {
        let mut dry = Self::new();
        let labels: Vec<Qubit> = (0..n as u32).map(Qubit).collect();
        dry.next_label = n as u32;
        dry.live = labels.clone();
        dry.log.alloc(labels);
        dry
    }

    pub fn global_phase(&self) -> Complex64 {
        self.global_phase
    }

    fn fresh_labels(&mut self, count: usize) -> Vec<Qubit> {
        let start = self.next_label;
        self.next_label += count as u32;
        (start..self.next_label).map(Qubit).collect()
    }
}

impl Backend for DryRun {
    fn allocate(&mut self, init: &str) -> Result<Vec<Qubit>> {
        check_init(init)?;
        let labels = self.fresh_labels(init.len());
        self.live.extend(labels.iter().copied());
        self.log.alloc(labels.clone());
        Ok(labels)
    }

    fn apply(&mut self, gate: Gate, targets: &[Qubit]) -> Result<()> {
        check_targets(gate, targets, &self.live)?;
        self.log.gate(gate, targets);
        Ok(())
    }

    fn measure<S: Sampler + ?Sized>(
        &mut self,
        qubit: Qubit,
        basis: Basis,
        sampler: &mut S,
    ) -> Result<MeasurementOutcome> {
        if !self.live.contains(&qubit) {
            return Err(Error::DeadQubit(qubit));
        }
        let bit = sampler.sample_bit(qubit, 0.5)?;
        self.live.retain(|&q| q != qubit);
        let outcome = MeasurementOutcome { qubit, basis, bit };
        self.log.measure(outcome);
        Ok(outcome)
    }

    fn release(&mut self, qubit: Qubit) -> Result<()> {
        if !self.live.contains(&qubit) {
            return Err(Error::DeadQubit(qubit));
        }
        self.live.retain(|&q| q != qubit);
        self.log.release(qubit);
        Ok(())
    }

    fn absorb(&mut self, other: Self) -> Result<Vec<Qubit>> {
        let labels = self.fresh_labels(other.live.len());
        self.live.extend(labels.iter().copied());
        self.global_phase *= other.global_phase;
        self.log.alloc(labels.clone());
        Ok(labels)
    }

    fn live_qubits(&self) -> &[Qubit] {
        &self.live
    }

    fn mul_global_phase(&mut self, phase: Complex64) {
        self.global_phase *= phase;
    }

    fn log(&self) -> &EventLog {
        &self.log
    }

    fn log_mut(&mut self) -> &mut EventLog {
        &mut self.log
    }
}
