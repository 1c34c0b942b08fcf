use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::mcz::{decompose_mcz, DecompStep};
use crate::sim::{Circuit, Event, EventLog, Gate, Stage};

/// Gate complexity of one run, with idle storage counted as identity gates.
///
/// `merge` models sequential composition: counts and depth add, peak width
/// takes the maximum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateCountLedger {
    pub clifford_1q: u64,
    pub clifford_2q: u64,
    pub t_count: u64,
    pub measurements: u64,
    pub identity_ticks: u64,
    pub depth: u64,
    pub peak_width: u64,
}

impl GateCountLedger {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn merge(&self, other: &Self) -> Self {
        Self {
            clifford_1q: self.clifford_1q + other.clifford_1q,
            clifford_2q: self.clifford_2q + other.clifford_2q,
            t_count: self.t_count + other.t_count,
            measurements: self.measurements + other.measurements,
            identity_ticks: self.identity_ticks + other.identity_ticks,
            depth: self.depth + other.depth,
            peak_width: self.peak_width.max(other.peak_width),
        }
    }

    /// Non-identity gates and measurements.
    pub fn active_ops(&self) -> u64 {
        self.clifford_1q + self.clifford_2q + self.t_count + self.measurements
    }

    /// Gate complexity: active operations plus identity ticks.
    pub fn gate_complexity(&self) -> u64 {
        self.active_ops() + self.identity_ticks
    }

    /// Ledger of the events in `log` tagged with `stage`.
    ///
    /// Depth is the ASAP layering of that stage's operations alone. A qubit
    /// starts accruing identity ticks at the stage clock when it is allocated
    /// (or at zero if it predates the first event) and stops when measured or
    /// released, whichever stage does it. Multi-controlled Z gates are counted
    /// through [`decompose_mcz`].
    pub fn from_log(log: &EventLog, stage: Stage) -> Self {
        let mut sched = Scheduler::default();
        for (event, &live) in log.events().iter().zip(log.live_after()) {
            let mine = event.stage() == stage;
            sched.live_now = live as u64;
            match event {
                Event::Alloc { qubits, .. } => {
                    for q in qubits {
                        sched.enter(q.0 as u64);
                    }
                }
                Event::Gate { gate, qubits, .. } if mine => {
                    let keys: Vec<u64> = qubits.iter().map(|q| q.0 as u64).collect();
                    sched.gate(*gate, &keys);
                }
                Event::Measure { outcome, .. } if mine => {
                    sched.measure(outcome.qubit.0 as u64);
                }
                Event::Release { qubit, .. } if mine => sched.leave(qubit.0 as u64, false),
                // Retired by the other stage: idle here until this stage's clock.
                Event::Measure { outcome, .. } => sched.leave(outcome.qubit.0 as u64, true),
                Event::Release { qubit, .. } => sched.leave(qubit.0 as u64, true),
                Event::Gate { .. } => {}
            }
            if mine {
                sched.observe_width();
            }
        }
        sched.finish()
    }

    /// `(consume, prep)` ledgers of a run.
    pub fn split(log: &EventLog) -> (Self, Self) {
        (
            Self::from_log(log, Stage::Consume),
            Self::from_log(log, Stage::Prep),
        )
    }
}

/// Ledger of a circuit run on `width` qubits that are all live from the start.
///
/// An empty circuit executes nothing and costs nothing, including width.
pub fn count_circuit(circuit: &Circuit) -> GateCountLedger {
    if circuit.is_empty() {
        return GateCountLedger::zero();
    }
    let mut sched = Scheduler::default();
    for q in 0..circuit.width as u64 {
        sched.enter(q);
    }
    sched.live_now = circuit.width as u64;
    sched.observe_width();
    for op in &circuit.ops {
        let keys: Vec<u64> = op.targets.iter().map(|&t| t as u64).collect();
        sched.gate(op.gate, &keys);
    }
    sched.finish()
}

/// Element-wise mean of several ledgers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanLedger {
    pub clifford_1q: f64,
    pub clifford_2q: f64,
    pub t_count: f64,
    pub measurements: f64,
    pub identity_ticks: f64,
    pub depth: f64,
    pub peak_width: f64,
}

impl MeanLedger {
    pub fn of(ledgers: &[GateCountLedger]) -> Self {
        if ledgers.is_empty() {
            return Self::default();
        }
        let n = ledgers.len() as f64;
        let mean =
            |f: fn(&GateCountLedger) -> u64| ledgers.iter().map(|l| f(l) as f64).sum::<f64>() / n;
        Self {
            clifford_1q: mean(|l| l.clifford_1q),
            clifford_2q: mean(|l| l.clifford_2q),
            t_count: mean(|l| l.t_count),
            measurements: mean(|l| l.measurements),
            identity_ticks: mean(|l| l.identity_ticks),
            depth: mean(|l| l.depth),
            peak_width: mean(|l| l.peak_width),
        }
    }

    pub fn active_ops(&self) -> f64 {
        self.clifford_1q + self.clifford_2q + self.t_count + self.measurements
    }
}

impl From<GateCountLedger> for MeanLedger {
    fn from(l: GateCountLedger) -> Self {
        Self::of(&[l])
    }
}

#[derive(Debug, Clone, Copy)]
struct Track {
    born: u64,
    ready: u64,
    active: u64,
}

/// ASAP layering with per-qubit lifetimes.
///
/// Keys below 2^32 are backend labels; ancillas of expanded gates use keys
/// above that range.
#[derive(Debug, Default)]
struct Scheduler {
    tracks: HashMap<u64, Track>,
    depth: u64,
    ledger: GateCountLedger,
    live_now: u64,
    extra_live: u64,
    next_virtual: u64,
}

impl Scheduler {
    fn enter(&mut self, key: u64) {
        let clock = self.depth;
        self.tracks.insert(
            key,
            Track {
                born: clock,
                ready: clock,
                active: 0,
            },
        );
    }

    fn track(&mut self, key: u64) -> &mut Track {
        self.tracks.entry(key).or_insert(Track {
            born: 0,
            ready: 0,
            active: 0,
        })
    }

    fn leave(&mut self, key: u64, at_clock: bool) {
        if let Some(t) = self.tracks.remove(&key) {
            let end = if at_clock { self.depth } else { t.ready };
            self.ledger.identity_ticks += (end - t.born).saturating_sub(t.active);
        }
    }

    fn occupy(&mut self, keys: &[u64]) {
        let layer = keys.iter().map(|&k| self.track(k).ready).max().unwrap_or(0) + 1;
        for &k in keys {
            let t = self.track(k);
            t.ready = layer;
            t.active += 1;
        }
        self.depth = self.depth.max(layer);
    }

    fn observe_width(&mut self) {
        self.ledger.peak_width = self.ledger.peak_width.max(self.live_now + self.extra_live);
    }

    fn measure(&mut self, key: u64) {
        self.ledger.measurements += 1;
        self.occupy(&[key]);
        self.leave(key, false);
    }

    fn gate(&mut self, gate: Gate, keys: &[u64]) {
        match gate {
            Gate::T | Gate::Tdg => {
                self.ledger.t_count += 1;
                self.occupy(keys);
            }
            Gate::Cnot | Gate::Cz => {
                self.ledger.clifford_2q += 1;
                self.occupy(keys);
            }
            Gate::Mcz => self.mcz(keys),
            _ => {
                self.ledger.clifford_1q += 1;
                self.occupy(keys);
            }
        }
    }

    /// Expands a multi-controlled Z, counting uncompute fix-ups worst case.
    fn mcz(&mut self, keys: &[u64]) {
        match keys.len() {
            0 => {}
            1 => self.gate(Gate::Z, keys),
            2 => self.gate(Gate::Cz, keys),
            j => {
                let dec = decompose_mcz(j);
                let mut wires = keys.to_vec();
                for _ in 0..dec.ancillas {
                    let key = (1u64 << 32) + self.next_virtual;
                    self.next_virtual += 1;
                    self.enter(key);
                    wires.push(key);
                }
                self.extra_live += dec.ancillas as u64;
                self.observe_width();
                for step in &dec.steps {
                    match step {
                        DecompStep::Gate(op) => {
                            let ks: Vec<u64> = op.targets.iter().map(|&t| wires[t]).collect();
                            self.gate(op.gate, &ks);
                        }
                        DecompStep::MeasureUncompute { ancilla, controls } => {
                            self.measure(wires[*ancilla]);
                            self.gate(Gate::Cz, &[wires[controls[0]], wires[controls[1]]]);
                        }
                    }
                }
                self.extra_live -= dec.ancillas as u64;
            }
        }
    }

    fn finish(mut self) -> GateCountLedger {
        let depth = self.depth;
        for (_, t) in self.tracks.drain() {
            self.ledger.identity_ticks += (depth - t.born).saturating_sub(t.active);
        }
        self.ledger.depth = depth;
        self.ledger
    }
}
