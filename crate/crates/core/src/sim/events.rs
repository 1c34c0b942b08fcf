use serde::{Deserialize, Serialize};

use super::{Gate, MeasurementOutcome, Qubit};

/// Which side of the precomputation split an operation belongs to.
///
/// `Prep` work builds a resource state before the input exists; `Consume` work
/// happens after the input arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    Prep,
    Consume,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Event {
    Alloc {
        qubits: Vec<Qubit>,
        stage: Stage,
    },
    Gate {
        gate: Gate,
        qubits: Vec<Qubit>,
        stage: Stage,
    },
    Measure {
        outcome: MeasurementOutcome,
        stage: Stage,
    },
    Release {
        qubit: Qubit,
        stage: Stage,
    },
}

impl Event {
    pub fn stage(&self) -> Stage {
        match self {
            Event::Alloc { stage, .. }
            | Event::Gate { stage, .. }
            | Event::Measure { stage, .. }
            | Event::Release { stage, .. } => *stage,
        }
    }
}

/// Append-only record of everything a backend did.
///
/// `gate_events` is an independent counter bumped on every gate, used to check
/// that stage-split ledgers account for every gate exactly once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    events: Vec<Event>,
    live_after: Vec<usize>,
    stage: Stage,
    gate_events: u64,
    live: usize,
}

impl Default for EventLog {
    fn default() -> Self {
        Self {
            events: Vec::new(),
            live_after: Vec::new(),
            stage: Stage::Consume,
            gate_events: 0,
            live: 0,
        }
    }
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn set_stage(&mut self, stage: Stage) {
        self.stage = stage;
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Live qubit count right after each event.
    pub fn live_after(&self) -> &[usize] {
        &self.live_after
    }

    pub fn gate_events(&self) -> u64 {
        self.gate_events
    }

    pub fn peak_live(&self) -> usize {
        self.live_after.iter().copied().max().unwrap_or(0)
    }

    pub fn clear(&mut self) {
        self.events.clear();
        self.live_after.clear();
        self.gate_events = 0;
    }

    pub(crate) fn alloc(&mut self, qubits: Vec<Qubit>) {
        self.live += qubits.len();
        let stage = self.stage;
        self.push(Event::Alloc { qubits, stage });
    }

    pub(crate) fn gate(&mut self, gate: Gate, qubits: &[Qubit]) {
        self.gate_events += 1;
        let stage = self.stage;
        self.push(Event::Gate {
            gate,
            qubits: qubits.to_vec(),
            stage,
        });
    }

    pub(crate) fn measure(&mut self, outcome: MeasurementOutcome) {
        self.live -= 1;
        let stage = self.stage;
        self.push(Event::Measure { outcome, stage });
    }

    pub(crate) fn release(&mut self, qubit: Qubit) {
        self.live -= 1;
        let stage = self.stage;
        self.push(Event::Release { qubit, stage });
    }

    fn push(&mut self, event: Event) {
        self.events.push(event);
        self.live_after.push(self.live);
    }
}
