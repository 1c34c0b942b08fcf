//! Precomputed application of `U ∈ Z^(k)`.
//!
//! The resource is a gate-teleportation state for `U` plus selective gadgets
//! for the derivative corrections of the first `a − 1` levels. Consuming it
//! teleports the input through `U`, runs the gadgets chosen by the cascade,
//! and applies what is left (a level `k − a` element and a Pauli) directly.

mod cascade;
mod residual;

use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, PauliString, ZkElement};
use crate::cost::GateCountLedger;
use crate::error::{Error, Result};
use crate::rng::Sampler;
use crate::sim::{Backend, Circuit, DryRun, Qubit, Stage};
use crate::teleport::{
    apply_pauli, gate_teleport, prepare_gate_resource, staged, ResourceState, SelectiveGateGadget,
    Transcript,
};

pub use cascade::{
    classical_outcome_processing, layer_schedule, validate_stop_level, Cascade, CascadeOutcome,
    CascadeStep,
};
pub use residual::{
    apply_residual_direct, color_monomials, fanout, unfanout, Fanout, ResidualReport,
    ANALYTIC_FANOUT_DEPTH,
};

/// `⌊k/2⌋`, raised to 1 so that `k = 1` runs as plain teleportation.
pub fn default_stop_level(k: usize) -> usize {
    (k / 2).max(1)
}

/// A selective gadget of the layered resource: `U_A = D_T`, `U_B = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGadget {
    pub subset: Monomial,
    pub correction: ZkElement,
    pub circuit: Circuit,
}

/// Single-use resource for one application of `u`.
///
/// Layer gadgets are described here and materialized into the backend only
/// when the cascade reaches them; `prep_ledger` still charges all of them.
#[derive(Debug)]
pub struct LayeredResource<B> {
    base: Option<ResourceState<B>>,
    u: ZkElement,
    layers: Vec<Vec<LayerGadget>>,
    stop_level: usize,
    prep_ledger: GateCountLedger,
    parallel_residual: bool,
}

impl<B> LayeredResource<B> {
    pub fn u(&self) -> &ZkElement {
        &self.u
    }

    pub fn stop_level(&self) -> usize {
        self.stop_level
    }

    /// Gadgets of layer `ℓ` at index `ℓ − 1`.
    pub fn layers(&self) -> &[Vec<LayerGadget>] {
        &self.layers
    }

    pub fn prep_ledger(&self) -> &GateCountLedger {
        &self.prep_ledger
    }

    /// Qubits of the base teleportation resource.
    pub fn base_width(&self) -> usize {
        2 * self.u.num_qubits()
    }

    /// Qubits of the whole abstract resource, every gadget included.
    pub fn total_width(&self) -> usize {
        let gadgets: usize = self.layers.iter().map(Vec::len).sum();
        self.base_width() + gadgets * 4 * self.u.num_qubits()
    }

    pub fn is_consumed(&self) -> bool {
        self.base.is_none()
    }

    pub fn with_parallel_residual(mut self, parallel: bool) -> Self {
        self.parallel_residual = parallel;
        self
    }
}

/// Builds the resource for `u` stopping at level `a` on `backend`.
pub fn precompute_resource<B: Backend>(
    backend: B,
    u: &ZkElement,
    a: usize,
) -> Result<LayeredResource<B>> {
    validate_stop_level(u.k(), a)?;
    let n = u.num_qubits();
    let (circuit, _) = u.to_circuit();
    let base = prepare_gate_resource(backend, &circuit, n, "U")?;
    let mut prep_ledger = GateCountLedger::from_log(base.state.log(), Stage::Prep);
    let identity = Circuit::new(n);
    let mut layers = Vec::with_capacity(a.saturating_sub(1));
    for size in 1..a {
        let mut layer = Vec::new();
        for subset in crate::algebra::subsets_of_size(n, size) {
            let correction = u.derivative(subset);
            let (circuit, _) = correction.to_circuit();
            let mut dry = DryRun::new();
            dry.set_stage(Stage::Prep);
            SelectiveGateGadget::prepare(&mut dry, &circuit, &identity)?;
            prep_ledger = prep_ledger.merge(&GateCountLedger::from_log(dry.log(), Stage::Prep));
            layer.push(LayerGadget {
                subset,
                correction,
                circuit,
            });
        }
        layers.push(layer);
    }
    Ok(LayeredResource {
        base: Some(base),
        u: u.clone(),
        layers,
        stop_level: a,
        prep_ledger,
        parallel_residual: false,
    })
}

/// A finished protocol run. `qubits` hold `U|ψ⟩` up to global phase.
#[derive(Debug)]
pub struct ProtocolResult<B> {
    pub state: B,
    pub qubits: Vec<Qubit>,
    pub transcript: Transcript,
    pub residual: ZkElement,
    pub final_pauli: PauliString,
    pub consume_ledger: GateCountLedger,
    pub prep_ledger: GateCountLedger,
    pub classical_op_count: u64,
    pub residual_report: ResidualReport,
}

impl<B: Backend> LayeredResource<B> {
    /// Applies `u` to `input`. The resource can be consumed once.
    pub fn consume<S: Sampler + ?Sized>(
        &mut self,
        input: B,
        sampler: &mut S,
    ) -> Result<ProtocolResult<B>> {
        let n = self.u.num_qubits();
        if input.num_live() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: input.num_live(),
            });
        }
        let base = self.base.take().ok_or(Error::AlreadyConsumed)?;
        let teleported = gate_teleport(input, base, None, sampler)?;
        let mut state = teleported.state;
        let mut qubits = teleported.qubits;
        let mut transcript = teleported.transcript;
        let gadgets: Vec<&LayerGadget> = self.layers.iter().flatten().collect();
        let identity = Circuit::new(n);

        let mut cascade = Cascade::new(&self.u, self.stop_level, teleported.byproduct)?;
        while let Some(step) = cascade.next_step() {
            let gadget = gadgets[step.index];
            debug_assert_eq!(gadget.subset, step.subset);
            let out = crate::teleport::selective_gate_teleport(
                &mut state,
                &qubits,
                &gadget.circuit,
                &identity,
                step.choice,
                sampler,
                &mut transcript,
            )?;
            cascade.absorb(&out.p2, &out.p1)?;
            qubits = out.qubits;
        }
        let outcome = cascade.finish()?;
        let residual_report = staged(&mut state, Stage::Consume, |b| {
            let report =
                apply_residual_direct(b, &qubits, &outcome.residual, self.parallel_residual)?;
            apply_pauli(b, &qubits, &outcome.final_pauli)?;
            Ok(report)
        })?;
        let consume_ledger = GateCountLedger::from_log(state.log(), Stage::Consume);
        Ok(ProtocolResult {
            state,
            qubits,
            transcript,
            residual: outcome.residual,
            final_pauli: outcome.final_pauli,
            consume_ledger,
            prep_ledger: self.prep_ledger,
            classical_op_count: outcome.op_count,
            residual_report,
        })
    }
}

/// JSON record of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub u: String,
    pub n: usize,
    pub k: usize,
    pub a: usize,
    pub seed: u64,
    pub outcomes: String,
    pub residual: String,
    pub residual_level: usize,
    pub final_pauli: String,
    pub consume_ledger: GateCountLedger,
    pub prep_ledger: GateCountLedger,
    pub classical_op_count: u64,
    pub trace_distance_to_direct: Option<f64>,
}

impl RunRecord {
    pub fn new<B>(
        u: &ZkElement,
        a: usize,
        seed: u64,
        result: &ProtocolResult<B>,
        distance: Option<f64>,
    ) -> Self {
        Self {
            u: u.to_string(),
            n: u.num_qubits(),
            k: u.k(),
            a,
            seed,
            outcomes: result.transcript.to_text(),
            residual: result.residual.to_string(),
            residual_level: result.residual.level(),
            final_pauli: result.final_pauli.to_string(),
            consume_ledger: result.consume_ledger,
            prep_ledger: result.prep_ledger,
            classical_op_count: result.classical_op_count,
            trace_distance_to_direct: distance,
        }
    }
}
