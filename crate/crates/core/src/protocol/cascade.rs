use std::collections::BTreeSet;

use crate::algebra::{nonempty_subsets_up_to, subsets_of_size, Monomial, PauliString, ZkElement};
use crate::error::{Error, Result};
use crate::teleport::{Choice, Transcript};

/// One selective gadget the cascade wants executed next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CascadeStep {
    /// Position in the flattened layer order.
    pub index: usize,
    pub subset: Monomial,
    pub choice: Choice,
}

/// What remains once every layer has run.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOutcome {
    /// Diagonal correction to apply directly, level at most `k − a`.
    pub residual: ZkElement,
    /// Pauli applied last, after the residual.
    pub final_pauli: PauliString,
    /// Monomial and subset-set XOR operations performed.
    pub op_count: u64,
}

/// Classical side of the protocol.
///
/// Tracks the live state as `Q · W · U|ψ⟩` where `Q` is a Pauli and `W` is the
/// product of derivatives `D_T = ∂_T u` over the subsets in `active`. After
/// teleporting through `U` with byproduct `P = X^x Z^z`, `Q = P` and `active`
/// holds every nonempty `T ⊆ supp(x)` with `|T| ≤ k`, which is Newton's
/// expansion of `X^x U X^x U†`.
///
/// Layer `ℓ` visits every `|T| = ℓ` subset in monomial order and fires its
/// gadget (`U_A = D_T`) iff `T` is active. Commuting the gadget's inner
/// byproduct `P2` through a fired `D_T` toggles `T` and every `T ∪ T'` with
/// `∅ ≠ T' ⊆ s ∖ T`, `s` being the X-support of `P2·Q`. Toggles only reach
/// larger subsets, so after layer `ℓ` nothing of size `ℓ` stays active.
#[derive(Debug, Clone)]
pub struct Cascade<'u> {
    u: &'u ZkElement,
    k: usize,
    stop: usize,
    active: BTreeSet<Monomial>,
    q: PauliString,
    schedule: Vec<Monomial>,
    next: usize,
    pending: Option<CascadeStep>,
    op_count: u64,
}

/// Subsets visited by the layers of a run stopping at level `a`, in order.
pub fn layer_schedule(n: usize, a: usize) -> Vec<Monomial> {
    (1..a).flat_map(|size| subsets_of_size(n, size)).collect()
}

impl<'u> Cascade<'u> {
    pub fn new(u: &'u ZkElement, stop_level: usize, byproduct: PauliString) -> Result<Self> {
        let n = u.num_qubits();
        if byproduct.num_qubits() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: byproduct.num_qubits(),
            });
        }
        validate_stop_level(u.k(), stop_level)?;
        let support = Monomial::from_indices(&byproduct.x_support())?;
        let active: BTreeSet<Monomial> =
            nonempty_subsets_up_to(support, u.k()).into_iter().collect();
        let op_count = active.len() as u64;
        Ok(Self {
            u,
            k: u.k(),
            stop: stop_level,
            active,
            q: byproduct,
            schedule: layer_schedule(n, stop_level),
            next: 0,
            pending: None,
            op_count,
        })
    }

    /// The next gadget to run, or `None` once all layers are done.
    ///
    /// Repeated calls without [`Cascade::absorb`] return the same step.
    pub fn next_step(&mut self) -> Option<CascadeStep> {
        if self.pending.is_none() && self.next < self.schedule.len() {
            let subset = self.schedule[self.next];
            let fire = self.active.contains(&subset);
            self.pending = Some(CascadeStep {
                index: self.next,
                subset,
                choice: if fire { Choice::A } else { Choice::B },
            });
        }
        self.pending
    }

    /// Feeds back the byproducts of the pending gadget, whose output is
    /// `P1 · D_T^{fired} · P2` applied to its input.
    pub fn absorb(&mut self, p2: &PauliString, p1: &PauliString) -> Result<()> {
        let step = self
            .pending
            .take()
            .ok_or_else(|| Error::InvalidArgument("no gadget is pending".into()))?;
        let q2 = p2.multiply(&self.q)?;
        if step.choice == Choice::A {
            let t = step.subset;
            self.toggle(t);
            let s = Monomial::from_indices(&q2.x_support())?.without(t);
            let room = self.k.saturating_sub(t.len());
            for extra in nonempty_subsets_up_to(s, room) {
                self.toggle(t.union(extra));
            }
        }
        self.q = p1.multiply(&q2)?;
        self.next += 1;
        Ok(())
    }

    fn toggle(&mut self, t: Monomial) {
        self.op_count += 1;
        if !self.active.remove(&t) {
            self.active.insert(t);
        }
    }

    pub fn is_done(&self) -> bool {
        self.next == self.schedule.len()
    }

    pub fn active(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.active.iter().copied()
    }

    /// Builds `W` and the residual `R = X_s W X_s = (X_s W X_s W†)·W`, where
    /// `s` is the X-support of `Q`. Then `Q†·R·(Q·W·U|ψ⟩) = U|ψ⟩`.
    pub fn finish(mut self) -> Result<CascadeOutcome> {
        if !self.is_done() {
            return Err(Error::IncompleteTranscript(format!(
                "{} of {} gadgets absorbed",
                self.next,
                self.schedule.len()
            )));
        }
        let n = self.u.num_qubits();
        let level = self.k - self.stop;
        let mut w = ZkElement::identity(n, level);
        for t in &self.active {
            debug_assert!(t.len() >= self.stop);
            let d = self.u.derivative(*t);
            self.op_count += w.multiply_assign(&d) as u64 + u64::from(d.is_negative());
        }
        let g_prime = w.conjugate_by_x(&self.q.x_support())?;
        let mut residual = g_prime;
        self.op_count += residual.multiply_assign(&w) as u64;
        let residual = residual.with_k(level)?;
        Ok(CascadeOutcome {
            residual,
            final_pauli: self.q.adjoint(),
            op_count: self.op_count,
        })
    }
}

pub fn validate_stop_level(k: usize, a: usize) -> Result<()> {
    if a == 0 || (a > 1 && a >= k) {
        return Err(Error::InvalidArgument(format!(
            "stop level a = {a} must satisfy 1 ≤ a ≤ k − 1 (a = 1 is allowed for k = 1), k = {k}"
        )));
    }
    Ok(())
}

/// Replays the classical processing of a protocol run from its transcript.
///
/// Expects the base byproduct followed by `P2, P1` per gadget, and checks that
/// every recorded choice is the one the cascade would make.
pub fn classical_outcome_processing(
    u: &ZkElement,
    transcript: &Transcript,
    a: usize,
) -> Result<CascadeOutcome> {
    let mut byproducts = transcript.byproducts.iter();
    let base = byproducts
        .next()
        .ok_or_else(|| Error::IncompleteTranscript("missing teleportation byproduct".into()))?;
    let mut cascade = Cascade::new(u, a, base.clone())?;
    let mut choices = transcript.choices.iter();
    while let Some(step) = cascade.next_step() {
        let missing = || Error::IncompleteTranscript(format!("gadget {} not recorded", step.index));
        let recorded = *choices.next().ok_or_else(missing)?;
        if recorded != step.choice.bit() {
            return Err(Error::InvalidArgument(format!(
                "gadget {} recorded choice {recorded}, cascade requires {}",
                step.index,
                step.choice.bit()
            )));
        }
        let p2 = byproducts.next().ok_or_else(missing)?;
        let p1 = byproducts.next().ok_or_else(missing)?;
        cascade.absorb(p2, p1)?;
    }
    if byproducts.next().is_some() || choices.next().is_some() {
        return Err(Error::InvalidArgument(
            "transcript has entries beyond the last layer".into(),
        ));
    }
    cascade.finish()
}
