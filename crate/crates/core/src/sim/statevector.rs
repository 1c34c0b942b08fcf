use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{
    check_init, check_targets, Backend, Basis, DensityMatrix, EventLog, Gate, MeasurementOutcome,
    Qubit,
};
use crate::error::{Error, Result};
use crate::rng::Sampler;

/// Largest tensor the simulator will build.
pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense pure state with labelled qubits.
///
/// In the default recycling mode a measured qubit is projected out of the
/// tensor. In reference mode ([`Statevector::reference`]) it stays in the
/// tensor in its collapsed basis state but is no longer live, which is the
/// measure-at-the-end picture used to cross-check recycling.
#[derive(Debug, Clone)]
pub struct Statevector {
    amps: Vec<Complex64>,
    /// Tensor order, including retired qubits in reference mode.
    slots: Vec<Qubit>,
    live: Vec<Qubit>,
    global_phase: Complex64,
    next_label: u32,
    recycle: bool,
    log: EventLog,
}

impl Default for Statevector {
    fn default() -> Self {
        Self::new()
    }
}

impl Statevector {
    /// The empty state: a single amplitude equal to one.
    pub fn new() -> Self {
        Self {
            amps: vec![ONE],
            slots: Vec::new(),
            live: Vec::new(),
            global_phase: ONE,
            next_label: 0,
            recycle: true,
            log: EventLog::new(),
        }
    }

    /// An empty state whose measurements keep collapsed qubits in the tensor.
    pub fn reference() -> Self {
        Self {
            recycle: false,
            ..Self::new()
        }
    }

    /// Builds a state from amplitudes, normalizing them. Labels are `q0, q1, ...`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::TooLarge {
                what: "statevector",
                got: n,
                max: MAX_QUBITS,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::InvalidArgument("amplitudes have zero norm".into()));
        }
        let mut state = Self::new();
        state.amps = amps.into_iter().map(|a| a / norm).collect();
        state.slots = (0..n as u32).map(Qubit).collect();
        state.live = state.slots.clone();
        state.next_label = n as u32;
        let live = state.live.clone();
        state.log.alloc(live);
        Ok(state)
    }

    /// Product state from a string over `0 1 + -`.
    pub fn product(init: &str) -> Result<Self> {
        let mut state = Self::new();
        state.allocate(init)?;
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn global_phase(&self) -> Complex64 {
        self.global_phase
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_reference(&self) -> bool {
        !self.recycle
    }

    /// Amplitudes with the tracked global phase folded in.
    pub fn amplitudes_with_phase(&self) -> Vec<Complex64> {
        self.amps.iter().map(|a| a * self.global_phase).collect()
    }

    fn num_slots(&self) -> usize {
        self.slots.len()
    }

    fn position(&self, q: Qubit) -> Result<usize> {
        if !self.live.contains(&q) {
            return Err(Error::DeadQubit(q));
        }
        Ok(self
            .slots
            .iter()
            .position(|&s| s == q)
            .expect("live qubit has a slot"))
    }

    /// Bit index of a tensor position inside an amplitude index.
    fn shift(&self, pos: usize) -> usize {
        self.num_slots() - 1 - pos
    }

    /// Amplitudes reordered so that `order[0]` is the most significant bit.
    ///
    /// `order` must be a permutation of the live qubits; retired qubits of a
    /// reference-mode state are traced out first, so this fails if they are
    /// entangled with the rest.
    pub fn amplitudes_in_order(&self, order: &[Qubit]) -> Result<Vec<Complex64>> {
        if order.len() != self.live.len() {
            return Err(Error::SizeMismatch {
                expected: self.live.len(),
                got: order.len(),
            });
        }
        for (i, &q) in order.iter().enumerate() {
            self.position(q)?;
            if order[..i].contains(&q) {
                return Err(Error::DuplicateTarget(q));
            }
        }
        let compact = self.compacted()?;
        let n = compact.live.len();
        let cshift: Vec<usize> = order
            .iter()
            .map(|q| n - 1 - compact.live.iter().position(|l| l == q).expect("live"))
            .collect();
        let mut out = vec![ZERO; 1 << n];
        for (idx, amp) in compact.amps.iter().enumerate() {
            let mut target = 0usize;
            for (k, &s) in cshift.iter().enumerate() {
                target |= ((idx >> s) & 1) << (n - 1 - k);
            }
            out[target] = *amp;
        }
        Ok(out)
    }

    /// Drops retired slots by reading off their fixed collapsed value.
    fn compacted(&self) -> Result<Statevector> {
        if self.slots.len() == self.live.len() {
            return Ok(self.clone());
        }
        let mut state = self.clone();
        let retired: Vec<Qubit> = self
            .slots
            .iter()
            .copied()
            .filter(|q| !self.live.contains(q))
            .collect();
        for q in retired {
            let pos = state.slots.iter().position(|&s| s == q).expect("slot");
            let shift = state.shift(pos);
            let p1: f64 = state
                .amps
                .iter()
                .enumerate()
                .filter(|(i, _)| (i >> shift) & 1 == 1)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            let bit = usize::from(p1 > 0.5);
            state.amps = project_out(&state.amps, shift, bit);
            state.slots.remove(pos);
        }
        Ok(state)
    }

    /// Reduced density matrix on `keep`, in that order.
    pub fn reduced_density(&self, keep: &[Qubit]) -> Result<DensityMatrix> {
        let compact = self.compacted()?;
        let mut order = keep.to_vec();
        order.extend(compact.live.iter().copied().filter(|q| !keep.contains(q)));
        let amps = compact.amplitudes_in_order(&order)?;
        DensityMatrix::from_pure_partial(&amps, keep.len(), keep.to_vec())
    }

    pub fn probability_one(&self, qubit: Qubit) -> Result<f64> {
        let shift = self.shift(self.position(qubit)?);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> shift) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn fresh_labels(&mut self, count: usize) -> Vec<Qubit> {
        let start = self.next_label;
        self.next_label += count as u32;
        (start..self.next_label).map(Qubit).collect()
    }

    fn grow(&mut self, factor: &[Complex64], labels: Vec<Qubit>) -> Result<()> {
        let n = self.num_slots() + labels.len();
        if n > MAX_QUBITS {
            return Err(Error::TooLarge {
                what: "statevector",
                got: n,
                max: MAX_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * factor.len());
        for a in &self.amps {
            amps.extend(factor.iter().map(|f| a * f));
        }
        self.amps = amps;
        self.slots.extend(labels.iter().copied());
        self.live.extend(labels);
        Ok(())
    }

    fn apply_1q(&mut self, shift: usize, m: [[Complex64; 2]; 2]) {
        let stride = 1usize << shift;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    fn apply_phase_on_mask(&mut self, mask: usize, phase: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    fn kernel(&mut self, gate: Gate, shifts: &[usize]) {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let i = Complex64::i();
        match gate {
            Gate::X => self.apply_1q(shifts[0], [[ZERO, ONE], [ONE, ZERO]]),
            Gate::Y => self.apply_1q(shifts[0], [[ZERO, -i], [i, ZERO]]),
            Gate::Z => self.apply_phase_on_mask(1 << shifts[0], -ONE),
            Gate::H => self.apply_1q(shifts[0], [[h, h], [h, -h]]),
            Gate::S => self.apply_phase_on_mask(1 << shifts[0], i),
            Gate::Sdg => self.apply_phase_on_mask(1 << shifts[0], -i),
            Gate::T => self.apply_phase_on_mask(1 << shifts[0], t),
            Gate::Tdg => self.apply_phase_on_mask(1 << shifts[0], t.conj()),
            Gate::Cnot => self.apply_cnot(shifts[0], shifts[1]),
            Gate::Cz | Gate::Mcz => {
                let mask = shifts.iter().fold(0usize, |m, s| m | (1 << s));
                self.apply_phase_on_mask(mask, -ONE);
            }
        }
    }

    fn remove_slot(&mut self, qubit: Qubit, pos: usize, bit: usize, p: f64) {
        let shift = self.shift(pos);
        let scale = 1.0 / p.sqrt();
        if self.recycle {
            let mut amps = project_out(&self.amps, shift, bit);
            amps.iter_mut().for_each(|a| *a *= scale);
            self.amps = amps;
            self.slots.remove(pos);
        } else {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if (i >> shift) & 1 == bit {
                    *a *= scale;
                } else {
                    *a = ZERO;
                }
            }
        }
        self.live.retain(|&q| q != qubit);
    }
}

/// Keeps the half of `amps` whose bit at `shift` equals `bit`, deleting that bit.
fn project_out(amps: &[Complex64], shift: usize, bit: usize) -> Vec<Complex64> {
    let low = (1usize << shift) - 1;
    (0..amps.len() / 2)
        .map(|j| {
            let idx = ((j & !low) << 1) | (bit << shift) | (j & low);
            amps[idx]
        })
        .collect()
}

fn product_factor(init: &str) -> Vec<Complex64> {
    let h = FRAC_1_SQRT_2;
    let mut factor = vec![ONE];
    for c in init.chars() {
        let (a0, a1) = match c {
            '0' => (1.0, 0.0),
            '1' => (0.0, 1.0),
            '+' => (h, h),
            _ => (h, -h),
        };
        factor = factor.iter().flat_map(|f| [f * a0, f * a1]).collect();
    }
    factor
}

impl Backend for Statevector {
    fn allocate(&mut self, init: &str) -> Result<Vec<Qubit>> {
        check_init(init)?;
        let labels = self.fresh_labels(init.len());
        self.grow(&product_factor(init), labels.clone())?;
        self.log.alloc(labels.clone());
        Ok(labels)
    }

    fn apply(&mut self, gate: Gate, targets: &[Qubit]) -> Result<()> {
        check_targets(gate, targets, &self.live)?;
        let shifts: Vec<usize> = targets
            .iter()
            .map(|&q| self.shift(self.position(q).expect("checked")))
            .collect();
        self.kernel(gate, &shifts);
        self.log.gate(gate, targets);
        Ok(())
    }

    fn measure<S: Sampler + ?Sized>(
        &mut self,
        qubit: Qubit,
        basis: Basis,
        sampler: &mut S,
    ) -> Result<MeasurementOutcome> {
        let pos = self.position(qubit)?;
        let shift = self.shift(pos);
        if basis == Basis::X {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            self.apply_1q(shift, [[h, h], [h, -h]]);
        }
        let p1 = self.probability_one(qubit)?.clamp(0.0, 1.0);
        let bit = match sampler.sample_bit(qubit, p1) {
            Ok(bit) => bit,
            Err(e) => {
                if basis == Basis::X {
                    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                    self.apply_1q(shift, [[h, h], [h, -h]]);
                }
                return Err(e);
            }
        };
        let p = if bit == 1 { p1 } else { 1.0 - p1 };
        self.remove_slot(qubit, pos, usize::from(bit), p);
        let outcome = MeasurementOutcome { qubit, basis, bit };
        self.log.measure(outcome);
        Ok(outcome)
    }

    fn release(&mut self, qubit: Qubit) -> Result<()> {
        let pos = self.position(qubit)?;
        let p1 = self.probability_one(qubit)?;
        if p1 > 1e-10 {
            return Err(Error::DirtyRelease(qubit));
        }
        self.remove_slot(qubit, pos, 0, 1.0 - p1);
        self.log.release(qubit);
        Ok(())
    }

    fn absorb(&mut self, other: Self) -> Result<Vec<Qubit>> {
        let other = other.compacted()?;
        let labels = self.fresh_labels(other.live.len());
        let relabel: Vec<Qubit> = other
            .slots
            .iter()
            .map(|q| labels[other.live.iter().position(|l| l == q).expect("compacted")])
            .collect();
        self.grow(&other.amps, relabel)?;
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

/// Trace distance between two pure states, ignoring global phase.
///
/// Uses `D = sqrt(1 - |<a|b>|^2)` rewritten through the phase-aligned
/// difference `d^2 = |a - e^{iθ} b|^2 = 2 (1 - |<a|b>|)`, which keeps full
/// relative precision when the states are nearly equal.
pub fn pure_trace_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let na = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let inner: Complex64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        / (na * nb);
    let align = if inner.norm() > 0.0 {
        inner.conj() / inner.norm()
    } else {
        ONE
    };
    let d2: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x / na - y / nb * align).norm_sqr())
        .sum();
    let overlap = inner.norm().min(1.0);
    Ok((d2 / 2.0 * (1.0 + overlap)).max(0.0).sqrt().min(1.0))
}
