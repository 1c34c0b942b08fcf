use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::PauliString;
use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate};

/// Most qubits a [`ZkElement`] may address (one bit per qubit in a `u64`).
pub const MAX_ZK_QUBITS: usize = 64;

/// Largest width for which [`ZkElement::to_diagonal`] builds a dense vector.
pub const MAX_DENSE_ZK_QUBITS: usize = 12;

/// A nonempty set of qubit indices, stored as a bitmask.
///
/// Ordered by size, then lexicographically by sorted index list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(u64);

impl Monomial {
    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &i in indices {
            if i >= MAX_ZK_QUBITS {
                return Err(Error::InvalidArgument(format!(
                    "qubit index {i} out of range"
                )));
            }
            mask |= 1 << i;
        }
        Ok(Self(mask))
    }

    pub fn single(i: usize) -> Self {
        Self(1 << i)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub fn is_subset_of(self, other: Monomial) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn without(self, other: Monomial) -> Monomial {
        Monomial(self.0 & !other.0)
    }

    pub fn union(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    pub fn indices(self) -> Vec<usize> {
        (0..MAX_ZK_QUBITS).filter(|&i| self.contains(i)).collect()
    }

    /// Highest index plus one; zero for the empty set.
    pub fn span(self) -> usize {
        MAX_ZK_QUBITS - self.0.leading_zeros() as usize
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // Bit reversal puts qubit 0 at the top, so a larger reversed mask is
        // lexicographically earlier among sets of equal size.
        self.len()
            .cmp(&other.len())
            .then_with(|| other.0.reverse_bits().cmp(&self.0.reverse_bits()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        f.write_str(&idx.join(","))
    }
}

/// Element of the group generated by `±I`, `Z` and multi-controlled `Z` gates
/// with at most `k − 1` controls.
///
/// Represented as `sign · (−1)^{f(b)}` where `f` is a GF(2) polynomial given by
/// its set of monomials. `k` is a declared bound: every monomial has at most
/// `k` qubits, but the element may sit lower in the hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZkElement {
    n: usize,
    k: usize,
    negative: bool,
    monomials: BTreeSet<Monomial>,
}

impl ZkElement {
    pub fn identity(n: usize, k: usize) -> Self {
        assert!(
            n <= MAX_ZK_QUBITS,
            "ZkElement supports at most {MAX_ZK_QUBITS} qubits"
        );
        Self {
            n,
            k,
            negative: false,
            monomials: BTreeSet::new(),
        }
    }

    /// Product of the listed multi-controlled Z gates; repeated monomials cancel.
    pub fn from_monomials<I, S>(n: usize, k: usize, negative: bool, monomials: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        if n > MAX_ZK_QUBITS {
            return Err(Error::TooLarge {
                what: "Z^(k) element",
                got: n,
                max: MAX_ZK_QUBITS,
            });
        }
        let mut g = Self::identity(n, k);
        g.negative = negative;
        for m in monomials {
            let m = m.as_ref();
            if m.is_empty() {
                return Err(Error::InvalidArgument("empty monomial".into()));
            }
            if let Some(&bad) = m.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidArgument(format!(
                    "qubit {bad} outside width {n}"
                )));
            }
            let mono = Monomial::from_indices(m)?;
            if mono.len() != m.len() {
                return Err(Error::InvalidArgument(format!(
                    "repeated index in monomial {m:?}"
                )));
            }
            if mono.len() > k {
                return Err(Error::InvalidArgument(format!(
                    "monomial {mono} exceeds level bound {k}"
                )));
            }
            g.toggle(mono);
        }
        Ok(g)
    }

    /// Multi-controlled Z on `qubits` (a single qubit gives `Z`).
    pub fn mcz(n: usize, qubits: &[usize]) -> Result<Self> {
        Self::from_monomials(n, qubits.len(), false, [qubits])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Declared level bound.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn with_k(mut self, k: usize) -> Result<Self> {
        if self.level() > k {
            return Err(Error::InvalidArgument(format!(
                "level {} exceeds requested bound {k}",
                self.level()
            )));
        }
        self.k = k;
        Ok(self)
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn monomials(&self) -> impl ExactSizeIterator<Item = Monomial> + '_ {
        self.monomials.iter().copied()
    }

    pub fn contains(&self, m: Monomial) -> bool {
        self.monomials.contains(&m)
    }

    pub fn is_identity(&self) -> bool {
        !self.negative && self.monomials.is_empty()
    }

    /// True when the element is `±I`.
    pub fn is_scalar(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Largest monomial size; zero for `±I`.
    pub fn level(&self) -> usize {
        self.monomials.iter().next_back().map_or(0, |m| m.len())
    }

    /// Multiplies in one monomial (symmetric difference on the set).
    pub fn toggle(&mut self, m: Monomial) {
        debug_assert!(!m.is_empty() && m.span() <= self.n);
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }

    pub fn flip_sign(&mut self) {
        self.negative = !self.negative;
    }

    pub fn multiply(&self, other: &ZkElement) -> Result<ZkElement> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut out = self.clone();
        out.k = self.k.max(other.k);
        out.multiply_assign(other);
        Ok(out)
    }

    /// In-place product; returns the number of monomial toggles performed.
    pub fn multiply_assign(&mut self, other: &ZkElement) -> usize {
        debug_assert_eq!(self.n, other.n);
        self.negative ^= other.negative;
        self.k = self.k.max(other.k);
        for &m in &other.monomials {
            self.toggle(m);
        }
        other.monomials.len()
    }

    /// `X_i G X_i G†`, which is `(−1)^{f(b ⊕ e_i) + f(b)}`.
    ///
    /// A monomial `S ∋ i` contributes `S ∖ {i}`, or a sign flip when `S = {i}`.
    pub fn conjugate_by_single_x(&self, i: usize) -> ZkElement {
        let mut out = ZkElement::identity(self.n, self.k.saturating_sub(1));
        let bit = Monomial::single(i);
        for &m in self.monomials.iter().filter(|m| m.contains(i)) {
            let rest = m.without(bit);
            if rest.is_empty() {
                out.flip_sign();
            } else {
                out.toggle(rest);
            }
        }
        out
    }

    /// `G' = X_s G X_s G†` for the qubit subset `s`.
    ///
    /// Built one qubit at a time: with `G'_t` for `t` and `j ∉ t`,
    /// `G'_{t+j} = (X_j G'_t X_j G'_t†) · G'_t · (X_j G X_j G†)`.
    pub fn conjugate_by_x(&self, s: &[usize]) -> Result<ZkElement> {
        let mut seen = 0u64;
        let mut acc = ZkElement::identity(self.n, self.k.saturating_sub(1));
        for &j in s {
            if j >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "qubit {j} outside width {}",
                    self.n
                )));
            }
            if (seen >> j) & 1 == 1 {
                return Err(Error::InvalidArgument(format!(
                    "qubit {j} repeated in subset"
                )));
            }
            seen |= 1 << j;
            let mut next = acc.conjugate_by_single_x(j);
            next.multiply_assign(&acc);
            next.multiply_assign(&self.conjugate_by_single_x(j));
            next.k = self.k.saturating_sub(1);
            acc = next;
        }
        Ok(acc)
    }

    /// Splits `G X_s = X_s · G' · G` and returns `(X_s, G', G)`.
    pub fn commute_x_left(&self, s: &[usize]) -> Result<(PauliString, ZkElement, ZkElement)> {
        let g_prime = self.conjugate_by_x(s)?;
        Ok((PauliString::x_on(self.n, s), g_prime, self.clone()))
    }

    /// Discrete derivative `∂_T f`: the polynomial `Σ_{S ⊇ T} x^{S ∖ T}`.
    ///
    /// A monomial equal to `T` contributes the constant term (a sign flip).
    pub fn derivative(&self, t: Monomial) -> ZkElement {
        let mut out = ZkElement::identity(self.n, self.k.saturating_sub(t.len()));
        for &m in self.monomials.iter().filter(|m| t.is_subset_of(**m)) {
            let rest = m.without(t);
            if rest.is_empty() {
                out.flip_sign();
            } else {
                out.toggle(rest);
            }
        }
        out
    }

    /// Multi-controlled Z gates reproducing the element up to its sign.
    ///
    /// Returns the circuit and whether a global `−1` remains.
    pub fn to_circuit(&self) -> (Circuit, bool) {
        let mut c = Circuit::new(self.n);
        for m in &self.monomials {
            c.push(Gate::Mcz, m.indices());
        }
        (c, self.negative)
    }

    /// Dense diagonal, entry `b` being `sign · Π_S (−1)^{Π_{i∈S} b_i}`, with
    /// qubit 0 the most significant bit of `b`.
    pub fn to_diagonal(&self) -> Result<Vec<f64>> {
        if self.n > MAX_DENSE_ZK_QUBITS {
            return Err(Error::TooLarge {
                what: "dense diagonal",
                got: self.n,
                max: MAX_DENSE_ZK_QUBITS,
            });
        }
        let n = self.n;
        let masks: Vec<usize> = self
            .monomials
            .iter()
            .map(|m| {
                m.indices()
                    .iter()
                    .fold(0usize, |acc, &i| acc | (1 << (n - 1 - i)))
            })
            .collect();
        Ok((0..1usize << n)
            .map(|b| {
                let odd = masks.iter().filter(|&&m| b & m == m).count() % 2 == 1;
                if odd ^ self.negative {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect())
    }

    /// Bit-vector encoding: the sign bit, then one presence bit per candidate
    /// monomial of size `1..=k` in canonical order.
    pub fn to_bitmap(&self) -> Vec<bool> {
        let mut bits = vec![self.negative];
        for size in 1..=self.k.min(self.n) {
            for m in subsets_of_size(self.n, size) {
                bits.push(self.monomials.contains(&m));
            }
        }
        bits
    }

    /// Parses the text form written by `Display`.
    pub fn parse(text: &str, n: usize, k: usize) -> Result<Self> {
        let mut parts = text.trim().split(';');
        let negative = match parts.next() {
            Some("+") => false,
            Some("-") => true,
            other => return Err(Error::Parse(format!("bad sign {other:?} in {text:?}"))),
        };
        let monomials = parts
            .map(|p| {
                p.split(',')
                    .map(|i| {
                        i.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad index {i:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_monomials(n, k, negative, monomials)
    }

    /// Uniform random element: each monomial of size `1..=min(k, n)` is present
    /// with probability 1/2, and the sign is uniform. `k` may exceed `n`.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut g = Self::identity(n, k);
        g.negative = rng.random_bool(0.5);
        for size in 1..=k.min(n) {
            for m in subsets_of_size(n, size) {
                if rng.random_bool(0.5) {
                    g.monomials.insert(m);
                }
            }
        }
        g
    }

    /// Every element with monomials of size at most `k`, in a fixed order.
    pub fn enumerate(n: usize, k: usize) -> Result<Vec<ZkElement>> {
        let candidates: Vec<Monomial> =
            (1..=k.min(n)).flat_map(|s| subsets_of_size(n, s)).collect();
        if candidates.len() > 16 {
            return Err(Error::TooLarge {
                what: "Z^(k) enumeration",
                got: candidates.len(),
                max: 16,
            });
        }
        let mut out = Vec::with_capacity(1 << (candidates.len() + 1));
        for negative in [false, true] {
            for pick in 0u32..1 << candidates.len() {
                let mut g = Self::identity(n, k);
                g.negative = negative;
                for (j, m) in candidates.iter().enumerate() {
                    if (pick >> j) & 1 == 1 {
                        g.monomials.insert(*m);
                    }
                }
                out.push(g);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ZkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for m in &self.monomials {
            write!(f, ";{m}")?;
        }
        Ok(())
    }
}

/// All subsets of `0..n` with exactly `size` elements, in monomial order.
pub fn subsets_of_size(n: usize, size: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Monomial>) {
        if current.len() == size {
            out.push(Monomial::from_indices(current).expect("indices below 64"));
            return;
        }
        for i in start..n {
            if n - i < size - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, size, current, out);
            current.pop();
        }
    }
    if size > 0 && size <= n {
        rec(0, n, size, &mut current, &mut out);
    }
    out
}

/// Nonempty subsets of `support` with at most `max_size` elements.
pub fn nonempty_subsets_up_to(support: Monomial, max_size: usize) -> Vec<Monomial> {
    let idx = support.indices();
    let mut out = Vec::new();
    for size in 1..=max_size.min(idx.len()) {
        for local in subsets_of_size(idx.len(), size) {
            let mask = local
                .indices()
                .iter()
                .fold(0u64, |acc, &j| acc | (1 << idx[j]));
            out.push(Monomial(mask));
        }
    }
    out
}

/// `C(n, k)` as `u64`, saturating.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| {
        acc.saturating_mul((n - i) as u64) / (i as u64 + 1)
    })
}
