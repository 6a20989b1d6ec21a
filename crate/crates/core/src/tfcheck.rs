//! Witnesses for non-translation-finiteness.
//!
//! `S` is not TF exactly when there are strictly increasing `(a_n)`, `(b_n)`
//! with `a_i + b_n in S` for all `i <= n`. Finding such a pair is only
//! semi-decidable, so searches report "none found in this window" separately
//! from "ran out of budget"; eventually periodic sets get exact verdicts.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zset::{self, CombineMode, SetDescriptor, SetError, WindowSet};

/// Sums at or below this bound are checked against one materialized window.
const VERIFY_WINDOW_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TfError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("search budget of {budget} steps exhausted (deepest prefix reached: {deepest})")]
    BudgetExhausted { budget: u64, deepest: usize },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("descriptor is not eventually periodic: {0}")]
    WrongKind(String),
    #[error("witness depth {got} is below the Ramsey bound {required} for target depth {target}")]
    TooShallow { target: usize, required: usize, got: usize },
    #[error("no monochromatic increasing index set of size {size} among {rows} witness rows")]
    NoMonochromaticClique { size: usize, rows: usize },
    #[error("witness fails verification: {0}")]
    VerificationFailed(Failure),
    #[error("shift by {shift} takes b_1 = {b1} below zero")]
    Underflow { shift: i64, b1: u64 },
}

/// Pair of strictly increasing sequences with `a_i + b_n in S` for `i <= n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    /// Equal to `a.len()`.
    pub depth: usize,
    /// Largest `n` for which `a_1..a_n + b_n` have been checked.
    pub verified_through: usize,
}

impl Witness {
    /// Unverified witness with `depth = a.len()`.
    pub fn new(a: Vec<u64>, b: Vec<u64>) -> Self {
        let depth = a.len();
        Witness { a, b, depth, verified_through: 0 }
    }

    /// Structural invariants, independent of any set.
    pub fn check_structure(&self) -> Result<(), String> {
        if self.depth != self.a.len() {
            return Err(format!("depth {} differs from len(a) = {}", self.depth, self.a.len()));
        }
        if self.b.len() < self.depth {
            return Err(format!("len(b) = {} is below depth {}", self.b.len(), self.depth));
        }
        if let Some(i) = self.a.windows(2).position(|w| w[0] >= w[1]) {
            return Err(format!("a is not strictly increasing at index {}", i + 2));
        }
        if let Some(i) = self.b.windows(2).position(|w| w[0] >= w[1]) {
            return Err(format!("b is not strictly increasing at index {}", i + 2));
        }
        Ok(())
    }

    /// Largest sum `a_i + b_n` with `i <= n <= depth`, if representable.
    pub fn max_sum(&self) -> Option<u64> {
        match (self.a.last(), self.b.get(self.depth.wrapping_sub(1))) {
            (Some(&a), Some(&b)) => a.checked_add(b),
            _ => Some(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Failure {
    Structure { reason: String },
    /// 1-based indices of the first missing sum.
    Membership { i: usize, n: usize, sum: u64 },
    Overflow { i: usize, n: usize },
    Evaluation { message: String },
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Structure { reason } => write!(f, "structurally invalid: {reason}"),
            Failure::Membership { i, n, sum } => write!(f, "a_{i} + b_{n} = {sum} is not in the set"),
            Failure::Overflow { i, n } => write!(f, "a_{i} + b_{n} overflows"),
            Failure::Evaluation { message } => write!(f, "membership could not be evaluated: {message}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub depth: usize,
    pub verified_through: usize,
    pub failure: Option<Failure>,
}

/// Rechecks every sum `a_i + b_n`, `i <= n <= depth`, against `S`.
pub fn verify_witness(set: &SetDescriptor, w: &Witness) -> Verification {
    let report = |through, failure: Option<Failure>| Verification {
        valid: failure.is_none(),
        depth: w.depth,
        verified_through: through,
        failure,
    };
    if let Err(reason) = w.check_structure() {
        return report(0, Some(Failure::Structure { reason }));
    }
    let window = match w.max_sum() {
        Some(m) if m < VERIFY_WINDOW_LIMIT || !set.fast_membership() => match set.materialize(m + 1) {
            Ok(win) => Some(win),
            Err(e) => return report(0, Some(Failure::Evaluation { message: e.to_string() })),
        },
        _ => None,
    };
    for n in 1..=w.depth {
        for i in 1..=n {
            let Some(sum) = w.a[i - 1].checked_add(w.b[n - 1]) else {
                return report(n - 1, Some(Failure::Overflow { i, n }));
            };
            let member = match &window {
                Some(win) => Ok(win.contains(sum)),
                None => set.contains(sum),
            };
            match member {
                Ok(true) => {}
                Ok(false) => return report(n - 1, Some(Failure::Membership { i, n, sum })),
                Err(e) => return report(n - 1, Some(Failure::Evaluation { message: e.to_string() })),
            }
        }
    }
    report(w.depth, None)
}

/// Verifies and stamps `verified_through`, or fails with the first failure.
pub fn certify(set: &SetDescriptor, mut w: Witness) -> Result<Witness, TfError> {
    let v = verify_witness(set, &w);
    match v.failure {
        None => {
            w.verified_through = v.verified_through;
            Ok(w)
        }
        Some(f) => Err(TfError::VerificationFailed(f)),
    }
}

struct Search<'a> {
    window: &'a WindowSet,
    depth: usize,
    budget: u64,
    steps: u64,
    deepest: usize,
    a: Vec<u64>,
    b: Vec<u64>,
}

impl Search<'_> {
    fn charge(&mut self, cost: u64) -> Result<(), TfError> {
        self.steps = self.steps.saturating_add(cost);
        if self.steps > self.budget {
            return Err(TfError::BudgetExhausted { budget: self.budget, deepest: self.deepest });
        }
        Ok(())
    }

    /// `rest` holds every `b > b_n` with `a_i + b in S` for all chosen `a_i`.
    fn extend(&mut self, rest: &[u64]) -> Result<bool, TfError> {
        let n = self.a.len();
        self.deepest = self.deepest.max(n);
        if n == self.depth {
            return Ok(true);
        }
        let last_a = *self.a.last().expect("search starts from a_1");
        let elems = self.window.elements();
        // k-way merge of the streams (S - b) ∩ (a_n, W - b) over b in rest
        let mut heap = BinaryHeap::with_capacity(rest.len());
        for (slot, &b) in rest.iter().enumerate() {
            let pos = elems.partition_point(|&s| s <= b + last_a);
            if let Some(&s) = elems.get(pos) {
                heap.push(Reverse((s - b, slot, pos)));
            }
        }
        self.charge(rest.len() as u64)?;
        let mut previous = None;
        while let Some(Reverse((cand, slot, pos))) = heap.pop() {
            if let Some(&s) = elems.get(pos + 1) {
                heap.push(Reverse((s - rest[slot], slot, pos + 1)));
            }
            if previous == Some(cand) {
                continue;
            }
            previous = Some(cand);
            self.charge(rest.len() as u64 + 1)?;
            let next: Vec<u64> = rest.iter().copied().filter(|&b| self.window.contains(cand + b)).collect();
            // next is non-empty: cand came from some stream
            if next.len() < self.depth - n {
                continue;
            }
            self.a.push(cand);
            self.b.push(next[0]);
            if self.extend(&next[1..])? {
                return Ok(true);
            }
            self.a.pop();
            self.b.pop();
        }
        Ok(false)
    }
}

/// Searches for a witness of depth `depth` with every sum `a_i + b_n < W`.
///
/// The search is exhaustive over that window: translating `(a, b)` to
/// `(a - a_1, b + a_1)` keeps all sums, so `a_1 = 0`; for a fixed `a` prefix
/// the least admissible `b_n` is always the best choice. Candidates for the
/// next `a` are tried in increasing order, so the result is the
/// lexicographically least such witness. `Ok(None)` means no witness exists
/// inside the window (not that `S` is TF); exceeding `budget` membership
/// steps is an error.
pub fn find_nontf_witness(
    set: &SetDescriptor,
    depth: usize,
    window: u64,
    budget: u64,
) -> Result<Option<Witness>, TfError> {
    if depth == 0 || window == 0 {
        return Err(TfError::InvalidParameter("depth and window must be at least 1".into()));
    }
    let win = set.materialize(window)?;
    find_in_window(&win, depth, budget)
}

/// [`find_nontf_witness`] over an already materialized window.
pub fn find_in_window(win: &WindowSet, depth: usize, budget: u64) -> Result<Option<Witness>, TfError> {
    let elems = win.elements();
    let Some((&b1, rest)) = elems.split_first() else {
        return Ok(None);
    };
    if rest.len() + 1 < depth {
        return Ok(None);
    }
    let mut search = Search { window: win, depth, budget, steps: 0, deepest: 0, a: vec![0], b: vec![b1] };
    if search.extend(rest)? {
        let mut w = Witness::new(search.a, search.b);
        w.verified_through = depth;
        Ok(Some(w))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsetEntry {
    pub n: u64,
    pub count: u64,
    /// Set when a counted element lies in the upper half of the window, so
    /// the true count may exceed the windowed one.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsetProfile {
    pub nmax: u64,
    pub window: u64,
    pub entries: Vec<TsetEntry>,
}

impl TsetProfile {
    pub fn count(&self, n: u64) -> Option<u64> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.count)
    }
}

/// For each `n <= nmax`, the number of `t` with `t` and `t + n` both in
/// `S ∩ [0, W)`.
pub fn tset_profile(set: &SetDescriptor, nmax: u64, window: u64) -> Result<TsetProfile, TfError> {
    if nmax == 0 {
        return Err(TfError::InvalidParameter("nmax must be at least 1".into()));
    }
    let win = set.materialize(window)?;
    let half = window / 2;
    let entries = (1..=nmax)
        .map(|n| {
            let mut count = 0;
            let mut truncated = false;
            for &t in win.elements() {
                match t.checked_add(n) {
                    Some(u) if u < window => {
                        if win.contains(u) {
                            count += 1;
                            truncated |= t >= half;
                        }
                    }
                    _ => break,
                }
            }
            TsetEntry { n, count, truncated }
        })
        .collect();
    Ok(TsetProfile { nmax, window, entries })
}

/// Exact verdict for eventually periodic sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TfVerdict {
    /// The set is finite.
    Tf,
    /// The set contains `start + period * Z+`; witness `a_i = i * period`,
    /// `b_n = start + n * period`.
    NonTf { start: u64, period: u64 },
}

impl TfVerdict {
    pub fn is_tf(&self) -> bool {
        matches!(self, TfVerdict::Tf)
    }

    /// The progression witness truncated to `depth`.
    pub fn witness(&self, depth: usize) -> Option<Witness> {
        let TfVerdict::NonTf { start, period } = *self else { return None };
        let a = (1..=depth as u64).map(|i| i * period).collect();
        let b = (1..=depth as u64).map(|n| start + n * period).collect();
        let mut w = Witness::new(a, b);
        w.verified_through = depth;
        Some(w)
    }
}

pub fn tf_exact_eventually_periodic(set: &SetDescriptor) -> Result<TfVerdict, TfError> {
    let p = set.as_periodic().ok_or_else(|| TfError::WrongKind(set.to_string()))?;
    Ok(match p.first_tail_element() {
        None => TfVerdict::Tf,
        Some(start) => TfVerdict::NonTf { start, period: p.period },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseySplit {
    pub side: Side,
    pub witness: Witness,
    /// 1-based indices `s_0 < s_1 < ... < s_t` into the input witness.
    pub indices: Vec<usize>,
}

/// Upper bound on the diagonal Ramsey number `R(t, t)`.
pub fn ramsey_bound(t: usize) -> usize {
    match t {
        0 => 0,
        1 => 1,
        2 => 2,
        3 => 6,
        4 => 18,
        5 => 46,
        _ => {
            // Erdős–Szekeres: R(t, t) <= C(2t - 2, t - 1)
            let (n, k) = (2 * t as u128 - 2, t as u128 - 1);
            let c = (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1));
            usize::try_from(c).unwrap_or(usize::MAX)
        }
    }
}

const MAX_RAMSEY_ROWS: usize = 128;
const CLIQUE_NODE_LIMIT: u64 = 50_000_000;

/// Lexicographically least clique of `size` vertices in the graph `adj`.
fn find_clique(adj: &[u128], size: usize, nodes: &mut u64) -> Option<Vec<usize>> {
    fn go(adj: &[u128], size: usize, chosen: &mut Vec<usize>, cand: u128, nodes: &mut u64) -> bool {
        if chosen.len() == size {
            return true;
        }
        if (cand.count_ones() as usize) < size - chosen.len() || *nodes > CLIQUE_NODE_LIMIT {
            return false;
        }
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            *nodes += 1;
            chosen.push(v);
            if go(adj, size, chosen, rest & adj[v], nodes) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let all = if adj.len() == 128 { u128::MAX } else { (1u128 << adj.len()) - 1 };
    let mut chosen = Vec::with_capacity(size);
    go(adj, size, &mut chosen, all, nodes).then_some(chosen)
}

/// Splits a witness for `A ∪ B` into a witness for `A` or for `B`.
///
/// Pairs `m < n` of witness rows are coloured by whether `a_m + b_n` lies in
/// `A` or only in `B`. A monochromatic index set `s_0 < ... < s_t` yields the
/// depth-`t` witness `c_j = a_{s_{j-1}}`, `d_j = b_{s_j}` for that side.
/// Colour `A` is searched first, and within a colour the lexicographically
/// least index set wins. Only the first 128 rows are used.
pub fn ramsey_split(
    a_set: &SetDescriptor,
    b_set: &SetDescriptor,
    w: &Witness,
    target_depth: usize,
) -> Result<RamseySplit, TfError> {
    if target_depth == 0 {
        return Err(TfError::InvalidParameter("target depth must be at least 1".into()));
    }
    let required = ramsey_bound(target_depth);
    if w.depth < required {
        return Err(TfError::TooShallow { target: target_depth, required, got: w.depth });
    }
    let union = zset::combine(a_set, b_set, CombineMode::Union);
    let checked = certify(&union, w.clone())?;
    let rows = checked.depth.min(MAX_RAMSEY_ROWS);
    let mut in_a = vec![0u128; rows];
    let mut in_b = vec![0u128; rows];
    for m in 0..rows {
        for n in m + 1..rows {
            let sum = checked.a[m] + checked.b[n];
            if a_set.contains(sum)? {
                in_a[m] |= 1 << n;
                in_a[n] |= 1 << m;
            } else {
                in_b[m] |= 1 << n;
                in_b[n] |= 1 << m;
            }
        }
    }
    let size = target_depth + 1;
    let mut nodes = 0;
    for (side, adj, set) in [(Side::A, &in_a, a_set), (Side::B, &in_b, b_set)] {
        if let Some(s) = find_clique(adj, size, &mut nodes) {
            let c = (1..size).map(|j| checked.a[s[j - 1]]).collect();
            let d = (1..size).map(|j| checked.b[s[j]]).collect();
            let witness = certify(set, Witness::new(c, d))?;
            let indices = s.iter().map(|i| i + 1).collect();
            return Ok(RamseySplit { side, witness, indices });
        }
    }
    Err(TfError::NoMonochromaticClique { size, rows })
}

/// `(a, b + k)`: a witness for `S + k` when `w` is one for `S`.
pub fn transform_witness(w: &Witness, k: i64) -> Result<Witness, TfError> {
    let b = w
        .b
        .iter()
        .map(|&x| x.checked_add_signed(k))
        .collect::<Option<Vec<_>>>()
        .ok_or(TfError::Underflow { shift: k, b1: w.b.first().copied().unwrap_or(0) })?;
    Ok(Witness { a: w.a.clone(), b, depth: w.depth, verified_through: w.verified_through })
}
