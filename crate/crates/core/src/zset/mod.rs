//! Subsets of `Z+` with exact membership, enumeration, shifting and window
//! materialization.
//!
//! A [`SetDescriptor`] is a small symbolic description of a possibly infinite
//! set. Windows are always produced by generation (never by probing every
//! integer), so sparse sets such as the powers of two materialize in time
//! proportional to the number of elements.

mod periodic;
mod window;

use std::fmt;

use num::integer::Roots;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::build::GrowthFunction;

pub use periodic::Periodic;
pub(crate) use window::Bitmap;
pub use window::WindowSet;

/// Search ceiling for `nth` on sets that are not known to be infinite.
pub const NTH_SCAN_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("element exceeds the 64-bit range while evaluating {0}")]
    Overflow(&'static str),
    #[error("set has only {available} elements, element {requested} does not exist")]
    Exhausted { requested: u64, available: u64 },
    #[error("no element {requested} found below the scan limit {limit}")]
    ScanLimit { requested: u64, limit: u64 },
    #[error("table is only known below {horizon}, window {window} requested")]
    BeyondHorizon { horizon: u64, window: u64 },
    #[error("growth thresholds exhausted at level {0}")]
    ThresholdsExhausted(u64),
    #[error("invalid descriptor: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombineMode {
    Union,
    Intersect,
    Difference,
}

impl CombineMode {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            CombineMode::Union => a || b,
            CombineMode::Intersect => a && b,
            CombineMode::Difference => a && !b,
        }
    }
}

/// Finite arithmetic progression `start, start + step, ...` with `count` terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApBlock {
    pub start: u64,
    pub step: u64,
    pub count: u64,
}

impl ApBlock {
    pub fn last(&self) -> Option<u64> {
        self.count
            .checked_sub(1)
            .and_then(|c| c.checked_mul(self.step))
            .and_then(|x| x.checked_add(self.start))
    }

    pub fn contains(&self, n: u64) -> bool {
        if self.count == 0 || n < self.start {
            return false;
        }
        let off = n - self.start;
        if self.step == 0 {
            return off == 0;
        }
        off % self.step == 0 && off / self.step < self.count
    }

    fn push_below(&self, bound: u64, out: &mut Vec<u64>) {
        let mut v = self.start;
        for _ in 0..self.count {
            if v >= bound {
                break;
            }
            out.push(v);
            match v.checked_add(self.step) {
                Some(next) if self.step > 0 => v = next,
                _ => break,
            }
        }
    }
}

/// Symbolic, lazily evaluable subset of `Z+`.
///
/// The JSON form is internally tagged by `kind`, e.g.
/// `{"kind":"powers","base":2}` or
/// `{"kind":"eventually-periodic","preperiod":[],"start":0,"period":2,"residues":[0]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetDescriptor {
    /// Explicit finite set; elements strictly increasing.
    Finite { elements: Vec<u64> },
    EventuallyPeriodic(Periodic),
    /// `{ base^n : n >= 1 }`.
    Powers { base: u64 },
    /// `{ base^i + j^exponent : i >= 1, 0 <= j <= i }`.
    PolynomialFamily { base: u64, exponent: u32 },
    /// Dense blocks `s_{t_k} + 1, ..., s_{t_k} + k` over an infinite base set.
    Clumpy { base: Box<SetDescriptor> },
    /// Slowly growing T-set driven by certified growth thresholds.
    SlowTset { growth: GrowthFunction },
    /// Finite union of arithmetic progression blocks.
    Appendix { blocks: Vec<ApBlock> },
    /// Elements of an unknown set, known exactly below `horizon`.
    Table { elements: Vec<u64>, horizon: u64 },
    Primes,
    /// Triangular numbers `k(k+1)/2`, `k >= 1`.
    Triangular,
    /// `base - by = { t : t + by in base }`.
    Shift { base: Box<SetDescriptor>, by: u64 },
    /// `base + by = { s + by : s in base }`.
    Translate { base: Box<SetDescriptor>, by: u64 },
    Combine {
        mode: CombineMode,
        left: Box<SetDescriptor>,
        right: Box<SetDescriptor>,
    },
}

impl SetDescriptor {
    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Self {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        SetDescriptor::Finite { elements }
    }

    pub fn empty() -> Self {
        SetDescriptor::Finite { elements: Vec::new() }
    }

    pub fn periodic(
        preperiod: impl IntoIterator<Item = u64>,
        start: u64,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<Self, SetError> {
        Periodic::new(preperiod, start, period, residues).map(SetDescriptor::EventuallyPeriodic)
    }

    /// `{ offset + step * n : n >= 0 }`.
    pub fn ap(offset: u64, step: u64) -> Result<Self, SetError> {
        if step == 0 {
            return Err(SetError::Invalid("progression step must be positive".into()));
        }
        Self::periodic([], offset, step, [offset % step])
    }

    /// `Z+ = {0, 1, 2, ...}`.
    pub fn nonnegative() -> Self {
        Self::ap(0, 1).expect("valid progression")
    }

    /// `N = {1, 2, 3, ...}`.
    pub fn naturals() -> Self {
        Self::ap(1, 1).expect("valid progression")
    }

    pub fn evens() -> Self {
        Self::ap(0, 2).expect("valid progression")
    }

    pub fn odds() -> Self {
        Self::ap(1, 2).expect("valid progression")
    }

    pub fn powers(base: u64) -> Result<Self, SetError> {
        let d = SetDescriptor::Powers { base };
        d.validate()?;
        Ok(d)
    }

    /// `{ 2^i + j^2 : i >= 1, 0 <= j <= i }`.
    pub fn zero_density_example() -> Self {
        SetDescriptor::PolynomialFamily { base: 2, exponent: 2 }
    }

    /// Checks structural constraints recursively.
    pub fn validate(&self) -> Result<(), SetError> {
        use SetDescriptor::*;
        match self {
            Finite { elements } => {
                if !elements.windows(2).all(|w| w[0] < w[1]) {
                    return Err(SetError::Invalid("finite elements must be strictly increasing".into()));
                }
            }
            EventuallyPeriodic(p) => p.validate()?,
            Powers { base } => {
                if *base < 2 {
                    return Err(SetError::Invalid("powers need base >= 2".into()));
                }
            }
            PolynomialFamily { base, exponent } => {
                if *base < 2 || *exponent == 0 {
                    return Err(SetError::Invalid("polynomial family needs base >= 2 and exponent >= 1".into()));
                }
            }
            Clumpy { base } => base.validate()?,
            SlowTset { growth } => growth.validate().map_err(|e| SetError::Invalid(e.to_string()))?,
            Appendix { blocks } => {
                if blocks.iter().any(|b| b.step == 0 && b.count > 1) {
                    return Err(SetError::Invalid("appendix block with zero step".into()));
                }
                if blocks.iter().any(|b| b.count > 0 && b.last().is_none()) {
                    return Err(SetError::Overflow("appendix block"));
                }
            }
            Table { elements, horizon } => {
                if !elements.windows(2).all(|w| w[0] < w[1]) {
                    return Err(SetError::Invalid("table elements must be strictly increasing".into()));
                }
                if elements.last().is_some_and(|m| m >= horizon) {
                    return Err(SetError::Invalid("table elements must lie below the horizon".into()));
                }
            }
            Primes | Triangular => {}
            Shift { base, .. } | Translate { base, .. } => base.validate()?,
            Combine { left, right, .. } => {
                left.validate()?;
                right.validate()?;
            }
        }
        Ok(())
    }

    /// Exact membership test.
    pub fn contains(&self, n: u64) -> Result<bool, SetError> {
        use SetDescriptor::*;
        Ok(match self {
            Finite { elements } => elements.binary_search(&n).is_ok(),
            EventuallyPeriodic(p) => p.contains(n),
            Powers { base } => is_power(n, *base),
            PolynomialFamily { base, exponent } => in_polynomial_family(n, *base, *exponent),
            Clumpy { .. } => {
                let bound = n.checked_add(1).ok_or(SetError::Overflow("clumpy membership"))?;
                self.materialize(bound)?.contains(n)
            }
            SlowTset { growth } => slow_segments(growth, n.saturating_add(1))?
                .iter()
                .any(|b| b.contains(n)),
            Appendix { blocks } => blocks.iter().any(|b| b.contains(n)),
            Table { elements, horizon } => {
                if n >= *horizon {
                    return Err(SetError::BeyondHorizon { horizon: *horizon, window: n + 1 });
                }
                elements.binary_search(&n).is_ok()
            }
            Primes => is_prime(n),
            Triangular => {
                // k(k+1)/2 = n  <=>  8n + 1 is an odd square
                match n.checked_mul(8).and_then(|x| x.checked_add(1)) {
                    Some(m) => {
                        let r = m.sqrt();
                        n > 0 && r * r == m
                    }
                    None => {
                        let k = (2 * n as u128).sqrt();
                        n > 0 && k * (k + 1) == 2 * n as u128
                    }
                }
            }
            Shift { base, by } => {
                let m = n.checked_add(*by).ok_or(SetError::Overflow("shift membership"))?;
                base.contains(m)?
            }
            Translate { base, by } => n >= *by && base.contains(n - by)?,
            Combine { mode, left, right } => mode.apply(left.contains(n)?, right.contains(n)?),
        })
    }

    /// Exactly `S ∩ [0, bound)`, sorted.
    pub fn materialize(&self, bound: u64) -> Result<WindowSet, SetError> {
        let elements = self.collect_below(bound)?;
        Ok(WindowSet::from_sorted(bound, elements))
    }

    fn collect_below(&self, bound: u64) -> Result<Vec<u64>, SetError> {
        use SetDescriptor::*;
        Ok(match self {
            Finite { elements } => elements.iter().copied().take_while(|&x| x < bound).collect(),
            EventuallyPeriodic(p) => p.materialize(bound),
            Powers { base } => {
                let mut out = Vec::new();
                let mut v = *base;
                while v < bound {
                    out.push(v);
                    match v.checked_mul(*base) {
                        Some(next) => v = next,
                        None => break,
                    }
                }
                out
            }
            PolynomialFamily { base, exponent } => {
                let mut out = Vec::new();
                let mut level = 1u64;
                let mut head = *base;
                while head < bound {
                    for j in 0..=level {
                        let Some(v) = j.checked_pow(*exponent).and_then(|t| t.checked_add(head)) else {
                            break;
                        };
                        if v >= bound {
                            break;
                        }
                        out.push(v);
                    }
                    level += 1;
                    match head.checked_mul(*base) {
                        Some(next) => head = next,
                        None => break,
                    }
                }
                out.sort_unstable();
                out.dedup();
                out
            }
            Clumpy { base } => {
                let s = base.collect_below(bound)?;
                let mut out = Vec::new();
                'rows: for k in 1u64.. {
                    let t = k * (k + 1) / 2;
                    let Some(&anchor) = s.get((t - 1) as usize) else { break };
                    for j in 1..=k {
                        let v = anchor.checked_add(j).ok_or(SetError::Overflow("clumpy"))?;
                        if v >= bound {
                            break 'rows;
                        }
                        out.push(v);
                    }
                }
                out
            }
            SlowTset { growth } => {
                let mut out = Vec::new();
                for seg in slow_segments(growth, bound)? {
                    seg.push_below(bound, &mut out);
                }
                out
            }
            Appendix { blocks } => {
                let mut out = Vec::new();
                for b in blocks {
                    b.push_below(bound, &mut out);
                }
                out.sort_unstable();
                out.dedup();
                out
            }
            Table { elements, horizon } => {
                if bound > *horizon {
                    return Err(SetError::BeyondHorizon { horizon: *horizon, window: bound });
                }
                elements.iter().copied().take_while(|&x| x < bound).collect()
            }
            Primes => sieve_primes(bound),
            Triangular => {
                let mut out = Vec::new();
                for k in 1u64.. {
                    let Some(t) = k.checked_mul(k + 1).map(|x| x / 2) else { break };
                    if t >= bound {
                        break;
                    }
                    out.push(t);
                }
                out
            }
            Shift { base, by } => {
                let wide = bound.checked_add(*by).ok_or(SetError::Overflow("shift window"))?;
                base.collect_below(wide)?
                    .into_iter()
                    .filter(|&x| x >= *by)
                    .map(|x| x - by)
                    .collect()
            }
            Translate { base, by } => {
                if bound <= *by {
                    Vec::new()
                } else {
                    base.collect_below(bound - by)?.into_iter().map(|x| x + by).collect()
                }
            }
            Combine { mode, left, right } => {
                let a = left.collect_below(bound)?;
                let b = right.collect_below(bound)?;
                merge(&a, &b, *mode)
            }
        })
    }

    /// Exclusive upper bound on all elements when the set is known finite.
    pub fn upper_bound(&self) -> Option<u64> {
        use SetDescriptor::*;
        match self {
            Finite { elements } => Some(elements.last().map_or(0, |m| m + 1)),
            EventuallyPeriodic(p) if p.is_finite() => {
                Some(p.preperiod.last().map_or(0, |m| m + 1))
            }
            Appendix { blocks } => blocks
                .iter()
                .filter(|b| b.count > 0)
                .map(|b| b.last().map(|l| l.saturating_add(1)))
                .try_fold(0u64, |acc, x| x.map(|x| acc.max(x))),
            Clumpy { base } => base.upper_bound().map(|b| b.saturating_add(b)),
            Shift { base, by } => base.upper_bound().map(|b| b.saturating_sub(*by)),
            Translate { base, by } => base.upper_bound().map(|b| b.saturating_add(*by)),
            Combine { mode, left, right } => {
                let (l, r) = (left.upper_bound(), right.upper_bound());
                match mode {
                    CombineMode::Union => l.zip(r).map(|(a, b)| a.max(b)),
                    CombineMode::Intersect => match (l, r) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    },
                    CombineMode::Difference => l,
                }
            }
            _ => None,
        }
    }

    /// `true` when the set is certainly infinite.
    pub fn known_infinite(&self) -> bool {
        use SetDescriptor::*;
        match self {
            EventuallyPeriodic(p) => !p.is_finite(),
            Powers { .. } | PolynomialFamily { .. } | SlowTset { .. } | Primes | Triangular => true,
            Clumpy { base } | Shift { base, .. } | Translate { base, .. } => base.known_infinite(),
            Combine { mode: CombineMode::Union, left, right } => {
                left.known_infinite() || right.known_infinite()
            }
            Combine { .. } => self.as_periodic().is_some_and(|p| !p.is_finite()),
            Finite { .. } | Appendix { .. } | Table { .. } => false,
        }
    }

    /// Normal form when the set is eventually periodic (finite sets included).
    pub fn as_periodic(&self) -> Option<Periodic> {
        use SetDescriptor::*;
        match self {
            Finite { elements } => Some(Periodic::finite(elements)),
            EventuallyPeriodic(p) => Some(p.clone()),
            Appendix { .. } => {
                let bound = self.upper_bound()?;
                (bound <= 1 << 20)
                    .then(|| self.collect_below(bound).ok())
                    .flatten()
                    .map(|e| Periodic::finite(&e))
            }
            Shift { base, by } => base.as_periodic().map(|p| p.shift(*by)),
            Translate { base, by } => base.as_periodic().and_then(|p| p.translate(*by).ok()),
            Combine { mode, left, right } => {
                let (l, r) = (left.as_periodic()?, right.as_periodic()?);
                l.combine(&r, |a, b| mode.apply(a, b))
            }
            _ => None,
        }
    }

    /// Whether `contains` answers without generating a prefix of the set.
    pub fn fast_membership(&self) -> bool {
        use SetDescriptor::*;
        match self {
            Clumpy { .. } | SlowTset { .. } => false,
            Shift { base, .. } | Translate { base, .. } => base.fast_membership(),
            Combine { left, right, .. } => left.fast_membership() && right.fast_membership(),
            _ => true,
        }
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SetDescriptor::*;
        match self {
            Finite { elements } if elements.len() <= 8 => write!(f, "finite{elements:?}"),
            Finite { elements } => write!(f, "finite[{} elements]", elements.len()),
            EventuallyPeriodic(p) => write!(
                f,
                "periodic(pre={:?}, start={}, period={}, residues={:?})",
                p.preperiod, p.start, p.period, p.residues
            ),
            Powers { base } => write!(f, "powers({base})"),
            PolynomialFamily { base, exponent } => write!(f, "{{{base}^i + j^{exponent} : j <= i}}"),
            Clumpy { base } => write!(f, "clumpy({base})"),
            SlowTset { growth } => write!(f, "slow-tset({growth})"),
            Appendix { blocks } => write!(f, "appendix[{} blocks]", blocks.len()),
            Table { elements, horizon } => write!(f, "table[{} elements < {horizon}]", elements.len()),
            Primes => write!(f, "primes"),
            Triangular => write!(f, "triangular"),
            Shift { base, by } => write!(f, "({base}) - {by}"),
            Translate { base, by } => write!(f, "({base}) + {by}"),
            Combine { mode, left, right } => {
                let op = match mode {
                    CombineMode::Union => "∪",
                    CombineMode::Intersect => "∩",
                    CombineMode::Difference => "∖",
                };
                write!(f, "({left}) {op} ({right})")
            }
        }
    }
}

/// `S ∩ [0, bound)`.
pub fn materialize(set: &SetDescriptor, bound: u64) -> Result<WindowSet, SetError> {
    set.materialize(bound)
}

/// The `n`-th smallest element (1-based).
pub fn nth(set: &SetDescriptor, n: u64) -> Result<u64, SetError> {
    if n == 0 {
        return Err(SetError::Invalid("element index is 1-based".into()));
    }
    if let SetDescriptor::Finite { elements } | SetDescriptor::Table { elements, .. } = set {
        return match elements.get((n - 1) as usize) {
            Some(&x) => Ok(x),
            None => match set {
                SetDescriptor::Table { horizon, .. } => {
                    Err(SetError::BeyondHorizon { horizon: *horizon, window: horizon.saturating_add(1) })
                }
                _ => Err(SetError::Exhausted { requested: n, available: elements.len() as u64 }),
            },
        };
    }
    let bounded = set.upper_bound();
    let infinite = set.known_infinite();
    let mut bound = n.saturating_mul(2).max(64);
    if let Some(b) = bounded {
        bound = bound.min(b.max(1));
    }
    loop {
        let window = set.materialize(bound)?;
        if window.len() as u64 >= n {
            return Ok(window.elements()[(n - 1) as usize]);
        }
        if bounded.is_some_and(|b| b <= bound) {
            return Err(SetError::Exhausted { requested: n, available: window.len() as u64 });
        }
        if !infinite && bound >= NTH_SCAN_LIMIT {
            return Err(SetError::ScanLimit { requested: n, limit: NTH_SCAN_LIMIT });
        }
        if bound == u64::MAX {
            return Err(SetError::Overflow("nth"));
        }
        bound = bound.saturating_mul(2);
    }
}

/// `S - n = { t in Z+ : t + n in S }`.
pub fn shift(set: &SetDescriptor, n: u64) -> SetDescriptor {
    if n == 0 {
        return set.clone();
    }
    match set {
        SetDescriptor::Finite { elements } => {
            SetDescriptor::finite(elements.iter().filter(|&&x| x >= n).map(|&x| x - n))
        }
        SetDescriptor::EventuallyPeriodic(p) => SetDescriptor::EventuallyPeriodic(p.shift(n)),
        SetDescriptor::Shift { base, by } => match by.checked_add(n) {
            Some(total) => SetDescriptor::Shift { base: base.clone(), by: total },
            None => SetDescriptor::Shift { base: Box::new(set.clone()), by: n },
        },
        _ => SetDescriptor::Shift { base: Box::new(set.clone()), by: n },
    }
}

/// `S + k = { s + k : s in S }`.
pub fn translate(set: &SetDescriptor, k: u64) -> SetDescriptor {
    if k == 0 {
        return set.clone();
    }
    match set {
        SetDescriptor::Finite { elements } if elements.iter().all(|x| x.checked_add(k).is_some()) => {
            SetDescriptor::finite(elements.iter().map(|&x| x + k))
        }
        SetDescriptor::EventuallyPeriodic(p) => match p.translate(k) {
            Ok(t) => SetDescriptor::EventuallyPeriodic(t),
            Err(_) => SetDescriptor::Translate { base: Box::new(set.clone()), by: k },
        },
        _ => SetDescriptor::Translate { base: Box::new(set.clone()), by: k },
    }
}

/// Lazy boolean combination; eventually periodic operands are normalized.
pub fn combine(a: &SetDescriptor, b: &SetDescriptor, mode: CombineMode) -> SetDescriptor {
    if let (Some(pa), Some(pb)) = (a.as_periodic(), b.as_periodic()) {
        if let Some(p) = pa.combine(&pb, |x, y| mode.apply(x, y)) {
            return if p.is_finite() {
                SetDescriptor::Finite { elements: p.preperiod }
            } else {
                SetDescriptor::EventuallyPeriodic(p)
            };
        }
    }
    SetDescriptor::Combine { mode, left: Box::new(a.clone()), right: Box::new(b.clone()) }
}

fn merge(a: &[u64], b: &[u64], mode: CombineMode) -> Vec<u64> {
    let mut out = Vec::with_capacity(match mode {
        CombineMode::Union => a.len() + b.len(),
        _ => a.len(),
    });
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (x, in_a, in_b) = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                (x, true, true)
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                (x, true, false)
            }
            (Some(_), Some(&y)) => {
                j += 1;
                (y, false, true)
            }
            (Some(&x), None) => {
                i += 1;
                (x, true, false)
            }
            (None, Some(&y)) => {
                j += 1;
                (y, false, true)
            }
            (None, None) => unreachable!(),
        };
        if mode.apply(in_a, in_b) {
            out.push(x);
        }
    }
    out
}

fn is_power(n: u64, base: u64) -> bool {
    if n < base {
        return false;
    }
    let mut m = n;
    while m % base == 0 {
        m /= base;
    }
    m == 1
}

fn in_polynomial_family(n: u64, base: u64, exponent: u32) -> bool {
    let mut level = 1u64;
    let mut head = base;
    while head <= n {
        let rest = n - head;
        let root = rest.nth_root(exponent);
        if root <= level && root.checked_pow(exponent) == Some(rest) {
            return true;
        }
        level += 1;
        match head.checked_mul(base) {
            Some(next) => head = next,
            None => break,
        }
    }
    false
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn sieve_primes(bound: u64) -> Vec<u64> {
    if bound <= 2 {
        return Vec::new();
    }
    if bound > 1 << 32 {
        // segmenting is not worth it here; fall back to trial by Miller-Rabin
        return (2..bound).filter(|&n| is_prime(n)).collect();
    }
    let n = bound as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Segments `(first, step, count)` of the slow T-set below `bound`.
///
/// The recursion starts from the seed `a_0 = 0` (not an element) and adds 1
/// while `a < k_1`, then `N` while `k_N <= a < k_{N+1}`.
fn slow_segments(growth: &GrowthFunction, bound: u64) -> Result<Vec<ApBlock>, SetError> {
    let threshold = |level: u64| growth.threshold(level).map_err(|_| SetError::ThresholdsExhausted(level));
    let mut out = Vec::new();
    let mut a = 0u64;
    let k1 = threshold(1)?;
    let mut level = 0u64;
    loop {
        let (step, limit) = if a < k1 {
            (1, k1)
        } else {
            level = growth.level_at(a, level.max(1));
            (level, threshold(level + 1)?)
        };
        let Some(first) = a.checked_add(step) else { break };
        if first >= bound {
            break;
        }
        // steps taken while the current value stays below `limit`
        let steps = (limit - a).div_ceil(step);
        let room = (bound - 1 - first) / step + 1;
        let count = steps.min(room);
        out.push(ApBlock { start: first, step, count });
        if count < steps {
            break;
        }
        a = first + (count - 1) * step;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn window(set: &SetDescriptor, bound: u64) -> Vec<u64> {
        set.materialize(bound).unwrap().into_elements()
    }

    #[test]
    fn materialize_small_examples() {
        assert_eq!(window(&SetDescriptor::powers(2).unwrap(), 10), vec![2, 4, 8]);
        assert_eq!(window(&SetDescriptor::evens(), 7), vec![0, 2, 4, 6]);
        assert_eq!(window(&SetDescriptor::odds(), 0), Vec::<u64>::new());
    }

    #[test]
    fn zero_density_example_matches_enumeration() {
        // oracle: every pair (i, j) with i >= 1, j <= i, deduplicated
        let mut oracle = std::collections::BTreeSet::new();
        for i in 1..10u32 {
            for j in 0..=i as u64 {
                let v = 2u64.pow(i) + j * j;
                if v < 20 {
                    oracle.insert(v);
                }
            }
        }
        let got = window(&SetDescriptor::zero_density_example(), 20);
        assert_eq!(got, oracle.into_iter().collect::<Vec<_>>());
        assert_eq!(got, vec![2, 3, 4, 5, 8, 9, 12, 16, 17]);
    }

    #[test]
    fn nth_examples() {
        assert_eq!(nth(&SetDescriptor::powers(2).unwrap(), 3).unwrap(), 8);
        assert_eq!(nth(&SetDescriptor::evens(), 1).unwrap(), 0);
        let clumpy = SetDescriptor::Clumpy { base: Box::new(SetDescriptor::naturals()) };
        assert_eq!(nth(&clumpy, 4).unwrap(), 7);
    }

    #[test]
    fn nth_errors() {
        let f = SetDescriptor::finite([3, 5]);
        assert_eq!(nth(&f, 3), Err(SetError::Exhausted { requested: 3, available: 2 }));
        assert!(nth(&f, 0).is_err());
        assert_eq!(nth(&SetDescriptor::powers(2).unwrap(), 64), Err(SetError::Overflow("nth")));
        let empty_tail = SetDescriptor::Combine {
            mode: CombineMode::Intersect,
            left: Box::new(SetDescriptor::powers(2).unwrap()),
            right: Box::new(SetDescriptor::powers(3).unwrap()),
        };
        assert!(matches!(nth(&empty_tail, 1), Err(SetError::ScanLimit { .. })));
    }

    #[test]
    fn shift_examples() {
        let s = SetDescriptor::finite([2, 4, 8, 16]);
        assert_eq!(window(&shift(&s, 3), 16), vec![1, 5, 13]);
        assert_eq!(shift(&s, 0), s);
        assert_eq!(window(&shift(&SetDescriptor::evens(), 2), 50), window(&SetDescriptor::evens(), 50));
    }

    #[test]
    fn combine_examples() {
        let all = combine(&SetDescriptor::evens(), &SetDescriptor::odds(), CombineMode::Union);
        assert_eq!(window(&all, 40), (0..40).collect::<Vec<_>>());
        let p2 = SetDescriptor::powers(2).unwrap();
        let both = combine(&p2, &SetDescriptor::evens(), CombineMode::Intersect);
        assert_eq!(window(&both, 100), vec![2, 4, 8, 16, 32, 64]);
        let odd = combine(&SetDescriptor::nonnegative(), &SetDescriptor::evens(), CombineMode::Difference);
        assert_eq!(window(&odd, 30), window(&SetDescriptor::odds(), 30));
        assert!(matches!(odd, SetDescriptor::EventuallyPeriodic(_)));
    }

    #[test]
    fn catalog_kinds_membership_agrees_with_windows() {
        let sets = [
            SetDescriptor::Primes,
            SetDescriptor::Triangular,
            SetDescriptor::zero_density_example(),
            SetDescriptor::powers(3).unwrap(),
            SetDescriptor::SlowTset { growth: GrowthFunction::NCeilSqrt },
            SetDescriptor::Appendix {
                blocks: vec![ApBlock { start: 1, step: 1, count: 3 }, ApBlock { start: 7, step: 2, count: 4 }],
            },
        ];
        for s in &sets {
            let w = s.materialize(400).unwrap();
            for n in 0..400 {
                assert_eq!(s.contains(n).unwrap(), w.contains(n), "{s} at {n}");
            }
        }
        assert_eq!(window(&SetDescriptor::Primes, 30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(window(&SetDescriptor::Triangular, 22), vec![1, 3, 6, 10, 15, 21]);
        assert!(is_prime(18446744073709551557));
    }

    #[test]
    fn slow_tset_prefix() {
        let s = SetDescriptor::SlowTset { growth: GrowthFunction::NCeilSqrt };
        assert_eq!(window(&s, 34), vec![1, 2, 3, 4, 6, 8, 10, 13, 16, 20, 24, 28, 33]);
    }

    #[test]
    fn table_refuses_to_extrapolate() {
        let t = SetDescriptor::Table { elements: vec![1, 5], horizon: 10 };
        assert_eq!(window(&t, 10), vec![1, 5]);
        assert!(matches!(t.materialize(11), Err(SetError::BeyondHorizon { .. })));
        assert!(t.contains(12).is_err());
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d = combine(
            &SetDescriptor::Clumpy { base: Box::new(SetDescriptor::naturals()) },
            &SetDescriptor::powers(2).unwrap(),
            CombineMode::Union,
        );
        let text = serde_json::to_string(&d).unwrap();
        let back: SetDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let evens: SetDescriptor = serde_json::from_str(
            r#"{"kind":"eventually-periodic","preperiod":[],"start":0,"period":2,"residues":[0]}"#,
        )
        .unwrap();
        assert_eq!(evens, SetDescriptor::evens());
    }

    fn arb_periodic() -> impl Strategy<Value = SetDescriptor> {
        (1u64..9, 0u64..12, any::<u16>(), any::<u16>()).prop_map(|(period, start, pre, res)| {
            let preperiod = (0..start).filter(|t| pre >> (t % 16) & 1 == 1);
            let residues = (0..period).filter(|r| res >> r & 1 == 1);
            SetDescriptor::periodic(preperiod, start, period, residues).unwrap()
        })
    }

    fn arb_set() -> impl Strategy<Value = SetDescriptor> {
        prop_oneof![
            arb_periodic(),
            (2u64..5).prop_map(|b| SetDescriptor::powers(b).unwrap()),
            Just(SetDescriptor::zero_density_example()),
            Just(SetDescriptor::Primes),
            Just(SetDescriptor::Clumpy { base: Box::new(SetDescriptor::naturals()) }),
            proptest::collection::vec(0u64..300, 0..20).prop_map(SetDescriptor::finite),
        ]
    }

    proptest! {
        #[test]
        fn shift_matches_brute_force(s in arb_set(), n in 0u64..200, bound in 0u64..300) {
            let got = window(&shift(&s, n), bound);
            let want: Vec<u64> = (0..bound).filter(|&t| s.contains(t + n).unwrap()).collect();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn shifts_compose(s in arb_set(), a in 0u64..1 << 8, b in 0u64..1 << 8, bound in 0u64..1 << 9) {
            let twice = shift(&shift(&s, a), b);
            prop_assert_eq!(window(&twice, bound), window(&shift(&s, a + b), bound));
        }

        #[test]
        fn nth_inverts_materialize(s in arb_set(), bound in 1u64..400) {
            let w = window(&s, bound);
            for (i, &x) in w.iter().enumerate() {
                prop_assert_eq!(nth(&s, i as u64 + 1).unwrap(), x);
            }
        }

        #[test]
        fn combine_is_pointwise(a in arb_set(), b in arb_set(), bound in 0u64..300) {
            for mode in [CombineMode::Union, CombineMode::Intersect, CombineMode::Difference] {
                let c = combine(&a, &b, mode);
                let want: Vec<u64> = (0..bound)
                    .filter(|&t| mode.apply(a.contains(t).unwrap(), b.contains(t).unwrap()))
                    .collect();
                prop_assert_eq!(window(&c, bound), want);
            }
        }
    }
}
