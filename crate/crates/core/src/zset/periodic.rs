use num::integer::lcm;
use serde::{Deserialize, Serialize};

use super::SetError;

/// Largest period or preperiod length produced when normalizing combinations.
const NORMALIZE_LIMIT: u64 = 1 << 20;

/// Eventually periodic set in normal form.
///
/// Below `start` the set is exactly `preperiod`; from `start` on, `n` belongs
/// to the set iff `n % period` is one of `residues`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Periodic {
    pub preperiod: Vec<u64>,
    pub start: u64,
    pub period: u64,
    pub residues: Vec<u64>,
}

impl Periodic {
    /// Builds and canonicalizes (sorts, dedups) a periodic description.
    pub fn new(
        preperiod: impl IntoIterator<Item = u64>,
        start: u64,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<Self, SetError> {
        let mut preperiod: Vec<u64> = preperiod.into_iter().collect();
        preperiod.sort_unstable();
        preperiod.dedup();
        let mut residues: Vec<u64> = residues.into_iter().collect();
        residues.sort_unstable();
        residues.dedup();
        let p = Periodic { preperiod, start, period, residues };
        p.validate()?;
        Ok(p)
    }

    pub fn finite(elements: &[u64]) -> Self {
        let mut preperiod = elements.to_vec();
        preperiod.sort_unstable();
        preperiod.dedup();
        let start = preperiod.last().map_or(0, |m| m + 1);
        Periodic { preperiod, start, period: 1, residues: Vec::new() }
    }

    pub fn validate(&self) -> Result<(), SetError> {
        if self.period == 0 {
            return Err(SetError::Invalid("period must be at least 1".into()));
        }
        if !self.preperiod.windows(2).all(|w| w[0] < w[1]) {
            return Err(SetError::Invalid("preperiod must be strictly increasing".into()));
        }
        if self.preperiod.last().is_some_and(|&m| m >= self.start) {
            return Err(SetError::Invalid("preperiod elements must lie below start".into()));
        }
        if !self.residues.windows(2).all(|w| w[0] < w[1]) {
            return Err(SetError::Invalid("residues must be strictly increasing".into()));
        }
        if self.residues.last().is_some_and(|&r| r >= self.period) {
            return Err(SetError::Invalid("residues must be smaller than the period".into()));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.start {
            self.preperiod.binary_search(&n).is_ok()
        } else {
            self.residues.binary_search(&(n % self.period)).is_ok()
        }
    }

    /// Smallest element of the periodic tail, if the tail is non-empty.
    pub fn first_tail_element(&self) -> Option<u64> {
        let q0 = self.start / self.period;
        for q in q0..q0 + 2 {
            let base = q.checked_mul(self.period)?;
            for &r in &self.residues {
                let v = base.checked_add(r)?;
                if v >= self.start {
                    return Some(v);
                }
            }
        }
        None
    }

    pub fn materialize(&self, bound: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self.preperiod.iter().copied().filter(|&x| x < bound).collect();
        if self.residues.is_empty() || self.start >= bound {
            return out;
        }
        let mut q = self.start / self.period;
        loop {
            let Some(base) = q.checked_mul(self.period) else { break };
            if base >= bound {
                break;
            }
            for &r in &self.residues {
                match base.checked_add(r) {
                    Some(v) if v >= self.start && v < bound => out.push(v),
                    _ => {}
                }
            }
            q += 1;
        }
        out
    }

    /// `S - n = { t : t + n in S }`.
    pub fn shift(&self, n: u64) -> Self {
        let start = self.start.saturating_sub(n);
        let preperiod = self
            .preperiod
            .iter()
            .filter(|&&x| x >= n)
            .map(|&x| x - n)
            .collect();
        let p = self.period;
        let mut residues: Vec<u64> = self.residues.iter().map(|&r| (r + p - n % p) % p).collect();
        residues.sort_unstable();
        Periodic { preperiod, start, period: p, residues }
    }

    /// `S + k = { s + k : s in S }`.
    pub fn translate(&self, k: u64) -> Result<Self, SetError> {
        let overflow = || SetError::Overflow("translate");
        let start = self.start.checked_add(k).ok_or_else(overflow)?;
        let preperiod = self
            .preperiod
            .iter()
            .map(|&x| x.checked_add(k).ok_or_else(overflow))
            .collect::<Result<_, _>>()?;
        let p = self.period;
        let mut residues: Vec<u64> = self.residues.iter().map(|&r| (r + k % p) % p).collect();
        residues.sort_unstable();
        Ok(Periodic { preperiod, start, period: p, residues })
    }

    /// Pointwise boolean combination, when the result stays small enough to
    /// tabulate.
    pub fn combine(&self, other: &Periodic, op: impl Fn(bool, bool) -> bool) -> Option<Periodic> {
        let period = lcm(self.period, other.period);
        let start = self.start.max(other.start);
        if period > NORMALIZE_LIMIT || start > NORMALIZE_LIMIT {
            return None;
        }
        let preperiod = (0..start)
            .filter(|&t| op(self.contains(t), other.contains(t)))
            .collect();
        let residues = (start..start + period)
            .filter(|&t| op(self.contains(t), other.contains(t)))
            .map(|t| t % period)
            .collect::<Vec<_>>();
        let mut residues = residues;
        residues.sort_unstable();
        Some(Periodic { preperiod, start, period, residues })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> Periodic {
        Periodic::new([], 0, 2, [0]).unwrap()
    }

    #[test]
    fn rejects_malformed_forms() {
        assert!(Periodic::new([], 0, 0, []).is_err());
        assert!(Periodic::new([5], 3, 2, [0]).is_err());
        assert!(Periodic::new([], 0, 3, [3]).is_err());
    }

    #[test]
    fn shift_and_translate_match_membership() {
        let p = Periodic::new([1, 4], 6, 5, [0, 3]).unwrap();
        for n in 0..7 {
            let s = p.shift(n);
            for t in 0..80 {
                assert_eq!(s.contains(t), p.contains(t + n), "shift {n} at {t}");
            }
            let tr = p.translate(n).unwrap();
            for t in 0..80 {
                let expect = t >= n && p.contains(t - n);
                assert_eq!(tr.contains(t), expect, "translate {n} at {t}");
            }
        }
    }

    #[test]
    fn combine_evens_and_odds() {
        let odds = Periodic::new([], 0, 2, [1]).unwrap();
        let both = evens().combine(&odds, |a, b| a && b).unwrap();
        assert!(both.is_finite());
        assert!(both.materialize(100).is_empty());
        let all = evens().combine(&odds, |a, b| a || b).unwrap();
        assert_eq!(all.materialize(5), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn first_tail_element_respects_start() {
        let p = Periodic::new([1], 2, 3, [0]).unwrap();
        assert_eq!(p.first_tail_element(), Some(3));
        assert_eq!(p.materialize(10), vec![1, 3, 6, 9]);
    }
}
