//! Numerics for `D_psi(delta_j)(delta_k) = j/(j+k) * psi_{j+k}`: coefficient
//! fields, truncated columns and their `l1` norms, certified sup norms of
//! `D_psi x` for finitely supported `x`, weak compactness diagnostics, and
//! `p`-summing lower-bound certificates.
//!
//! Arithmetic is exact (rational) wherever the answer is rational; scans over
//! long windows run in `f64` and the maximizing positions are then recomputed
//! exactly.

mod diagnostic;
mod psum;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::DensityError;
use crate::rational::{self, Rational};
use crate::tfcheck::TfError;
use crate::zset::{self, CombineMode, SetDescriptor, SetError};

pub use diagnostic::{
    kernel_check, wc_diagnostic, KernelDescriptor, KernelForm, KernelReport, OrinocoValue, RowDecay, WcEntry,
    WcReport, WcVerdict,
};
pub use psum::{
    certificate_horizon, mutate_tail, pi_lower, sampled_weak_psum, search_certificate, weak_psum, Certificate,
    SearchConfig, SearchOutcome, WeakPsum, WEAK_PSUM_LIMIT,
};

/// Relative tolerance for floating-point comparisons.
pub const TOLERANCE: f64 = 1e-9;
/// Largest column index scanned when certifying a sup norm.
pub const SCAN_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("coefficients are only known below {available}, index {needed} requested")]
    WindowTooSmall { needed: u64, available: u64 },
    #[error("tail bound cannot be certified: {0}")]
    TailNotCertified(String),
    #[error("column norm diverges: {0}")]
    Divergent(String),
    #[error("sup norm not certified below column {limit}")]
    SupNotCertified { limit: u64 },
    #[error("combined support of {size} coordinates exceeds the exact enumeration limit {limit}")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("family has zero weak p-sum")]
    DegenerateFamily,
    #[error(transparent)]
    Tf(#[from] TfError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    pub set: SetDescriptor,
}

/// `psi` in `l-infinity(N)`. Index 0 is never used (`psi_0 = 0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum CoefficientField {
    /// `psi = sum of value * indicator(set)`, restricted to `N`.
    Levels { levels: Vec<Level> },
    /// `psi_n = scale / n^exponent`.
    PowerDecay {
        #[serde(with = "rational::serde_str")]
        scale: Rational,
        exponent: u32,
    },
    /// `psi_n = values[n - 1]`; beyond the table `psi` is zero when
    /// `tail_zero`, otherwise unknown.
    Window {
        #[serde(with = "rational::serde_vec_str")]
        values: Vec<Rational>,
        tail_zero: bool,
    },
}

impl CoefficientField {
    pub fn indicator(set: SetDescriptor) -> Self {
        CoefficientField::Levels { levels: vec![Level { value: Rational::one(), set }] }
    }

    pub fn constant(value: Rational) -> Self {
        CoefficientField::Levels { levels: vec![Level { value, set: SetDescriptor::naturals() }] }
    }

    /// `psi_n = 1/n`.
    pub fn harmonic() -> Self {
        CoefficientField::PowerDecay { scale: Rational::one(), exponent: 1 }
    }

    /// Upper bound on `sup |psi_n|`.
    pub fn sup_bound(&self) -> Rational {
        match self {
            CoefficientField::Levels { levels } => levels.iter().map(|l| l.value.abs()).sum(),
            CoefficientField::PowerDecay { scale, .. } => scale.abs(),
            CoefficientField::Window { values, .. } => values.iter().map(|v| v.abs()).max().unwrap_or_default(),
        }
    }

    /// Exclusive bound beyond which `psi` vanishes, when known.
    pub fn support_bound(&self) -> Option<u64> {
        match self {
            CoefficientField::Levels { levels } => {
                levels.iter().try_fold(0u64, |acc, l| Some(acc.max(l.set.upper_bound()?)))
            }
            CoefficientField::PowerDecay { scale, .. } => scale.is_zero().then_some(0),
            CoefficientField::Window { values, tail_zero: true } => Some(values.len() as u64 + 1),
            CoefficientField::Window { tail_zero: false, .. } => None,
        }
    }

    /// Exclusive bound on the indices where `psi` is known.
    pub fn known_below(&self) -> Option<u64> {
        match self {
            CoefficientField::Window { values, tail_zero: false } => Some(values.len() as u64 + 1),
            _ => None,
        }
    }

    fn check_known(&self, bound: u64) -> Result<(), OpError> {
        match self.known_below() {
            Some(k) if bound > k => Err(OpError::WindowTooSmall { needed: bound - 1, available: k }),
            _ => Ok(()),
        }
    }

    pub fn validate(&self) -> Result<(), OpError> {
        match self {
            CoefficientField::Levels { levels } => levels.iter().try_for_each(|l| Ok(l.set.validate()?)),
            CoefficientField::PowerDecay { exponent, .. } if *exponent == 0 => {
                Err(OpError::InvalidParameter("decay exponent must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Exact `psi_n`.
    pub fn value(&self, n: u64) -> Result<Rational, OpError> {
        if n == 0 {
            return Ok(Rational::zero());
        }
        self.check_known(n + 1)?;
        Ok(match self {
            CoefficientField::Levels { levels } => {
                let mut v = Rational::zero();
                for l in levels {
                    if l.set.contains(n)? {
                        v += &l.value;
                    }
                }
                v
            }
            CoefficientField::PowerDecay { scale, exponent } => {
                scale / Rational::from_integer(BigInt::from(n).pow(*exponent))
            }
            CoefficientField::Window { values, .. } => values.get(n as usize - 1).cloned().unwrap_or_default(),
        })
    }

    /// Exact `psi_n` for `lo <= n < hi`.
    pub fn values(&self, lo: u64, hi: u64) -> Result<Vec<Rational>, OpError> {
        self.check_known(hi)?;
        match self {
            CoefficientField::Levels { levels } => {
                let mut out = vec![Rational::zero(); hi.saturating_sub(lo) as usize];
                for l in levels {
                    for &s in l.set.materialize(hi)?.from_index_at_least(lo.max(1)) {
                        out[(s - lo) as usize] += &l.value;
                    }
                }
                Ok(out)
            }
            _ => (lo..hi).map(|n| self.value(n)).collect(),
        }
    }

    /// `psi_0, ..., psi_{hi-1}` in floating point.
    pub fn table_f64(&self, hi: u64) -> Result<Vec<f64>, OpError> {
        self.check_known(hi)?;
        let mut out = vec![0.0; hi as usize];
        match self {
            CoefficientField::Levels { levels } => {
                for l in levels {
                    let v = rational::to_f64(&l.value);
                    for &s in l.set.materialize(hi)?.from_index_at_least(1) {
                        out[s as usize] += v;
                    }
                }
            }
            CoefficientField::PowerDecay { scale, exponent } => {
                let c = rational::to_f64(scale);
                for (n, slot) in out.iter_mut().enumerate().skip(1) {
                    *slot = c / (n as f64).powi(*exponent as i32);
                }
            }
            CoefficientField::Window { values, .. } => {
                for (slot, v) in out.iter_mut().skip(1).zip(values) {
                    *slot = rational::to_f64(v);
                }
            }
        }
        Ok(out)
    }

    /// `S_eps = { n >= 1 : |psi_n| > eps }`.
    pub fn level_set(&self, eps: &Rational) -> Result<SetDescriptor, OpError> {
        Ok(match self {
            CoefficientField::Levels { levels } => {
                if levels.len() > 12 {
                    return Err(OpError::InvalidParameter("at most 12 levels are supported".into()));
                }
                // union over the membership patterns whose level sum exceeds eps
                let mut out = SetDescriptor::empty();
                for mask in 1u32..1 << levels.len() {
                    let sum: Rational =
                        levels.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| l.value.clone()).sum();
                    if sum.abs() <= *eps {
                        continue;
                    }
                    let mut cell = SetDescriptor::naturals();
                    for (i, l) in levels.iter().enumerate() {
                        let mode = if mask >> i & 1 == 1 { CombineMode::Intersect } else { CombineMode::Difference };
                        cell = zset::combine(&cell, &l.set, mode);
                    }
                    out = zset::combine(&out, &cell, CombineMode::Union);
                }
                out
            }
            CoefficientField::PowerDecay { scale, exponent } => {
                if !eps.is_positive() {
                    return Err(OpError::InvalidParameter("epsilon must be positive".into()));
                }
                // |scale| / n^e > eps  <=>  n^e < |scale| / eps
                let limit = scale.abs() / eps;
                let mut n = 1u64;
                while Rational::from_integer(BigInt::from(n).pow(*exponent)) < limit {
                    n += 1;
                }
                SetDescriptor::finite(1..n)
            }
            CoefficientField::Window { values, tail_zero } => {
                let elements: Vec<u64> =
                    values.iter().enumerate().filter(|(_, v)| v.abs() > *eps).map(|(i, _)| i as u64 + 1).collect();
                if *tail_zero {
                    SetDescriptor::finite(elements)
                } else {
                    SetDescriptor::Table { elements, horizon: values.len() as u64 + 1 }
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub index: u64,
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
}

/// Finitely supported vector `sum alpha_i delta_i` of `l1(Z+)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Term>", into = "Vec<Term>")]
pub struct C00Vector {
    terms: Vec<Term>,
}

impl From<Vec<Term>> for C00Vector {
    fn from(terms: Vec<Term>) -> Self {
        C00Vector::new(terms.into_iter().map(|t| (t.index, t.coeff)))
    }
}

impl From<C00Vector> for Vec<Term> {
    fn from(v: C00Vector) -> Self {
        v.terms
    }
}

impl C00Vector {
    /// Sums repeated indices and drops zero coefficients.
    pub fn new(pairs: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut pairs: Vec<(u64, Rational)> = pairs.into_iter().collect();
        pairs.sort_by_key(|p| p.0);
        let mut terms: Vec<Term> = Vec::with_capacity(pairs.len());
        for (index, coeff) in pairs {
            match terms.last_mut() {
                Some(t) if t.index == index => t.coeff += coeff,
                _ => terms.push(Term { index, coeff }),
            }
        }
        terms.retain(|t| !t.coeff.is_zero());
        C00Vector { terms }
    }

    pub fn from_ints(pairs: &[(u64, i64)]) -> Self {
        C00Vector::new(pairs.iter().map(|&(i, c)| (i, Rational::from_integer(c.into()))))
    }

    pub fn delta(index: u64) -> Self {
        C00Vector { terms: vec![Term { index, coeff: Rational::one() }] }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `l`: the largest support index (0 for the zero vector).
    pub fn support_bound(&self) -> u64 {
        self.terms.last().map_or(0, |t| t.index)
    }

    /// `sum |alpha_i| * i`, the constant in the column tail bound.
    pub fn tail_weight(&self) -> Rational {
        self.terms.iter().map(|t| t.coeff.abs() * rational::from_u64(t.index)).sum()
    }

    /// Exact `D_psi(x)(delta_k)`.
    pub fn apply_at(&self, psi: &CoefficientField, k: u64) -> Result<Rational, OpError> {
        let mut acc = Rational::zero();
        for t in &self.terms {
            if t.index == 0 {
                continue;
            }
            let n = t.index + k;
            let v = psi.value(n)?;
            if !v.is_zero() {
                acc += &t.coeff * rational::ratio_u64(t.index, n) * v;
            }
        }
        Ok(acc)
    }
}

/// `D_psi(delta_j)(delta_k)` for `k < W`.
pub fn column(psi: &CoefficientField, j: u64, window: u64) -> Result<Vec<Rational>, OpError> {
    if j == 0 {
        return Ok(vec![Rational::zero(); window as usize]);
    }
    let psi_vals = psi.values(j, j + window)?;
    Ok(psi_vals
        .into_iter()
        .enumerate()
        .map(|(k, v)| if v.is_zero() { v } else { rational::ratio_u64(j, j + k as u64) * v })
        .collect())
}

/// Bounds on `sum_{k >= 0, j + k in S} j/(j+k)`, the `l1` norm of column `j`
/// of `D_S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnNorm {
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
    #[serde(with = "rational::serde_str")]
    pub upper: Rational,
    pub exact: bool,
}

impl ColumnNorm {
    fn exact(v: Rational) -> Self {
        ColumnNorm { lower: v.clone(), upper: v, exact: true }
    }

    pub fn value(&self) -> Option<&Rational> {
        self.exact.then_some(&self.lower)
    }
}

/// Least `n >= 1` with `base^n >= j`, and `base^n`.
fn covering_power(base: u64, j: u64) -> (u32, BigInt) {
    let (b, target) = (BigInt::from(base), BigInt::from(j));
    let mut n = 1u32;
    let mut pw = b.clone();
    while pw < target {
        pw *= &b;
        n += 1;
    }
    (n, pw)
}

/// `l1` norm of column `j` of `D_S` (the indicator derivation of `S`).
///
/// Exact for finite sets, powers (`j / ((b-1) b^{N-1})` with `b^N` the first
/// power reaching `j`) and triangular numbers (`2j / K` with `t_K` the first
/// triangular number reaching `j`). The polynomial family gets a partial sum
/// with a rigorous geometric tail bound; infinite eventually periodic sets
/// diverge; anything else cannot be certified.
pub fn column_l1(set: &SetDescriptor, j: u64) -> Result<ColumnNorm, OpError> {
    if j == 0 {
        return Ok(ColumnNorm::exact(Rational::zero()));
    }
    if let Some(bound) = set.upper_bound() {
        let sum = set.materialize(bound)?.from_index_at_least(j).iter().map(|&s| rational::ratio_u64(j, s)).sum();
        return Ok(ColumnNorm::exact(sum));
    }
    match set {
        SetDescriptor::Powers { base } => {
            let (_, pw) = covering_power(*base, j);
            // j * sum_{n >= N} b^{-n} = j b / ((b - 1) b^N)
            let v = Rational::new(BigInt::from(j) * base, BigInt::from(base - 1) * pw);
            Ok(ColumnNorm::exact(v))
        }
        SetDescriptor::Triangular => {
            let mut k = 1u64;
            while k * (k + 1) / 2 < j {
                k += 1;
            }
            Ok(ColumnNorm::exact(rational::ratio_u64(2 * j, k)))
        }
        SetDescriptor::PolynomialFamily { base, .. } => {
            let (n0, _) = covering_power(*base, j);
            let levels = n0 + 24;
            let limit = BigInt::from(*base).pow(levels).to_u64().filter(|&l| l <= 1 << 40).ok_or_else(|| {
                OpError::TailNotCertified(format!("column {j} needs a window beyond 2^40"))
            })?;
            let partial: Rational =
                set.materialize(limit)?.from_index_at_least(j).iter().map(|&s| rational::ratio_u64(j, s)).sum();
            // elements >= L = b^I: level i >= I contributes at most (i + 1) terms below j / b^i,
            // and the I(I + 1)/2 elements of lower levels contribute at most j / L each
            let x = rational::ratio_u64(1, *base);
            let one = Rational::one();
            let big_i = rational::from_u64(levels as u64);
            let high = rational::pow(&x, levels) * ((&big_i + &one) * (&one - &x) + &x)
                / rational::pow(&(&one - &x), 2);
            let low = rational::from_u64(levels as u64 * (levels as u64 + 1) / 2) / rational::from_u64(limit);
            let tail = rational::from_u64(j) * (high + low);
            Ok(ColumnNorm { upper: &partial + tail, lower: partial, exact: false })
        }
        _ => match set.as_periodic() {
            Some(p) if !p.is_finite() => {
                Err(OpError::Divergent(format!("{set} contains an infinite progression")))
            }
            _ => Err(OpError::TailNotCertified(format!("no tail bound is available for {set}"))),
        },
    }
}

/// `D_psi x` on a window, with its sup over all `k` certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Applied {
    /// `D_psi(x)(delta_k)` for `k < W`.
    pub values: Vec<f64>,
    /// `sup_k |D_psi(x)(delta_k)|`, exact.
    #[serde(with = "rational::serde_str")]
    pub sup: Rational,
    /// Least maximizing `k`.
    pub position: u64,
    /// The scan covered `k < certified_through`; beyond it the tail bound
    /// `C / k` is at most the sup.
    pub certified_through: u64,
}

/// Floating-point table of `psi` that grows on demand.
pub(crate) struct PsiTable<'a> {
    psi: &'a CoefficientField,
    table: Vec<f64>,
}

impl<'a> PsiTable<'a> {
    pub(crate) fn new(psi: &'a CoefficientField) -> Self {
        PsiTable { psi, table: Vec::new() }
    }

    fn ensure(&mut self, hi: u64) -> Result<(), OpError> {
        if (self.table.len() as u64) < hi {
            let target = hi.max(2 * self.table.len() as u64).max(1024);
            let target = match self.psi.known_below() {
                Some(k) if k >= hi => target.min(k),
                _ => target,
            };
            self.table = self.psi.table_f64(target)?;
        }
        Ok(())
    }

    fn eval(&self, x: &[(u64, f64)], k: u64) -> f64 {
        x.iter()
            .filter(|t| t.0 > 0)
            .map(|&(i, a)| a * (i as f64 / (i + k) as f64) * self.table[(i + k) as usize])
            .sum()
    }

    /// Certified sup and a window of values.
    pub(crate) fn apply(&mut self, x: &C00Vector, window: u64) -> Result<Applied, OpError> {
        let fx: Vec<(u64, f64)> = x.terms().iter().map(|t| (t.index, rational::to_f64(&t.coeff))).collect();
        let l = x.support_bound();
        let c = rational::to_f64(&(x.tail_weight() * self.psi.sup_bound()));
        let mut best = 0.0f64;
        let mut scanned: Vec<f64> = Vec::new();
        let scan_end = match self.psi.support_bound() {
            Some(s) => Some(s.saturating_sub(1).max(1)),
            None => None,
        };
        let mut k = 0u64;
        loop {
            let done = match scan_end {
                Some(end) => k >= end,
                None => k > 0 && c / k as f64 <= best * (1.0 - TOLERANCE),
            };
            if done || c == 0.0 {
                break;
            }
            if k >= SCAN_LIMIT {
                return Err(OpError::SupNotCertified { limit: SCAN_LIMIT });
            }
            self.ensure(l + k + 1)?;
            let v = self.eval(&fx, k);
            best = best.max(v.abs());
            scanned.push(v);
            k += 1;
        }
        let certified_through = k;
        // exact recomputation at every near-maximal position
        let (mut sup, mut position) = (Rational::zero(), 0u64);
        if best > 0.0 {
            for (pos, v) in scanned.iter().enumerate() {
                if v.abs() >= best * (1.0 - TOLERANCE) {
                    let exact = x.apply_at(self.psi, pos as u64)?.abs();
                    if exact > sup {
                        sup = exact;
                        position = pos as u64;
                    }
                }
            }
        }
        let mut values = scanned;
        values.truncate(window as usize);
        if (values.len() as u64) < window {
            self.ensure(l + window)?;
            for k in values.len() as u64..window {
                values.push(self.eval(&fx, k));
            }
        }
        Ok(Applied { values, sup, position, certified_through })
    }
}

/// `D_psi x` for `k < W`, plus the certified sup over all `k`.
///
/// For `k >= K` every term obeys `|alpha_i| i/(i+k) |psi| <= |alpha_i| i |psi|/k`,
/// so scanning stops once `C / K` (with `C = ||psi|| sum |alpha_i| i`) drops
/// below the running maximum. The maximum itself is recomputed exactly.
pub fn apply(psi: &CoefficientField, x: &C00Vector, window: u64) -> Result<Applied, OpError> {
    PsiTable::new(psi).apply(x, window)
}
