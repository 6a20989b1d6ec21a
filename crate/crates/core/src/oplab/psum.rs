//! Weak `p`-sums over the dual unit ball of `l1` and lower-bound certificates
//! for the `p`-summing norm of `D_psi`.

use std::collections::BTreeSet;

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{C00Vector, CoefficientField, OpError, PsiTable, TOLERANCE};
use crate::rational::{self, Rational};

/// Largest combined support enumerated exactly.
pub const WEAK_PSUM_LIMIT: usize = 24;

fn check_p(p: f64) -> Result<(), OpError> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(OpError::InvalidParameter(format!("p = {p} must be a finite number >= 1")));
    }
    Ok(())
}

fn integer_p(p: f64) -> Option<u32> {
    (p.fract() == 0.0 && p <= 64.0).then_some(p as u32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakPsum {
    /// `sup_{||phi|| <= 1} sum_j |phi(x_j)|^p`.
    pub value: f64,
    /// Exact value, available for integer `p`.
    #[serde(with = "rational::serde_opt_str")]
    pub exact: Option<Rational>,
    /// Combined support, increasing.
    pub support: Vec<u64>,
    /// A maximizing sign vector on `support`.
    pub signs: Vec<i8>,
}

/// Coefficient matrix `coeffs[j][s]` of each vector on the combined support.
fn dense(family: &[C00Vector]) -> (Vec<u64>, Vec<Vec<f64>>, Vec<Vec<Rational>>) {
    let support: Vec<u64> =
        family.iter().flat_map(|x| x.terms().iter().map(|t| t.index)).collect::<BTreeSet<_>>().into_iter().collect();
    let mut fl = vec![vec![0.0; support.len()]; family.len()];
    let mut ex = vec![vec![Rational::zero(); support.len()]; family.len()];
    for (j, x) in family.iter().enumerate() {
        for t in x.terms() {
            let s = support.binary_search(&t.index).expect("index in support");
            fl[j][s] = rational::to_f64(&t.coeff);
            ex[j][s] = t.coeff.clone();
        }
    }
    (support, fl, ex)
}

fn objective(values: &[f64], p: f64) -> f64 {
    values.iter().map(|v| v.abs().powf(p)).sum()
}

fn exact_objective(ex: &[Vec<Rational>], signs: &[i8], p: u32) -> Rational {
    ex.iter()
        .map(|row| {
            let v: Rational =
                row.iter().zip(signs).map(|(a, &s)| if s > 0 { a.clone() } else { -a.clone() }).sum();
            rational::pow(&v.abs(), p)
        })
        .sum()
}

/// Exact weak `p`-sum by enumerating sign vectors.
///
/// `phi -> sum |phi(x_j)|^p` is convex, so its maximum over the cube
/// `[-1, 1]^support` sits at a vertex; the global sign is irrelevant, leaving
/// `2^(n-1)` patterns, walked in Gray-code order with incremental updates.
pub fn weak_psum(family: &[C00Vector], p: f64) -> Result<WeakPsum, OpError> {
    check_p(p)?;
    let (support, fl, ex) = dense(family);
    let n = support.len();
    if n > WEAK_PSUM_LIMIT {
        return Err(OpError::SupportTooLarge { size: n, limit: WEAK_PSUM_LIMIT });
    }
    if n == 0 {
        return Ok(WeakPsum { value: 0.0, exact: integer_p(p).map(|_| Rational::zero()), support, signs: vec![] });
    }
    let mut signs = vec![1i8; n];
    let mut values: Vec<f64> = fl.iter().map(|row| row.iter().sum()).collect();
    let mut best = objective(&values, p);
    let mut near: Vec<(f64, Vec<i8>)> = vec![(best, signs.clone())];
    for step in 1u64..1 << (n - 1) {
        // flip coordinate 1 + (index of the lowest set bit); coordinate 0 stays +1
        let c = 1 + step.trailing_zeros() as usize;
        signs[c] = -signs[c];
        let delta = 2.0 * signs[c] as f64;
        for (v, row) in values.iter_mut().zip(&fl) {
            *v += delta * row[c];
        }
        let obj = objective(&values, p);
        if obj > best * (1.0 + TOLERANCE) {
            best = obj;
            near.retain(|(o, _)| *o >= best * (1.0 - TOLERANCE));
            near.push((obj, signs.clone()));
        } else if obj >= best * (1.0 - TOLERANCE) && near.len() < 64 {
            best = best.max(obj);
            near.push((obj, signs.clone()));
        }
    }
    match integer_p(p) {
        Some(ip) => {
            let (exact, arg) = near
                .iter()
                .map(|(_, s)| (exact_objective(&ex, s, ip), s))
                .max_by(|a, b| a.0.cmp(&b.0))
                .expect("at least one candidate");
            Ok(WeakPsum { value: rational::to_f64(&exact), exact: Some(exact), support, signs: arg.clone() })
        }
        None => {
            let (value, arg) = near.into_iter().max_by(|a, b| a.0.total_cmp(&b.0)).expect("at least one candidate");
            Ok(WeakPsum { value, exact: None, support, signs: arg })
        }
    }
}

/// Lower bound on the weak `p`-sum from `samples` random sign vectors.
pub fn sampled_weak_psum(family: &[C00Vector], p: f64, samples: u64, seed: u64) -> Result<f64, OpError> {
    check_p(p)?;
    let (support, fl, _) = dense(family);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..samples {
        let signs: Vec<f64> = (0..support.len()).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let values: Vec<f64> = fl.iter().map(|row| row.iter().zip(&signs).map(|(a, s)| a * s).sum()).collect();
        best = best.max(objective(&values, p));
    }
    Ok(best)
}

/// Witness that `pi_p(D_psi) >= ratio`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: f64,
    pub family: Vec<C00Vector>,
    /// `n(j)`: a column where `|D_psi(x_j)|` attains its sup.
    pub positions: Vec<u64>,
    /// `||D_psi(x_j)||_inf`, exact.
    #[serde(with = "rational::serde_vec_str")]
    pub norms: Vec<Rational>,
    /// `sum_j ||D_psi x_j||^p`.
    pub numerator: f64,
    #[serde(with = "rational::serde_opt_str")]
    pub numerator_exact: Option<Rational>,
    /// Weak `p`-sum of the family.
    pub denominator: f64,
    #[serde(with = "rational::serde_opt_str")]
    pub denominator_exact: Option<Rational>,
    /// `(numerator / denominator)^(1/p)`.
    pub ratio: f64,
    /// Seed of the search that produced the family, if any.
    pub seed: Option<u64>,
}

impl Certificate {
    /// `ratio^p * denominator <= numerator`, within tolerance.
    pub fn is_consistent(&self) -> bool {
        self.ratio.powf(self.p) * self.denominator <= self.numerator * (1.0 + TOLERANCE) + f64::MIN_POSITIVE
    }

    /// Recomputes the certificate against `psi` and compares every stored
    /// quantity (exactly where exact values are stored).
    pub fn revalidate(&self, psi: &CoefficientField) -> Result<bool, OpError> {
        let fresh = pi_lower(psi, &self.family, self.p)?;
        let exact_ok = match (&self.numerator_exact, &fresh.numerator_exact) {
            (Some(a), Some(b)) => a == b && self.denominator_exact == fresh.denominator_exact,
            _ => {
                (self.numerator - fresh.numerator).abs() <= TOLERANCE * self.numerator.max(1.0)
                    && (self.denominator - fresh.denominator).abs() <= TOLERANCE * self.denominator.max(1.0)
            }
        };
        Ok(exact_ok && self.norms == fresh.norms && self.is_consistent())
    }
}

/// Certificate from a given family: numerator from certified sup norms,
/// denominator from [`weak_psum`].
pub fn pi_lower(psi: &CoefficientField, family: &[C00Vector], p: f64) -> Result<Certificate, OpError> {
    let weak = weak_psum(family, p)?;
    if weak.value <= 0.0 {
        return Err(OpError::DegenerateFamily);
    }
    let mut table = PsiTable::new(psi);
    let mut positions = Vec::with_capacity(family.len());
    let mut norms = Vec::with_capacity(family.len());
    for x in family {
        let applied = table.apply(x, 0)?;
        positions.push(applied.position);
        norms.push(applied.sup);
    }
    let numerator_exact = integer_p(p).map(|ip| norms.iter().map(|n| rational::pow(n, ip)).sum::<Rational>());
    let numerator = match &numerator_exact {
        Some(e) => rational::to_f64(e),
        None => norms.iter().map(|n| rational::to_f64(n).powf(p)).sum(),
    };
    let ratio = match (&numerator_exact, &weak.exact) {
        (Some(n), Some(d)) if p == 1.0 => rational::to_f64(&(n / d)),
        _ => (numerator / weak.value).powf(1.0 / p),
    };
    Ok(Certificate {
        p,
        family: family.to_vec(),
        positions,
        norms,
        numerator,
        numerator_exact,
        denominator: weak.value,
        denominator_exact: weak.exact,
        ratio,
        seed: None,
    })
}

/// `N = 1 + max_j (l(j) + n(j))`: the certificate only reads `psi` below `N`.
pub fn certificate_horizon(cert: &Certificate) -> u64 {
    1 + cert.family.iter().zip(&cert.positions).map(|(x, &n)| x.support_bound() + n).max().unwrap_or(0)
}

/// `psi` below `horizon`, followed by `extra` random values in
/// `[-||psi||, ||psi||]` (denominators up to 64) and zeros.
pub fn mutate_tail(
    psi: &CoefficientField,
    horizon: u64,
    extra: u64,
    seed: u64,
) -> Result<CoefficientField, OpError> {
    let mut values = psi.values(1, horizon.max(1))?;
    let bound = psi.sup_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        let t = rational::ratio_u64(rng.gen_range(0..=64), 64);
        let v = &bound * t;
        values.push(if rng.gen::<bool>() { v } else { -v });
    }
    Ok(CoefficientField::Window { values, tail_zero: true })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum number of certificate evaluations.
    pub budget: u64,
    pub max_family: usize,
    pub max_support: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: 2_000, max_family: 6, max_support: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: Option<Certificate>,
    pub evaluations: u64,
    pub reached: bool,
}

/// Looks for a family whose certificate ratio exceeds `tau`.
///
/// The seed family is tried first. Then random families of `+-1`
/// combinations over `pool` coordinates are drawn and refined by sign-flip
/// coordinate descent. Deterministic for a fixed `config.seed`.
pub fn search_certificate(
    psi: &CoefficientField,
    p: f64,
    tau: f64,
    seed_family: Vec<C00Vector>,
    pool: &[u64],
    config: &SearchConfig,
) -> Result<SearchOutcome, OpError> {
    let mut evaluations = 0u64;
    let mut best: Option<Certificate> = None;
    let consider = |family: &[C00Vector], best: &mut Option<Certificate>, evaluations: &mut u64| {
        *evaluations += 1;
        match pi_lower(psi, family, p) {
            Ok(c) => {
                let better = best.as_ref().is_none_or(|b| c.ratio > b.ratio);
                let ratio = c.ratio;
                if better {
                    *best = Some(c);
                }
                Ok(ratio)
            }
            Err(OpError::DegenerateFamily) => Ok(0.0),
            Err(e) => Err(e),
        }
    };
    let done = |best: &Option<Certificate>| best.as_ref().is_some_and(|c| c.ratio > tau);
    if !seed_family.is_empty() {
        consider(&seed_family, &mut best, &mut evaluations)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    while !done(&best) && evaluations < config.budget && !pool.is_empty() {
        let m = rng.gen_range(1..=config.max_family.max(1));
        let mut family: Vec<Vec<(u64, i64)>> = (0..m)
            .map(|_| {
                let s = rng.gen_range(1..=config.max_support.max(1));
                (0..s).map(|_| (pool[rng.gen_range(0..pool.len())], if rng.gen() { 1 } else { -1 })).collect()
            })
            .collect();
        let to_vectors = |f: &[Vec<(u64, i64)>]| f.iter().map(|v| C00Vector::from_ints(v)).collect::<Vec<_>>();
        let mut current = consider(&to_vectors(&family), &mut best, &mut evaluations)?;
        let mut improved = true;
        while improved && !done(&best) && evaluations < config.budget {
            improved = false;
            for j in 0..family.len() {
                for t in 0..family[j].len() {
                    family[j][t].1 = -family[j][t].1;
                    let r = consider(&to_vectors(&family), &mut best, &mut evaluations)?;
                    if r > current * (1.0 + TOLERANCE) {
                        current = r;
                        improved = true;
                    } else {
                        family[j][t].1 = -family[j][t].1;
                    }
                    if done(&best) || evaluations >= config.budget {
                        break;
                    }
                }
            }
        }
    }
    if let Some(c) = best.as_mut() {
        c.seed = Some(config.seed);
    }
    let reached = done(&best);
    Ok(SearchOutcome { best, evaluations, reached })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zset::SetDescriptor;
    use num::One;

    fn q(s: &str) -> Rational {
        crate::rational::parse_rational(s).unwrap()
    }

    #[test]
    fn weak_psum_examples() {
        let d = |i| C00Vector::delta(i);
        assert_eq!(weak_psum(&[d(1), d(2)], 1.0).unwrap().exact, Some(q("2")));
        let fam = [C00Vector::from_ints(&[(1, 1), (2, -1)]), C00Vector::from_ints(&[(1, 1), (2, 1)])];
        assert_eq!(weak_psum(&fam, 1.0).unwrap().exact, Some(q("2")));
        assert_eq!(weak_psum(&[d(1)], 2.0).unwrap().value, 1.0);
        assert!(weak_psum(&[d(1)], 0.5).is_err());
        let wide: Vec<C00Vector> = (1..=25).map(d).collect();
        assert!(matches!(weak_psum(&wide, 1.0), Err(OpError::SupportTooLarge { size: 25, .. })));
    }

    #[test]
    fn non_integer_p_uses_floats() {
        let fam = [C00Vector::from_ints(&[(1, 1), (2, 1)]), C00Vector::from_ints(&[(1, 1), (2, -1)])];
        let w = weak_psum(&fam, 1.5).unwrap();
        assert!(w.exact.is_none());
        assert!((w.value - 2f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn pi_lower_examples() {
        let one = CoefficientField::constant(Rational::one());
        let c = pi_lower(&one, &[C00Vector::delta(1)], 1.0).unwrap();
        assert_eq!((c.numerator, c.denominator, c.ratio), (1.0, 1.0, 1.0));
        assert_eq!(certificate_horizon(&c), 2);
        let zero = CoefficientField::constant(Rational::zero());
        assert_eq!(pi_lower(&zero, &[C00Vector::delta(3)], 1.0).unwrap().ratio, 0.0);
        assert!(matches!(pi_lower(&one, &[C00Vector::default()], 1.0), Err(OpError::DegenerateFamily)));
        let empty = Certificate { family: vec![], positions: vec![], ..c.clone() };
        assert_eq!(certificate_horizon(&empty), 1);
        assert!(c.revalidate(&one).unwrap());
    }

    #[test]
    fn mutation_preserves_prefix() {
        let psi = CoefficientField::indicator(SetDescriptor::powers(2).unwrap());
        let m = mutate_tail(&psi, 10, 5, 7).unwrap();
        for n in 1..10 {
            assert_eq!(m.value(n).unwrap(), psi.value(n).unwrap());
        }
        assert!(m.value(15).unwrap().is_zero());
    }

    #[test]
    fn search_meets_easy_threshold() {
        let psi = CoefficientField::indicator(SetDescriptor::ap(1, 2).unwrap());
        let out = search_certificate(&psi, 2.0, 0.9, vec![], &[1, 3, 5, 7], &SearchConfig::default()).unwrap();
        assert!(out.reached);
        assert!(out.best.unwrap().revalidate(&psi).unwrap());
    }
}
