//! Windowed Banach density and the pipeline that turns positive density into
//! a non-TF witness: recurrent block patterns at the scales of a
//! [`BlockSchedule`], a layered containment graph, a König chain through it,
//! and finally the witness itself.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::tfcheck::{self, TfError, Witness};
use crate::zset::{Bitmap, SetDescriptor, SetError, WindowSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Schedule,
    Patterns,
    Chain,
    Recurrence,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Schedule => "schedule",
            Stage::Patterns => "patterns",
            Stage::Chain => "chain",
            Stage::Recurrence => "recurrence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("insufficient window at stage {stage}, level {level}: {detail}")]
    InsufficientWindow { stage: Stage, level: usize, detail: String },
    #[error("malformed layered graph: {0}")]
    MalformedGraph(String),
    #[error("block length overflows at level {0}")]
    Overflow(usize),
    #[error(transparent)]
    Witness(#[from] TfError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEntry {
    pub d: u64,
    /// `max |S ∩ (n, n + d]|` over `0 <= n <= W - d`.
    pub max_count: u64,
    #[serde(with = "rational::serde_str")]
    pub ratio: Rational,
    /// Least `n` attaining the maximum.
    pub argmax: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub window: u64,
    pub entries: Vec<DensityEntry>,
    /// Minimum of the sampled ratios.
    #[serde(with = "rational::serde_opt_str")]
    pub headline: Option<Rational>,
    /// Whether the ratios are non-increasing in `d`; when they are not the
    /// headline is a cruder estimate.
    pub monotone: bool,
    /// Window maxima only bound the true suprema from below.
    pub lower_bounds_only: bool,
}

/// Prefix counts `p[x] = |S ∩ [1, x]|` for `x <= W`.
fn prefix_counts(win: &WindowSet, window: u64) -> Vec<u32> {
    let mut p = vec![0u32; window as usize + 1];
    for &s in win.elements() {
        if s >= 1 && s <= window {
            p[s as usize] += 1;
        }
    }
    for x in 1..p.len() {
        p[x] += p[x - 1];
    }
    p
}

pub fn density_profile(set: &SetDescriptor, window: u64, dlist: &[u64]) -> Result<DensityReport, DensityError> {
    if let Some(&d) = dlist.iter().find(|&&d| d == 0 || d > window) {
        return Err(DensityError::InvalidParameter(format!("block length {d} must lie in [1, {window}]")));
    }
    let win = set.materialize(window + 1)?;
    let p = prefix_counts(&win, window);
    let mut entries: Vec<DensityEntry> = dlist
        .iter()
        .map(|&d| {
            let (mut best, mut argmax) = (0u32, 0u64);
            for n in 0..=(window - d) as usize {
                let c = p[n + d as usize] - p[n];
                if c > best {
                    best = c;
                    argmax = n as u64;
                }
            }
            DensityEntry { d, max_count: best as u64, ratio: rational::ratio_u64(best as u64, d), argmax }
        })
        .collect();
    entries.sort_by_key(|e| e.d);
    entries.dedup_by_key(|e| e.d);
    let headline = entries.iter().map(|e| e.ratio.clone()).min();
    let monotone = entries.windows(2).all(|w| w[1].ratio <= w[0].ratio);
    Ok(DensityReport { window, entries, headline, monotone, lower_bounds_only: true })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLevel {
    pub d: u64,
    pub a: u64,
    pub n: u64,
}

/// `1 = d_1 < d_2 < ...` with `a_j` the largest integer below `d_j * eps`
/// and `N_j >= 2` minimal with `((N_j - 1) a_j / d_j + 1) / N_j < eps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSchedule {
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub levels: Vec<BlockLevel>,
}

impl BlockSchedule {
    pub fn block_lengths(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.d).collect()
    }

    /// `d_{J+1} = N_J d_J` for the last computed level.
    pub fn next_d(&self) -> Option<u64> {
        self.levels.last().and_then(|l| l.d.checked_mul(l.n))
    }
}

/// The left-hand side of the block test, `((N - 1) a / d + 1) / N`.
pub fn block_test_value(d: u64, a: u64, n: u64) -> Rational {
    let lhs = rational::from_u64(n - 1) * rational::ratio_u64(a, d) + Rational::one();
    lhs / rational::from_u64(n)
}

fn check_epsilon(eps: &Rational) -> Result<(), DensityError> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(DensityError::InvalidParameter(format!("epsilon {eps} must lie in (0, 1)")));
    }
    Ok(())
}

/// Least integer `>= d * eps`.
fn min_block_count(d: u64, eps: &Rational) -> u64 {
    (rational::from_u64(d) * eps).ceil().to_integer().to_u64().expect("d * eps < d")
}

pub fn block_schedule(eps: &Rational, levels: usize) -> Result<BlockSchedule, DensityError> {
    check_epsilon(eps)?;
    let mut out = Vec::with_capacity(levels);
    let mut d = 1u64;
    for j in 0..levels {
        if j > 0 {
            let prev: &BlockLevel = &out[j - 1];
            d = prev.d.checked_mul(prev.n).ok_or(DensityError::Overflow(j + 1))?;
        }
        let a = min_block_count(d, eps) - 1;
        // N (eps d - a) > d - a  <=>  the block test holds
        let gap = rational::from_u64(d) * eps - rational::from_u64(a);
        let bound = rational::from_u64(d - a) / gap;
        let n = (bound.floor().to_integer() + BigInt::one()).to_u64().ok_or(DensityError::Overflow(j + 1))?.max(2);
        out.push(BlockLevel { d, a, n });
    }
    Ok(BlockSchedule { epsilon: eps.clone(), levels: out })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrentPattern {
    /// `X ⊆ {1, ..., d}`, increasing.
    pub elements: Vec<u64>,
    /// Every `i` in the window with `(S - i) ∩ {1..d} = X`.
    pub occurrences: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFamily {
    pub d: u64,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    pub r_min: u64,
    /// Smallest admissible pattern size, `ceil(d * eps)`.
    pub min_size: u64,
    /// Number of `i` with `|S ∩ (i, i + d]| >= d * eps`.
    pub dense_positions: u64,
    /// Sorted lexicographically by element list.
    pub patterns: Vec<RecurrentPattern>,
}

fn window_bitmap(win: &WindowSet) -> std::borrow::Cow<'_, Bitmap> {
    match win.bitmap() {
        Some(b) => std::borrow::Cow::Borrowed(b),
        None => {
            let mut b = Bitmap::new(win.bound());
            for &s in win.elements() {
                b.set(s);
            }
            std::borrow::Cow::Owned(b)
        }
    }
}

fn bits_to_elements(bits: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut rest = word;
        while rest != 0 {
            out.push(w as u64 * 64 + rest.trailing_zeros() as u64 + 1);
            rest &= rest - 1;
        }
    }
    out
}

/// Exact patterns `(S - i) ∩ {1..d}`, `0 <= i <= W - d`, with at least
/// `ceil(d * eps)` elements that occur at least `r_min` times.
pub fn recurrent_patterns(
    set: &SetDescriptor,
    window: u64,
    d: u64,
    eps: &Rational,
    r_min: u64,
) -> Result<PatternFamily, DensityError> {
    let win = set.materialize(window.checked_add(1).ok_or(SetError::Overflow("window"))?)?;
    patterns_in_window(&win, window, d, eps, r_min)
}

fn patterns_in_window(
    win: &WindowSet,
    window: u64,
    d: u64,
    eps: &Rational,
    r_min: u64,
) -> Result<PatternFamily, DensityError> {
    check_epsilon(eps)?;
    if d == 0 || d > window || r_min == 0 {
        return Err(DensityError::InvalidParameter(format!(
            "need 1 <= d <= W and r_min >= 1 (d = {d}, W = {window}, r_min = {r_min})"
        )));
    }
    let min_size = min_block_count(d, eps);
    let p = prefix_counts(win, window);
    let bitmap = window_bitmap(win);
    let mut groups: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
    let mut dense_positions = 0;
    for i in 0..=window - d {
        let count = (p[(i + d) as usize] - p[i as usize]) as u64;
        if count >= min_size {
            dense_positions += 1;
            groups.entry(bitmap.extract(i + 1, d)).or_default().push(i);
        }
    }
    let mut patterns: Vec<RecurrentPattern> = groups
        .into_iter()
        .filter(|(_, occ)| occ.len() as u64 >= r_min)
        .map(|(bits, occurrences)| RecurrentPattern { elements: bits_to_elements(&bits), occurrences })
        .collect();
    patterns.sort_by(|x, y| x.elements.cmp(&y.elements));
    Ok(PatternFamily { d, epsilon: eps.clone(), r_min, min_size, dense_positions, patterns })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Edge joins `layers[layer][from]` to `layers[layer + 1][to]`.
    pub layer: usize,
    pub from: usize,
    pub to: usize,
    /// Least `m` with `Y + m ⊆ X` and `max(Y) + m < max(X)`.
    pub shift: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredGraph {
    /// Vertices are finite subsets of `N`, each layer sorted lexicographically.
    pub layers: Vec<Vec<Vec<u64>>>,
    pub edges: Vec<Edge>,
}

/// Least admissible shift joining `y` to `x`, if any.
pub fn edge_shift(y: &[u64], x: &[u64]) -> Option<u64> {
    let (&ymin, &ymax) = (y.first()?, y.last()?);
    let (&xmin, &xmax) = (x.first()?, x.last()?);
    let lo = xmin.saturating_sub(ymin);
    let hi = xmax.checked_sub(ymax)?.checked_sub(1)?;
    let contains = |v: u64| x.binary_search(&v).is_ok();
    (lo..=hi).find(|&m| y.iter().all(|&v| contains(v + m)))
}

impl LayeredGraph {
    /// Joins every pair of consecutive-layer vertices that admit a shift.
    pub fn build(layers: Vec<Vec<Vec<u64>>>) -> Self {
        let mut edges = Vec::new();
        for j in 0..layers.len().saturating_sub(1) {
            for (from, y) in layers[j].iter().enumerate() {
                for (to, x) in layers[j + 1].iter().enumerate() {
                    if let Some(shift) = edge_shift(y, x) {
                        edges.push(Edge { layer: j, from, to, shift });
                    }
                }
            }
        }
        LayeredGraph { layers, edges }
    }

    pub fn check(&self) -> Result<(), DensityError> {
        for e in &self.edges {
            let (Some(ys), Some(xs)) = (self.layers.get(e.layer), self.layers.get(e.layer + 1)) else {
                return Err(DensityError::MalformedGraph(format!("edge leaves layer {} with no successor", e.layer)));
            };
            let (Some(y), Some(x)) = (ys.get(e.from), xs.get(e.to)) else {
                return Err(DensityError::MalformedGraph(format!("edge endpoint out of range: {e:?}")));
            };
            let fits = y.iter().all(|&v| x.binary_search(&(v + e.shift)).is_ok());
            let below = matches!((y.last(), x.last()), (Some(&ym), Some(&xm)) if ym + e.shift < xm);
            if !fits || !below {
                return Err(DensityError::MalformedGraph(format!("edge condition fails: {e:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWitness {
    /// Index of the chosen vertex in each layer.
    pub vertices: Vec<usize>,
    /// `m_j` joining layer `j` to layer `j + 1`.
    pub shifts: Vec<u64>,
}

/// A path through every layer, or `None` when some layer cannot be reached.
///
/// Reverse reachability from the deepest layer marks the vertices that start
/// a complete path; a forward walk then takes the least such vertex at each
/// step, so the chain is lexicographically least.
pub fn koenig_chain(g: &LayeredGraph) -> Result<Option<ChainWitness>, DensityError> {
    g.check()?;
    let depth = g.layers.len();
    if depth == 0 || g.layers.iter().any(|l| l.is_empty()) {
        return Ok(None);
    }
    let mut out_edges: Vec<Vec<Vec<(usize, u64)>>> = g.layers.iter().map(|l| vec![Vec::new(); l.len()]).collect();
    for e in &g.edges {
        out_edges[e.layer][e.from].push((e.to, e.shift));
    }
    for layer in &mut out_edges {
        for list in layer.iter_mut() {
            list.sort_unstable();
        }
    }
    let mut good: Vec<Vec<bool>> = g.layers.iter().map(|l| vec![false; l.len()]).collect();
    good[depth - 1].iter_mut().for_each(|v| *v = true);
    for j in (0..depth - 1).rev() {
        for v in 0..g.layers[j].len() {
            good[j][v] = out_edges[j][v].iter().any(|&(to, _)| good[j + 1][to]);
        }
    }
    let Some(start) = good[0].iter().position(|&v| v) else {
        return Ok(None);
    };
    let mut vertices = vec![start];
    let mut shifts = Vec::with_capacity(depth - 1);
    for j in 0..depth - 1 {
        let here = vertices[j];
        let &(to, shift) =
            out_edges[j][here].iter().find(|&&(to, _)| good[j + 1][to]).expect("good vertices have good successors");
        vertices.push(to);
        shifts.push(shift);
    }
    Ok(Some(ChainWitness { vertices, shifts }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityWitness {
    pub witness: Witness,
    pub schedule: BlockSchedule,
    /// `|V_j|` per layer.
    pub layer_sizes: Vec<usize>,
    /// `Y_j` from the chain.
    pub chain: Vec<Vec<u64>>,
    pub shifts: Vec<u64>,
    /// `X_j = Y_j - (m_1 + ... + m_{j-1})`; entries may be negative.
    pub accumulated: Vec<Vec<i64>>,
    /// `n_j` with `X_j + n_j ⊆ S`.
    pub positions: Vec<i64>,
    /// `c_j = max(X_j)`.
    pub picks: Vec<i64>,
}

fn insufficient(stage: Stage, level: usize, detail: impl Into<String>) -> DensityError {
    DensityError::InsufficientWindow { stage, level, detail: detail.into() }
}

/// Builds a verified witness of depth `depth` from positive density.
///
/// Stages: block schedule for `eps`; for each `d_j` the exact patterns with
/// at least `d_j * eps` elements recurring `r_min` times; the layered graph
/// and its König chain `(Y_j, m_j)`; the nested sets `X_j`; increasing
/// positions `n_j` with `X_j + n_j` inside `S`; and picks `c_j = max(X_j)`.
/// The witness is `a_j = c_j - c_1`, `b_j = n_j + c_1`.
pub fn density_witness(
    set: &SetDescriptor,
    eps: &Rational,
    window: u64,
    depth: usize,
    r_min: u64,
) -> Result<DensityWitness, DensityError> {
    if depth == 0 {
        return Err(DensityError::InvalidParameter("depth must be at least 1".into()));
    }
    let schedule = block_schedule(eps, depth)?;
    let win = set.materialize(window.checked_add(1).ok_or(SetError::Overflow("window"))?)?;
    let mut layers = Vec::with_capacity(depth);
    for (j, level) in schedule.levels.iter().enumerate() {
        if level.d > window {
            return Err(insufficient(Stage::Patterns, j + 1, format!("block length {} exceeds window {window}", level.d)));
        }
        let family = patterns_in_window(&win, window, level.d, eps, r_min)?;
        if family.patterns.is_empty() {
            return Err(insufficient(
                Stage::Patterns,
                j + 1,
                format!(
                    "no pattern of length {} with >= {} elements recurs {r_min} times ({} dense positions)",
                    level.d, family.min_size, family.dense_positions
                ),
            ));
        }
        layers.push(family.patterns.into_iter().map(|p| p.elements).collect::<Vec<_>>());
    }
    let layer_sizes = layers.iter().map(Vec::len).collect();
    let graph = LayeredGraph::build(layers);
    let chain = koenig_chain(&graph)?
        .ok_or_else(|| insufficient(Stage::Chain, depth, "no chain spans every layer"))?;
    let ys: Vec<Vec<u64>> = chain.vertices.iter().enumerate().map(|(j, &v)| graph.layers[j][v].clone()).collect();

    let mut accumulated = Vec::with_capacity(depth);
    let mut offset = 0i64;
    for (j, y) in ys.iter().enumerate() {
        if j > 0 {
            offset += chain.shifts[j - 1] as i64;
        }
        accumulated.push(y.iter().map(|&v| v as i64 - offset).collect::<Vec<i64>>());
    }

    let bitmap = window_bitmap(&win);
    let top = window as i64;
    let mut positions: Vec<i64> = Vec::with_capacity(depth);
    for (j, x) in accumulated.iter().enumerate() {
        let (xmin, xmax) = (x[0], *x.last().expect("patterns are non-empty"));
        let lo = positions.last().map_or(i64::MIN, |&n| n + 1).max(-xmin);
        let found = (lo..=top - xmax).find(|&n| x.iter().all(|&v| bitmap.get((v + n) as u64)));
        match found {
            Some(n) => positions.push(n),
            None => {
                return Err(insufficient(Stage::Recurrence, j + 1, format!("no translate of X_{} fits above {lo}", j + 1)))
            }
        }
    }

    let picks: Vec<i64> = accumulated.iter().map(|x| *x.last().expect("non-empty")).collect();
    let base = picks[0];
    let a = picks.iter().map(|&c| (c - base) as u64).collect();
    let b = positions.iter().map(|&n| (n + base) as u64).collect();
    let witness = tfcheck::certify(set, Witness::new(a, b))?;
    Ok(DensityWitness {
        witness,
        schedule,
        layer_sizes,
        chain: ys,
        shifts: chain.shifts,
        accumulated,
        positions,
        picks,
    })
}

/// Convenience: `true` when `min_count / d` exceeds `eps` at every sampled `d`.
pub fn exceeds(report: &DensityReport, eps: &Rational) -> bool {
    !report.entries.is_empty() && report.entries.iter().all(|e| e.ratio > *eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use crate::tfcheck::verify_witness;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn profile_examples() {
        let r = density_profile(&SetDescriptor::evens(), 10_000, &[2, 10, 100]).unwrap();
        assert!(r.entries.iter().all(|e| e.ratio == q("1/2")));
        let r = density_profile(&SetDescriptor::powers(2).unwrap(), 1 << 16, &[64]).unwrap();
        assert_eq!((r.entries[0].max_count, r.entries[0].argmax), (6, 0));
        assert!(density_profile(&SetDescriptor::evens(), 10, &[11]).is_err());
    }

    #[test]
    fn schedule_examples() {
        let s = block_schedule(&q("2/5"), 3).unwrap();
        let triples: Vec<_> = s.levels.iter().map(|l| (l.d, l.a, l.n)).collect();
        assert_eq!(triples, [(1, 0, 3), (3, 1, 11), (33, 13, 101)]);
        assert_eq!(s.next_d(), Some(3333));
        let s = block_schedule(&q("1/2"), 1).unwrap();
        assert_eq!((s.levels[0].d, s.levels[0].a, s.levels[0].n), (1, 0, 3));
        let s = block_schedule(&q("4/5"), 4).unwrap();
        assert_eq!(s.block_lengths(), [1, 2, 4, 24]);
        assert!(block_schedule(&q("1"), 2).is_err());
    }

    #[test]
    fn pattern_examples() {
        let f = recurrent_patterns(&SetDescriptor::evens(), 1000, 4, &q("2/5"), 3).unwrap();
        let sets: Vec<_> = f.patterns.iter().map(|p| p.elements.clone()).collect();
        assert_eq!(sets, vec![vec![1, 3], vec![2, 4]]);
        assert!(f.patterns.iter().all(|p| p.occurrences.len() >= 3));
        let f = recurrent_patterns(&SetDescriptor::empty(), 100, 4, &q("2/5"), 1).unwrap();
        assert!(f.patterns.is_empty());
        let f = recurrent_patterns(&SetDescriptor::nonnegative(), 100, 3, &q("9/10"), 5).unwrap();
        assert_eq!(f.patterns.len(), 1);
        assert_eq!(f.patterns[0].elements, vec![1, 2, 3]);
    }

    #[test]
    fn chain_examples() {
        let g = LayeredGraph::build(vec![vec![vec![1]], vec![vec![1, 2]]]);
        let c = koenig_chain(&g).unwrap().unwrap();
        assert_eq!((c.vertices, c.shifts), (vec![0, 0], vec![0]));
        // {2} cannot sit strictly below the maximum of {2}
        let g = LayeredGraph::build(vec![vec![vec![2]], vec![vec![2]]]);
        assert_eq!(koenig_chain(&g).unwrap(), None);
        let bad = LayeredGraph { layers: vec![vec![vec![1]]], edges: vec![Edge { layer: 0, from: 0, to: 0, shift: 0 }] };
        assert!(matches!(koenig_chain(&bad), Err(DensityError::MalformedGraph(_))));
    }

    #[test]
    fn chain_prefers_vertices_with_complete_paths() {
        // layer 0 vertex {1} has no successor in layer 1 beyond {1, 2}; {2} reaches the end
        let layers = vec![vec![vec![1], vec![2]], vec![vec![2, 3]], vec![vec![1, 2, 3, 4]]];
        let g = LayeredGraph::build(layers);
        let c = koenig_chain(&g).unwrap().unwrap();
        assert_eq!(c.vertices, vec![0, 0, 0]);
        assert_eq!(c.shifts, vec![1, 0]);
    }

    #[test]
    fn evens_pipeline() {
        let dw = density_witness(&SetDescriptor::evens(), &q("2/5"), 2000, 3, 3).unwrap();
        assert!(verify_witness(&SetDescriptor::evens(), &dw.witness).valid);
        for w in dw.accumulated.windows(2) {
            assert!(w[0].iter().all(|v| w[1].contains(v)) && w[0].len() < w[1].len());
        }
    }

    #[test]
    fn sparse_sets_fail_at_the_pattern_stage() {
        let p = SetDescriptor::powers(2).unwrap();
        match density_witness(&p, &q("1/10"), 1 << 16, 3, 3) {
            Err(DensityError::InsufficientWindow { stage: Stage::Patterns, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn schedule_levels_are_minimal(num in 1u64..50, den in 2u64..50, levels in 1usize..4) {
            prop_assume!(num < den);
            let eps = rational::ratio_u64(num, den);
            if let Ok(s) = block_schedule(&eps, levels) {
                for l in &s.levels {
                    prop_assert!(rational::from_u64(l.a) < rational::from_u64(l.d) * &eps);
                    prop_assert!(rational::from_u64(l.a + 1) >= rational::from_u64(l.d) * &eps);
                    prop_assert!(block_test_value(l.d, l.a, l.n) < eps);
                    if l.n > 2 {
                        prop_assert!(block_test_value(l.d, l.a, l.n - 1) >= eps);
                    }
                }
            }
        }

        #[test]
        fn profile_matches_brute_force(bits in proptest::collection::vec(any::<bool>(), 1..80), d in 1u64..20) {
            let w = bits.len() as u64;
            prop_assume!(d <= w);
            let set = SetDescriptor::finite(bits.iter().enumerate().filter(|x| *x.1).map(|x| x.0 as u64));
            let r = density_profile(&set, w, &[d]).unwrap();
            let brute = (0..=w - d)
                .map(|n| (n + 1..=n + d).filter(|&t| t < w && bits[t as usize]).count() as u64)
                .max()
                .unwrap();
            prop_assert_eq!(r.entries[0].max_count, brute);
        }

        #[test]
        fn windowed_max_is_subadditive(bits in proptest::collection::vec(any::<bool>(), 8..120), d1 in 1u64..40, d2 in 1u64..40) {
            let w = bits.len() as u64;
            prop_assume!(d1 + d2 <= w);
            let set = SetDescriptor::finite(bits.iter().enumerate().filter(|x| *x.1).map(|x| x.0 as u64));
            let r = density_profile(&set, w, &[d1, d2, d1 + d2]).unwrap();
            let g = |d: u64| r.entries.iter().find(|e| e.d == d).unwrap().max_count;
            prop_assert!(g(d1 + d2) <= g(d1) + g(d2));
        }
    }
}
