//! Strict and enhanced balancedness, exactly.
//!
//! The densest proper induced subgraph is found with Goldberg's reduction:
//! for a guessed density a/b, a minimum s-t cut in the network
//!
//! ```text
//! s -> i : b*m         i -> t : b*m + 2a - b*deg(i)         i -- j : b
//! ```
//!
//! has value `b*m*n + 2(a|S| - b*e(S))` for source side S, so a cut below
//! `b*m*n` certifies a subset denser than a/b. Properness is enforced by
//! deleting each vertex in turn.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{Dinic, INF};
use crate::graph::{Bits, SimpleGraph};
use crate::rational::from_usize;

pub const BRUTE_FORCE_CAP: usize = 16;
pub const ENHANCED_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BalanceError {
    #[error("need at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("{n} vertices exceeds the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("no two parts share a vertex")]
    NoSharedVertex,
    #[error("part {0} is not a strictly balanced graph with v - alpha*e < 0")]
    BadPart(usize),
    #[error("part {0}: embedding is not an injective map into the common vertex set")]
    BadEmbedding(usize),
}

/// A vertex subset with its exact induced density.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityWitness {
    /// 0-based, sorted.
    pub subset: Vec<usize>,
    pub edges: usize,
    #[serde(with = "crate::rational::serde_ratio")]
    pub density: BigRational,
    /// True when the subset is at least as dense as the whole graph.
    pub strictness_violated: bool,
}

/// Order: higher density first, then smaller subset, then lexicographically
/// smaller vertex list.
fn better(a_edges: usize, a_set: &[usize], b_edges: usize, b_set: &[usize]) -> bool {
    // a_edges/|a| vs b_edges/|b|
    let lhs = a_edges * b_set.len();
    let rhs = b_edges * a_set.len();
    match lhs.cmp(&rhs) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => match a_set.len().cmp(&b_set.len()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a_set < b_set,
        },
    }
}

fn witness(g: &SimpleGraph, subset: Vec<usize>, edges: usize) -> DensityWitness {
    let density = BigRational::new(BigInt::from(edges), BigInt::from(subset.len()));
    let strictness_violated = edges * g.n() >= g.m() * subset.len();
    DensityWitness { subset, edges, density, strictness_violated }
}

/// Densest nonempty induced subgraph of `g` restricted to `alive`, with the
/// smallest-then-lexicographic tie-break. Returns (subset, edges).
fn densest_among(g: &SimpleGraph, alive: &[usize]) -> (Vec<usize>, usize) {
    let k = alive.len();
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in alive.iter().enumerate() {
        index[v] = i;
    }
    let mut local_edges = Vec::new();
    let mut deg = vec![0i64; k];
    for (i, &v) in alive.iter().enumerate() {
        for &w in g.neighbors(v) {
            let j = index[w];
            if j != usize::MAX && i < j {
                local_edges.push((i, j));
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    let m = local_edges.len() as i64;
    let (s, t) = (k, k + 1);
    let build = |a: i64, b: i64, forced: Option<usize>| {
        let mut d = Dinic::new(k + 2);
        for i in 0..k {
            let cap = if forced == Some(i) { INF } else { b * m };
            d.add_edge(s, i, cap);
            d.add_edge(i, t, b * m + 2 * a - b * deg[i]);
        }
        for &(i, j) in &local_edges {
            d.add_undirected(i, j, b);
        }
        d
    };
    let count_edges = |set: &[bool]| local_edges.iter().filter(|&&(i, j)| set[i] && set[j]).count() as i64;

    // Dinkelbach iteration on the density guess.
    let (mut a, mut b) = (m, k as i64);
    loop {
        let mut d = build(a, b, None);
        let cut = d.max_flow(s, t);
        let base = b * m * k as i64;
        if cut >= base {
            break;
        }
        let side = d.source_side(s);
        let set: Vec<bool> = (0..k).map(|i| side[i]).collect();
        let size = set.iter().filter(|&&x| x).count() as i64;
        let e = count_edges(&set);
        debug_assert!(size > 0 && e * b > a * size);
        a = e;
        b = size;
    }
    // Maximizers at density a/b: minimal source sides with one vertex forced.
    let base = b * m * k as i64;
    let mut best: Option<(Vec<usize>, usize)> = None;
    for u in 0..k {
        let mut d = build(a, b, Some(u));
        if d.max_flow(s, t) != base {
            continue;
        }
        let side = d.source_side(s);
        let set: Vec<bool> = (0..k).map(|i| side[i]).collect();
        let e = count_edges(&set) as usize;
        let mut verts: Vec<usize> = (0..k).filter(|&i| set[i]).map(|i| alive[i]).collect();
        verts.sort_unstable();
        let replace = match &best {
            None => true,
            Some((bs, be)) => better(e, &verts, *be, bs),
        };
        if replace {
            best = Some((verts, e));
        }
    }
    best.expect("some vertex lies in a densest subset")
}

/// Densest nonempty proper induced subgraph.
pub fn densest_proper_induced(g: &SimpleGraph) -> Result<DensityWitness, BalanceError> {
    let n = g.n();
    if n < 2 {
        return Err(BalanceError::TooSmall(n));
    }
    let per_vertex: Vec<(Vec<usize>, usize)> = (0..n)
        .into_par_iter()
        .map(|v| {
            let alive: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            densest_among(g, &alive)
        })
        .collect();
    let mut best = per_vertex[0].clone();
    for cand in &per_vertex[1..] {
        if better(cand.1, &cand.0, best.1, &best.0) {
            best = cand.clone();
        }
    }
    Ok(witness(g, best.0, best.1))
}

/// Exhaustive oracle over all 2^n - 2 nonempty proper subsets.
pub fn brute_force_densest(g: &SimpleGraph) -> Result<DensityWitness, BalanceError> {
    let n = g.n();
    if n < 2 {
        return Err(BalanceError::TooSmall(n));
    }
    if n > BRUTE_FORCE_CAP {
        return Err(BalanceError::CapExceeded { n, cap: BRUTE_FORCE_CAP });
    }
    let rows: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |acc, &w| acc | (1 << w)))
        .collect();
    let full = (1u32 << n) - 1;
    let mut best: Option<(Vec<usize>, usize)> = None;
    for mask in 1..full {
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let twice: u32 = verts.iter().map(|&v| (rows[v] & mask).count_ones()).sum();
        let e = (twice / 2) as usize;
        let replace = match &best {
            None => true,
            Some((bs, be)) => better(e, &verts, *be, bs),
        };
        if replace {
            best = Some((verts, e));
        }
    }
    let (s, e) = best.expect("n >= 2 leaves a proper subset");
    Ok(witness(g, s, e))
}

/// Strict balancedness: every nonempty proper induced subgraph is strictly
/// sparser than `g`. Returns a violating witness on failure.
pub fn is_strictly_balanced(g: &SimpleGraph) -> Result<(bool, Option<DensityWitness>), BalanceError> {
    let w = densest_proper_induced(g)?;
    if w.strictness_violated {
        Ok((false, Some(w)))
    } else {
        Ok((true, None))
    }
}

#[derive(Clone, Debug)]
pub struct EnhancedParams {
    pub alpha: BigRational,
    pub delta0: BigRational,
    pub beta0: BigRational,
    pub cap: usize,
}

impl EnhancedParams {
    pub fn new(alpha: BigRational) -> Self {
        EnhancedParams {
            alpha,
            delta0: BigRational::new(1.into(), 4.into()),
            beta0: BigRational::new(1.into(), 2.into()),
            cap: ENHANCED_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnhancedViolation {
    pub subset: Vec<usize>,
    pub edges: usize,
}

/// Every subgraph on at most `delta0 * v(g)` vertices satisfies
/// `e0 < v0/alpha - beta0`. Only connected induced subsets are enumerated:
/// when every connected piece satisfies the bound, each piece has
/// `e0 - v0/alpha < -beta0`, so any union of several pieces does too.
pub fn is_enhanced_balanced(g: &SimpleGraph, p: &EnhancedParams) -> Result<(bool, Option<EnhancedViolation>), BalanceError> {
    let one = BigRational::one();
    if !(p.alpha.is_positive() && p.alpha < one) {
        return Err(BalanceError::BadParameter("alpha must lie in (0, 1)".into()));
    }
    if !(p.delta0.is_positive() && p.delta0 < one) {
        return Err(BalanceError::BadParameter("delta0 must lie in (0, 1)".into()));
    }
    if !p.beta0.is_positive() {
        return Err(BalanceError::BadParameter("beta0 must be positive".into()));
    }
    let n = g.n();
    if n > p.cap {
        return Err(BalanceError::CapExceeded { n, cap: p.cap });
    }
    let limit = crate::rational::floor(&(&p.delta0 * from_usize(n)));
    let limit: usize = limit.try_into().unwrap_or(0);
    if limit == 0 {
        return Ok((true, None));
    }
    let violates = |v0: usize, e0: usize| &p.alpha * (from_usize(e0) + &p.beta0) >= from_usize(v0);
    let mut found = None;
    for_each_connected_subset(g, limit, &mut |set: &[usize], e0: usize| {
        if violates(set.len(), e0) {
            let mut s = set.to_vec();
            s.sort_unstable();
            found = Some(EnhancedViolation { subset: s, edges: e0 });
            false
        } else {
            true
        }
    });
    Ok((found.is_none(), found))
}

/// Calls `visit(set, edges)` once for each connected induced subset with at
/// most `max_size` vertices. Stops early when `visit` returns false.
pub fn for_each_connected_subset<F>(g: &SimpleGraph, max_size: usize, visit: &mut F)
where
    F: FnMut(&[usize], usize) -> bool,
{
    let n = g.n();
    let mut set = Vec::with_capacity(max_size);
    for root in 0..n {
        set.clear();
        set.push(root);
        let mut ext: Vec<usize> = g.neighbors(root).iter().copied().filter(|&w| w > root).collect();
        let mut blocked = Bits::new(n);
        blocked.insert(root);
        for &w in g.neighbors(root) {
            blocked.insert(w);
        }
        if !extend(g, root, max_size, &mut set, 0, &mut ext, &blocked, visit) {
            return;
        }
    }
}

/// ESU-style extension: each connected set is produced exactly once, from its
/// smallest vertex.
#[allow(clippy::too_many_arguments)]
fn extend<F>(
    g: &SimpleGraph,
    root: usize,
    max_size: usize,
    set: &mut Vec<usize>,
    edges: usize,
    ext: &mut Vec<usize>,
    blocked: &Bits,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[usize], usize) -> bool,
{
    if !visit(set, edges) {
        return false;
    }
    if set.len() == max_size {
        return true;
    }
    while let Some(w) = ext.pop() {
        let mut next_ext = ext.clone();
        let mut next_blocked = blocked.clone();
        for &x in g.neighbors(w) {
            if x > root && !blocked.contains(x) {
                next_ext.push(x);
                next_blocked.insert(x);
            }
        }
        let added = set.iter().filter(|&&u| g.has_edge(u, w)).count();
        set.push(w);
        let ok = extend(g, root, max_size, set, edges + added, &mut next_ext, &next_blocked, visit);
        set.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// A copy of a graph placed in a common vertex set: vertex `i` of `graph`
/// sits at `map[i]`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub graph: SimpleGraph,
    pub map: Vec<usize>,
}

/// xi(F) = v(F) - alpha * e(F) for the union F of the embedded parts.
pub fn union_density_check(parts: &[Embedding], alpha: &BigRational) -> Result<BigRational, BalanceError> {
    let mut vertices = std::collections::BTreeSet::new();
    let mut edges = std::collections::BTreeSet::new();
    for (i, part) in parts.iter().enumerate() {
        let h = &part.graph;
        if part.map.len() != h.n() {
            return Err(BalanceError::BadEmbedding(i));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !part.map.iter().all(|&x| seen.insert(x)) {
            return Err(BalanceError::BadEmbedding(i));
        }
        let xi = from_usize(h.n()) - alpha * from_usize(h.m());
        let balanced = h.n() >= 2 && is_strictly_balanced(h).map(|r| r.0).unwrap_or(false);
        if !balanced || !xi.is_negative() {
            return Err(BalanceError::BadPart(i));
        }
    }
    let shared = parts.iter().enumerate().any(|(i, a)| {
        parts[i + 1..]
            .iter()
            .any(|b| a.map.iter().any(|x| b.map.contains(x)))
    });
    if !shared {
        return Err(BalanceError::NoSharedVertex);
    }
    for part in parts {
        vertices.extend(part.map.iter().copied());
        for (u, v) in part.graph.edges() {
            let (a, b) = (part.map[u], part.map[v]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Ok(from_usize(vertices.len()) - alpha * from_usize(edges.len()))
}

/// Convenience for tests and reports.
pub fn density_of(g: &SimpleGraph, subset: &[usize]) -> BigRational {
    let mut bits = Bits::new(g.n());
    for &v in subset {
        bits.insert(v);
    }
    if subset.is_empty() {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(g.edges_within(&bits)), BigInt::from(subset.len()))
}
