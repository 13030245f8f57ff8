//! The random balanced multigraph H*(n, m) = H_r + H_h + H_b and its
//! simple-conditioned version H(n, m).
//!
//! Write m = q*n/2 + r with q >= 2 and 0 <= r < n/2. H_r is a uniform
//! (q-2)-regular graph, H_h a uniform Hamilton cycle, and H_b joins each
//! vertex x of an almost equidistributed set R on the cycle to y[x], where
//! the y[x] form a uniform ordered tuple of distinct vertices.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::{is_enhanced_balanced, is_strictly_balanced, EnhancedParams};
use crate::canon::{canonize, is_asymmetric, CanonOptions, CanonicalForm};
use crate::graph::{MultiGraph, SimpleGraph};
use crate::rng::{tag, trial_rng};

pub const DEFAULT_REGULAR_BUDGET: u64 = 1_000_000;
pub const DEFAULT_MAX_REJECTS: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("n = {0} is odd; the construction needs even n (use force_odd to override)")]
    OddN(usize),
    #[error("m = {m} is below n + 2 = {}", n + 2)]
    TooFewEdges { n: usize, m: usize },
    #[error("m = {m} needs a {d}-regular part on {n} vertices, which does not exist")]
    TooManyEdges { n: usize, m: usize, d: usize },
    #[error("no {d}-regular graph on {n} vertices: {reason}")]
    RegularInfeasible { n: usize, d: usize, reason: &'static str },
    #[error("rejection budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("need r <= n, got r = {r}, n = {n}")]
    BadR { n: usize, r: usize },
    #[error("a Hamilton cycle needs n >= 3, got {0}")]
    TinyCycle(usize),
}

/// Splits m = q*n/2 + r. With `force_odd`, odd n is accepted using
/// q = 2*floor(m/n), r = m mod n; the result is then outside the regime the
/// construction is designed for and is flagged by the caller.
pub fn decompose_m(n: usize, m: usize, force_odd: bool) -> Result<(usize, usize), SampleError> {
    if n % 2 == 1 && !force_odd {
        return Err(SampleError::OddN(n));
    }
    if m < n + 2 {
        return Err(SampleError::TooFewEdges { n, m });
    }
    let (q, r) = if n.is_multiple_of(2) {
        (m / (n / 2), m % (n / 2))
    } else {
        (2 * (m / n), m % n)
    };
    if q - 2 >= n || r > n {
        return Err(SampleError::TooManyEdges { n, m, d: q - 2 });
    }
    Ok((q, r))
}

/// 0-based cycle positions i-1 of the vertices v_i with
/// floor((i-1)r/n) < floor(ir/n), i = 1..n.
pub fn equidistributed_set(n: usize, r: usize) -> Result<Vec<usize>, SampleError> {
    if r > n {
        return Err(SampleError::BadR { n, r });
    }
    Ok((1..=n)
        .filter(|&i| (i - 1) * r / n < i * r / n)
        .map(|i| i - 1)
        .collect())
}

/// True when every run of k consecutive positions (cyclically) holds fewer
/// than k*r/n + 1 members, i.e. `count * n < k*r + n`.
pub fn satisfies_window_bound(n: usize, r: usize, positions: &[usize]) -> bool {
    let mut member = vec![false; n];
    for &p in positions {
        member[p] = true;
    }
    for start in 0..n {
        let mut count = 0;
        for k in 1..=n {
            if member[(start + k - 1) % n] {
                count += 1;
            }
            if count * n >= k * r + n {
                return false;
            }
        }
    }
    true
}

/// Uniform simple d-regular graph by the configuration model with rejection.
pub fn sample_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R, budget: u64) -> Result<SimpleGraph, SampleError> {
    if d == 0 {
        return Ok(SimpleGraph::empty(n));
    }
    if d >= n {
        return Err(SampleError::RegularInfeasible { n, d, reason: "degree must be below n" });
    }
    if n * d % 2 == 1 {
        return Err(SampleError::RegularInfeasible { n, d, reason: "n*d must be even" });
    }
    let mut points: Vec<usize> = (0..n * d).map(|i| i / d).collect();
    'attempt: for _ in 0..budget {
        // Uniform perfect matching: shuffle, pair neighbours.
        for i in (1..points.len()).rev() {
            let j = rng.gen_range(0..=i);
            points.swap(i, j);
        }
        let mut g = SimpleGraph::empty(n);
        for pair in points.chunks(2) {
            if g.add_edge(pair[0], pair[1]).is_err() {
                continue 'attempt;
            }
        }
        return Ok(g);
    }
    Err(SampleError::BudgetExhausted(budget))
}

/// Uniform Hamilton cycle on `0..n`, normalized to start at 0 and continue
/// towards its smaller neighbour, so each undirected cycle has one
/// representation.
pub fn sample_hamilton<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<usize>, SampleError> {
    if n < 3 {
        return Err(SampleError::TinyCycle(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    Ok(normalize_cycle(&order))
}

pub fn normalize_cycle(order: &[usize]) -> Vec<usize> {
    let n = order.len();
    let z = order.iter().position(|&v| v == 0).expect("cycle contains vertex 0");
    let fwd = order[(z + 1) % n];
    let back = order[(z + n - 1) % n];
    if fwd < back {
        (0..n).map(|i| order[(z + i) % n]).collect()
    } else {
        (0..n).map(|i| order[(z + n - i) % n]).collect()
    }
}

/// Uniform ordered r-tuple of distinct vertices of `0..n`.
pub fn sample_balancing<R: Rng + ?Sized>(r: usize, n: usize, rng: &mut R) -> Result<Vec<usize>, SampleError> {
    if r > n {
        return Err(SampleError::BadR { n, r });
    }
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..r {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(r);
    Ok(pool)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedDecomposition {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub r: usize,
    /// Edges of the (q-2)-regular part, `u < v`.
    pub regular_edges: Vec<(usize, usize)>,
    /// Cyclic vertex order of the Hamilton cycle.
    pub hamilton_order: Vec<usize>,
    /// Positions in `hamilton_order` of the members of R, increasing.
    pub r_positions: Vec<usize>,
    /// `balancing[i]` is y[x] for the i-th member x of R.
    pub balancing: Vec<usize>,
    /// Set when odd n was forced through.
    #[serde(default)]
    pub outside_guarantee: bool,
}

impl BalancedDecomposition {
    pub fn r_vertices(&self) -> Vec<usize> {
        self.r_positions.iter().map(|&p| self.hamilton_order[p]).collect()
    }

    pub fn hamilton_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let (a, b) = (self.hamilton_order[i], self.hamilton_order[(i + 1) % n]);
                (a.min(b), a.max(b))
            })
            .collect()
    }

    /// Pairs {x, y[x]} in R order (a pair may be a loop).
    pub fn balancing_edges(&self) -> Vec<(usize, usize)> {
        self.r_vertices()
            .into_iter()
            .zip(&self.balancing)
            .map(|(x, &y)| (x.min(y), x.max(y)))
            .collect()
    }

    pub fn multigraph(&self) -> MultiGraph {
        let mut mg = MultiGraph::new(self.n);
        for &(u, v) in self.regular_edges.iter().chain(&self.hamilton_edges()).chain(&self.balancing_edges()) {
            mg.add_edge(u, v);
        }
        mg
    }
}

#[derive(Clone, Debug)]
pub struct BalancedSample {
    pub decomposition: BalancedDecomposition,
    pub multigraph: MultiGraph,
    pub simple: bool,
    pub simple_graph: Option<SimpleGraph>,
    /// Rejected H* draws before this one.
    pub rejections: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub regular_budget: u64,
    pub max_rejects: u64,
    pub force_odd: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            regular_budget: DEFAULT_REGULAR_BUDGET,
            max_rejects: DEFAULT_MAX_REJECTS,
            force_odd: false,
        }
    }
}

pub fn sample_h_star<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R, opts: &SampleOptions) -> Result<BalancedSample, SampleError> {
    let (q, r) = decompose_m(n, m, opts.force_odd)?;
    let regular = sample_regular(n, q - 2, rng, opts.regular_budget)?;
    let hamilton_order = sample_hamilton(n, rng)?;
    let r_positions = equidistributed_set(n, r)?;
    let balancing = sample_balancing(r, n, rng)?;
    let decomposition = BalancedDecomposition {
        n,
        m,
        q,
        r,
        regular_edges: regular.edges().collect(),
        hamilton_order,
        r_positions,
        balancing,
        outside_guarantee: n % 2 == 1,
    };
    let multigraph = decomposition.multigraph();
    let simple_graph = multigraph.to_simple();
    Ok(BalancedSample {
        decomposition,
        multigraph,
        simple: simple_graph.is_some(),
        simple_graph,
        rejections: 0,
    })
}

/// H(n, m): H* conditioned on being simple, by rejection.
pub fn sample_h<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R, opts: &SampleOptions) -> Result<BalancedSample, SampleError> {
    for attempt in 0..opts.max_rejects.max(1) {
        let mut s = sample_h_star(n, m, rng, opts)?;
        if s.simple {
            s.rejections = attempt;
            return Ok(s);
        }
    }
    Err(SampleError::BudgetExhausted(opts.max_rejects))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub std_err: f64,
}

impl RateEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let std_err = if trials == 0 { 0.0 } else { (rate * (1.0 - rate) / trials as f64).sqrt() };
        RateEstimate { successes, trials, rate, std_err }
    }
}

/// Per-trial simplicity flags of H*(n, m); trial i uses stream (seed, i).
pub fn simplicity_trials(n: usize, m: usize, trials: u64, seed: u64, opts: &SampleOptions) -> Result<Vec<bool>, SampleError> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i, tag::SAMPLE);
            sample_h_star(n, m, &mut rng, opts).map(|s| s.simple)
        })
        .collect()
}

pub fn estimate_simplicity(n: usize, m: usize, trials: u64, seed: u64, opts: &SampleOptions) -> Result<RateEstimate, SampleError> {
    let flags = simplicity_trials(n, m, trials, seed, opts)?;
    Ok(RateEstimate::from_counts(flags.iter().filter(|&&f| f).count() as u64, trials))
}

#[derive(Clone, Debug, Default)]
pub struct FamilyFilters {
    pub asymmetric: bool,
    pub enhanced: Option<EnhancedParams>,
}

#[derive(Clone, Debug)]
pub struct Family {
    /// Sorted by canonical form.
    pub graphs: Vec<SimpleGraph>,
    pub forms: Vec<CanonicalForm>,
    pub samples_drawn: u64,
    /// False when the sample budget ran out before `target_count` classes.
    pub complete: bool,
}

const FAMILY_BATCH: u64 = 64;

/// Distinct isomorphism classes of H(v, e) passing the filters, in canonical
/// order. Draw i uses stream (seed, i), so the result does not depend on the
/// thread count.
pub fn sample_family(v: usize, e: usize, target_count: usize, seed: u64, filters: &FamilyFilters, max_samples: u64) -> Result<Family, SampleError> {
    decompose_m(v, e, false)?;
    let opts = SampleOptions::default();
    let canon_opts = CanonOptions::with_cap(v.max(crate::canon::DEFAULT_CAP));
    let mut found: BTreeMap<CanonicalForm, SimpleGraph> = BTreeMap::new();
    let mut drawn = 0u64;
    while found.len() < target_count && drawn < max_samples {
        let hi = (drawn + FAMILY_BATCH).min(max_samples);
        let batch: Vec<Option<(CanonicalForm, SimpleGraph)>> = (drawn..hi)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, i, tag::FAMILY);
                let s = sample_h(v, e, &mut rng, &opts)?;
                let g = s.simple_graph.expect("sample_h returns simple graphs");
                if filters.asymmetric && !is_asymmetric(&g, canon_opts).expect("within cap") {
                    return Ok(None);
                }
                if let Some(p) = &filters.enhanced {
                    match is_enhanced_balanced(&g, p) {
                        Ok((true, _)) => {}
                        _ => return Ok(None),
                    }
                }
                let form = canonize(&g, None, canon_opts).expect("within cap").form;
                Ok(Some((form, g)))
            })
            .collect::<Result<_, SampleError>>()?;
        for (form, g) in batch.into_iter().flatten() {
            if found.len() < target_count {
                found.entry(form).or_insert(g);
            }
        }
        drawn = hi;
    }
    let (forms, graphs): (Vec<_>, Vec<_>) = found.into_iter().unzip();
    Ok(Family {
        complete: graphs.len() >= target_count,
        graphs,
        forms,
        samples_drawn: drawn,
    })
}

/// Number of triples (H_r, H_h, H_b) whose sum is the simple graph `g`, for
/// the given (n, m). Exhaustive; meant for n <= 10.
pub fn count_decompositions(g: &SimpleGraph, m: usize) -> Result<u64, SampleError> {
    let n = g.n();
    let (q, r) = decompose_m(n, m, false)?;
    let positions = equidistributed_set(n, r)?;
    let mut total = 0u64;
    for cycle in hamilton_cycles(g) {
        let mut rest = g.clone();
        for i in 0..n {
            rest.remove_edge(cycle[i], cycle[(i + 1) % n]);
        }
        let xs: Vec<usize> = positions.iter().map(|&p| cycle[p]).collect();
        let mut used_y = vec![false; n];
        total += assign_balancing(&mut rest, &xs, 0, &mut used_y, q - 2);
    }
    Ok(total)
}

fn assign_balancing(rest: &mut SimpleGraph, xs: &[usize], i: usize, used_y: &mut [bool], d: usize) -> u64 {
    if i == xs.len() {
        return u64::from((0..rest.n()).all(|v| rest.degree(v) == d));
    }
    let x = xs[i];
    let mut total = 0;
    let candidates: Vec<usize> = rest.neighbors(x).to_vec();
    for y in candidates {
        if used_y[y] {
            continue;
        }
        used_y[y] = true;
        rest.remove_edge(x, y);
        total += assign_balancing(rest, xs, i + 1, used_y, d);
        rest.add_edge(x, y).expect("restoring a removed edge");
        used_y[y] = false;
    }
    total
}

/// All Hamilton cycles of `g` in normalized form.
pub fn hamilton_cycles(g: &SimpleGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let mut path = vec![0];
    let mut used = vec![false; n];
    used[0] = true;
    fn go(g: &SimpleGraph, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = g.n();
        let last = *path.last().unwrap();
        if path.len() == n {
            if g.has_edge(last, 0) && path[1] < path[n - 1] {
                out.push(path.clone());
            }
            return;
        }
        for &w in g.neighbors(last) {
            if !used[w] {
                used[w] = true;
                path.push(w);
                go(g, path, used, out);
                path.pop();
                used[w] = false;
            }
        }
    }
    go(g, &mut path, &mut used, &mut out);
    out
}

/// Checks that an accepted sample is strictly balanced; used by the
/// acceptance harness and the CLI.
pub fn sample_is_strictly_balanced(s: &BalancedSample) -> bool {
    s.simple_graph
        .as_ref()
        .map(|g| is_strictly_balanced(g).map(|r| r.0).unwrap_or(false))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_m(16, 37, false), Ok((4, 5)));
        assert_eq!(decompose_m(10, 12, false), Ok((2, 2)));
        assert_eq!(decompose_m(16, 21, false), Ok((2, 5)));
        assert_eq!(decompose_m(15, 20, false), Err(SampleError::OddN(15)));
        assert_eq!(decompose_m(16, 17, false), Err(SampleError::TooFewEdges { n: 16, m: 17 }));
        assert_eq!(decompose_m(15, 20, true), Ok((2, 5)));
        assert!(decompose_m(6, 30, false).is_err());
    }

    #[test]
    fn equidistributed_examples() {
        let one_based: Vec<usize> = equidistributed_set(16, 5).unwrap().iter().map(|p| p + 1).collect();
        assert_eq!(one_based, vec![4, 7, 10, 13, 16]);
        assert!(equidistributed_set(16, 0).unwrap().is_empty());
        assert_eq!(equidistributed_set(16, 16).unwrap(), (0..16).collect::<Vec<_>>());
        assert!(equidistributed_set(16, 17).is_err());
        for n in 1..40 {
            for r in 0..=n {
                let set = equidistributed_set(n, r).unwrap();
                assert_eq!(set.len(), r);
                assert!(satisfies_window_bound(n, r, &set), "n={n} r={r}");
            }
        }
        // A clumped set breaks the bound.
        assert!(!satisfies_window_bound(16, 5, &[0, 1, 2, 3, 4]));
    }

    #[test]
    fn regular_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_regular(6, 0, &mut rng, 10).unwrap(), SimpleGraph::empty(6));
        assert_eq!(sample_regular(4, 3, &mut rng, 1000).unwrap(), SimpleGraph::complete(4));
        assert!(sample_regular(5, 3, &mut rng, 10).is_err());
        assert!(sample_regular(4, 4, &mut rng, 10).is_err());
        for _ in 0..50 {
            let g = sample_regular(20, 3, &mut rng, 10_000).unwrap();
            assert!(g.degrees().iter().all(|&d| d == 3));
        }
    }

    #[test]
    fn two_regular_on_eight_is_uniform() {
        // Labeled 2-regular graphs on 8 vertices by cycle type:
        // C8: 7!/2 = 2520; C5+C3: C(8,3) * 1 * 12 = 672; C4+C4: 35*3*3 = 315.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut c8 = 0u32;
        let mut c53 = 0u32;
        for _ in 0..10_000 {
            let g = sample_regular(8, 2, &mut rng, 100_000).unwrap();
            if g.is_connected() {
                c8 += 1;
            } else {
                let comp = component_sizes(&g);
                if comp == vec![3, 5] {
                    c53 += 1;
                }
            }
        }
        let expected = 2520.0 / 672.0;
        let observed = c8 as f64 / c53 as f64;
        // Delta-method s.e. of a ratio of multinomial counts.
        let (pa, pb): (f64, f64) = (2520.0 / 3507.0, 672.0 / 3507.0);
        let se = expected * ((1.0 / pa + 1.0 / pb) / 10_000.0).sqrt();
        assert!((observed - expected).abs() < 4.0 * se, "{observed} vs {expected}");
    }

    fn component_sizes(g: &SimpleGraph) -> Vec<usize> {
        let mut seen = vec![false; g.n()];
        let mut sizes = Vec::new();
        for s in 0..g.n() {
            if seen[s] {
                continue;
            }
            let mut stack = vec![s];
            seen[s] = true;
            let mut k = 0;
            while let Some(u) = stack.pop() {
                k += 1;
                for &w in g.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            sizes.push(k);
        }
        sizes.sort();
        sizes
    }

    #[test]
    fn hamilton_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_hamilton(2, &mut rng).is_err());
        for _ in 0..10 {
            assert_eq!(sample_hamilton(3, &mut rng).unwrap(), vec![0, 1, 2]);
        }
        let mut counts: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
        for _ in 0..10_000 {
            *counts.entry(sample_hamilton(4, &mut rng).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        let se = (10_000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - 10_000.0 / 3.0).abs() < 3.0 * se);
        }
        let mut five = std::collections::BTreeSet::new();
        for _ in 0..2_000 {
            five.insert(sample_hamilton(5, &mut rng).unwrap());
        }
        assert_eq!(five.len(), 12);
    }

    #[test]
    fn balancing_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(sample_balancing(0, 5, &mut rng).unwrap().is_empty());
        let mut full = sample_balancing(6, 6, &mut rng).unwrap();
        full.sort();
        assert_eq!(full, (0..6).collect::<Vec<_>>());
        assert!(sample_balancing(7, 6, &mut rng).is_err());
        let mut counts: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
        let trials = 12_000;
        for _ in 0..trials {
            *counts.entry(sample_balancing(2, 4, &mut rng).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 12);
        let p = 1.0 / 12.0;
        let se = (trials as f64 * p * (1.0 - p)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - trials as f64 * p).abs() < 3.5 * se);
        }
    }

    #[test]
    fn h_star_examples() {
        let opts = SampleOptions::default();
        for i in 0..200 {
            let mut rng = trial_rng(5, i, tag::SAMPLE);
            let s = sample_h_star(6, 8, &mut rng, &opts).unwrap();
            assert_eq!(s.multigraph.edge_count(), 8);
            assert_eq!((s.decomposition.q, s.decomposition.r), (2, 2));
            if s.simple {
                let g = s.simple_graph.as_ref().unwrap();
                assert!(g.degrees().iter().all(|&d| (2..=4).contains(&d)));
            }
            let s = sample_h_star(16, 21, &mut rng, &opts).unwrap();
            assert_eq!(s.decomposition.r_vertices().len(), 5);
        }
    }

    #[test]
    fn h_examples() {
        let opts = SampleOptions::default();
        for i in 0..100 {
            let mut rng = trial_rng(6, i, tag::SAMPLE);
            let s = sample_h(12, 14, &mut rng, &opts).unwrap();
            let g = s.simple_graph.as_ref().unwrap();
            assert_eq!(g.m(), 14);
            assert!(sample_is_strictly_balanced(&s));
        }
    }

    #[test]
    fn decomposition_round_trips_through_json() {
        let mut rng = trial_rng(7, 0, tag::SAMPLE);
        let s = sample_h(10, 17, &mut rng, &SampleOptions::default()).unwrap();
        let text = serde_json::to_string(&s.decomposition).unwrap();
        let back: BalancedDecomposition = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s.decomposition);
        assert_eq!(back.multigraph(), s.multigraph);
    }

    #[test]
    fn simplicity_rate_is_a_probability() {
        let est = estimate_simplicity(12, 15, 200, 8, &SampleOptions::default()).unwrap();
        assert!((0.0..=1.0).contains(&est.rate));
        assert_eq!(est.trials, 200);
    }

    #[test]
    fn family_examples() {
        let filters = FamilyFilters { asymmetric: true, enhanced: None };
        let fam = sample_family(8, 10, 20, 9, &filters, 20_000).unwrap();
        assert!(!fam.graphs.is_empty());
        for w in fam.forms.windows(2) {
            assert!(w[0] < w[1]);
        }
        for g in &fam.graphs {
            assert!(is_strictly_balanced(g).unwrap().0);
            assert!(is_asymmetric(g, CanonOptions::default()).unwrap());
        }
        let fam = sample_family(10, 13, 50, 10, &FamilyFilters::default(), 10_000).unwrap();
        assert!(fam.graphs.len() >= 30, "{} classes", fam.graphs.len());
    }

    #[test]
    fn decomposition_count_bound() {
        let opts = SampleOptions::default();
        for (n, m) in [(6, 8), (8, 10), (8, 13), (10, 12), (10, 16)] {
            for i in 0..5 {
                let mut rng = trial_rng(11, i, tag::SAMPLE);
                let s = sample_h(n, m, &mut rng, &opts).unwrap();
                let g = s.simple_graph.unwrap();
                let count = count_decompositions(&g, m).unwrap();
                assert!(count >= 1, "the sampled decomposition itself is counted");
                let (q, r) = decompose_m(n, m, false).unwrap();
                let bound = ((q + 2) as u64).pow((n + r) as u32);
                assert!(count <= bound, "n={n} m={m}: {count} > {bound}");
            }
        }
    }

    #[test]
    fn edge_containment_scales_like_one_over_n() {
        // P({0,1} in E(H)) and P({0,1},{1,2} in E(H)) against (c/n)^|E0|
        // with c fixed once for all n.
        let c = 4.0;
        let opts = SampleOptions::default();
        for n in [20usize, 40, 80] {
            let m = n + n / 5;
            let trials = 4000u64;
            let hits: Vec<(bool, bool)> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let mut rng = trial_rng(12, i + 1_000_000 * n as u64, tag::SAMPLE);
                    let g = sample_h(n, m, &mut rng, &opts).unwrap().simple_graph.unwrap();
                    let a = g.has_edge(0, 1);
                    (a, a && g.has_edge(1, 2))
                })
                .collect();
            let p1 = hits.iter().filter(|h| h.0).count() as f64 / trials as f64;
            let p2 = hits.iter().filter(|h| h.1).count() as f64 / trials as f64;
            assert!(p1 <= c / n as f64, "n={n} p1={p1}");
            assert!(p2 <= (c / n as f64).powi(2), "n={n} p2={p2}");
        }
    }
}
