//! Red/blue colouring of a sampled graph: Hamilton edges red, balancing
//! edges blue. Alternating cycles, equipotent cycle pairs and the rare local
//! configurations that would allow nontrivial automorphisms.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, SimpleGraph};
use crate::sampler::BalancedDecomposition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Red,
    Blue,
    Regular,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorError {
    #[error("the decomposition does not form a simple graph")]
    NotSimple,
    #[error("hamilton order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("regular component has {0} edges; only sparse samples are supported")]
    NotSparse(usize),
}

#[derive(Clone, Debug)]
pub struct ColoredGraph {
    graph: SimpleGraph,
    colours: HashMap<(usize, usize), Colour>,
    hamilton_order: Vec<usize>,
    position: Vec<usize>,
    in_r: Vec<bool>,
    r: usize,
    regular_edges: usize,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl ColoredGraph {
    pub fn from_decomposition(d: &BalancedDecomposition) -> Result<Self, ColorError> {
        if !d.multigraph().is_simple() {
            return Err(ColorError::NotSimple);
        }
        ColoredGraph::from_parts(d.n, &d.hamilton_order, &d.r_vertices(), &d.balancing_edges(), &d.regular_edges)
    }

    /// Red edges follow `hamilton_order` cyclically; `blue` and `regular`
    /// are explicit edge lists. `r_vertices` only feeds the R-based checks
    /// and classification.
    pub fn from_parts(
        n: usize,
        hamilton_order: &[usize],
        r_vertices: &[usize],
        blue: &[(usize, usize)],
        regular: &[(usize, usize)],
    ) -> Result<Self, ColorError> {
        if hamilton_order.len() != n {
            return Err(ColorError::BadOrder(n));
        }
        let mut position = vec![usize::MAX; n];
        for (i, &v) in hamilton_order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(ColorError::BadOrder(n));
            }
            position[v] = i;
        }
        let mut graph = SimpleGraph::empty(n);
        let mut colours = HashMap::new();
        let red = (0..n).map(|i| (hamilton_order[i], hamilton_order[(i + 1) % n]));
        let tagged = red
            .map(|e| (e, Colour::Red))
            .chain(blue.iter().map(|&e| (e, Colour::Blue)))
            .chain(regular.iter().map(|&e| (e, Colour::Regular)));
        for ((u, v), c) in tagged {
            graph.add_edge(u, v).map_err(|e| match e {
                GraphError::Duplicate(..) | GraphError::Loop(_) => ColorError::NotSimple,
                other => ColorError::Graph(other),
            })?;
            colours.insert(key(u, v), c);
        }
        let mut in_r = vec![false; n];
        for &x in r_vertices {
            if x >= n {
                return Err(GraphError::OutOfRange { vertex: x, n }.into());
            }
            in_r[x] = true;
        }
        Ok(ColoredGraph {
            graph,
            colours,
            hamilton_order: hamilton_order.to_vec(),
            position,
            in_r,
            r: r_vertices.len(),
            regular_edges: regular.len(),
        })
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn colour(&self, u: usize, v: usize) -> Option<Colour> {
        self.colours.get(&key(u, v)).copied()
    }

    pub fn in_r(&self, v: usize) -> bool {
        self.in_r[v]
    }

    pub fn is_sparse(&self) -> bool {
        self.regular_edges == 0
    }

    /// Position of `v` along the Hamilton cycle.
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn hamilton_order(&self) -> &[usize] {
        &self.hamilton_order
    }

    /// Blue edges without an endpoint in R, and (when 2r < n) red edges
    /// with both endpoints in R.
    pub fn endpoint_violations(&self) -> Vec<((usize, usize), Colour)> {
        let mut out = Vec::new();
        for (&(u, v), &c) in &self.colours {
            let ends = usize::from(self.in_r[u]) + usize::from(self.in_r[v]);
            let bad = match c {
                Colour::Blue => ends == 0,
                Colour::Red => 2 * self.r < self.n() && ends == 2,
                Colour::Regular => false,
            };
            if bad {
                out.push(((u, v), c));
            }
        }
        out.sort();
        out
    }

    fn cyclic_distance(&self, a: usize, b: usize) -> usize {
        let n = self.n();
        let d = self.position[a].abs_diff(self.position[b]);
        d.min(n - d)
    }

    /// Length of a shortest red path between the two vertex sets.
    pub fn red_distance(&self, a: &[usize], b: &[usize]) -> usize {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.cyclic_distance(x, y))
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Lengths of the red segments of `set`: red paths with both ends in
    /// the set and no interior vertex in it.
    pub fn red_segments(&self, set: &[usize]) -> Vec<usize> {
        let n = self.n();
        let mut pos: Vec<usize> = set.iter().map(|&v| self.position[v]).collect();
        pos.sort_unstable();
        pos.dedup();
        if pos.len() < 2 {
            return Vec::new();
        }
        (0..pos.len())
            .map(|i| {
                let next = pos[(i + 1) % pos.len()];
                (next + n - pos[i]) % n
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Even,
    Bluish,
    ReddishType1,
    ReddishType2,
    ReddishType3,
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingCycle {
    /// Cyclic vertex order, starting at the smallest vertex, second vertex
    /// smaller than the last.
    pub vertices: Vec<usize>,
    /// `colours[i]` colours the edge from `vertices[i]` to `vertices[i + 1]`.
    pub colours: Vec<Colour>,
    pub kind: CycleKind,
}

impl AlternatingCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Number of cyclically adjacent equal colours.
fn same_colour_adjacencies(colours: &[Colour]) -> usize {
    let l = colours.len();
    (0..l).filter(|&i| colours[i] == colours[(i + 1) % l]).count()
}

/// A cycle is alternating when at most one cyclic adjacency repeats a
/// colour (which forces odd length) and no edge is regular.
pub fn is_alternating(colours: &[Colour]) -> bool {
    colours.len() >= 3 && !colours.contains(&Colour::Regular) && same_colour_adjacencies(colours) <= 1
}

fn classify(cg: &ColoredGraph, vertices: &[usize], colours: &[Colour]) -> CycleKind {
    let l = vertices.len();
    if l.is_multiple_of(2) {
        return CycleKind::Even;
    }
    let blue = colours.iter().filter(|&&c| c == Colour::Blue).count();
    if blue == l.div_ceil(2) {
        return CycleKind::Bluish;
    }
    // The repeated colour is red: edges i and i+1 meet at vertices[i+1].
    let i = (0..l).find(|&i| colours[i] == colours[(i + 1) % l]).expect("odd alternating cycle repeats a colour");
    let x = vertices[i];
    let z = vertices[(i + 2) % l];
    let k = vertices.iter().filter(|&&v| cg.in_r(v)).count();
    let ends = usize::from(cg.in_r(x)) + usize::from(cg.in_r(z));
    match (ends, k) {
        (1, k) if k == (l - 1) / 2 => CycleKind::ReddishType1,
        (2, k) if k == (l - 1) / 2 => CycleKind::ReddishType2,
        (2, k) if k == l.div_ceil(2) => CycleKind::ReddishType3,
        _ => CycleKind::Unclassified,
    }
}

/// All alternating cycles with at most `max_len` vertices, each reported
/// once.
pub fn find_alternating_cycles(cg: &ColoredGraph, max_len: usize) -> Vec<AlternatingCycle> {
    let mut out = Vec::new();
    if max_len < 3 {
        return out;
    }
    let n = cg.n();
    let mut on_path = vec![false; n];
    for s in 0..n {
        let mut path = vec![s];
        let mut colours = Vec::new();
        on_path[s] = true;
        extend(cg, max_len, &mut path, &mut colours, &mut on_path, 0, &mut out);
        on_path[s] = false;
    }
    out
}

fn extend(
    cg: &ColoredGraph,
    max_len: usize,
    path: &mut Vec<usize>,
    colours: &mut Vec<Colour>,
    on_path: &mut [bool],
    same: usize,
    out: &mut Vec<AlternatingCycle>,
) {
    let s = path[0];
    let last = *path.last().expect("nonempty path");
    for &w in cg.graph.neighbors(last) {
        let c = cg.colour(last, w).expect("every edge is coloured");
        if c == Colour::Regular {
            continue;
        }
        let step_same = same + usize::from(colours.last() == Some(&c));
        if step_same > 1 {
            continue;
        }
        if w == s {
            if path.len() >= 3 && path[1] < last {
                colours.push(c);
                if same_colour_adjacencies(colours) <= 1 {
                    out.push(AlternatingCycle {
                        vertices: path.clone(),
                        colours: colours.clone(),
                        kind: classify(cg, path, colours),
                    });
                }
                colours.pop();
            }
            continue;
        }
        if w < s || on_path[w] || path.len() == max_len {
            continue;
        }
        path.push(w);
        colours.push(c);
        on_path[w] = true;
        extend(cg, max_len, path, colours, on_path, step_same, out);
        on_path[w] = false;
        colours.pop();
        path.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    /// Position `i` of the first cycle corresponds to position
    /// `shift + i` (or `shift - i` when reflected) of the second.
    pub shift: usize,
    pub reflected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquipotentPair {
    pub first: usize,
    pub second: usize,
    pub alignments: Vec<Alignment>,
}

/// Ordered pairs of distinct cycles of equal length whose degree sequences
/// agree under some rotation or reflection. Indices refer to `cycles`.
pub fn equipotent_cycle_pairs(cg: &ColoredGraph, cycles: &[AlternatingCycle]) -> Vec<EquipotentPair> {
    let g = cg.graph();
    let degs: Vec<Vec<usize>> = cycles.iter().map(|c| c.vertices.iter().map(|&v| g.degree(v)).collect()).collect();
    let mut out = Vec::new();
    for (i, a) in degs.iter().enumerate() {
        for (j, b) in degs.iter().enumerate() {
            if i == j || a.len() != b.len() {
                continue;
            }
            let l = a.len();
            let mut alignments = Vec::new();
            for shift in 0..l {
                for reflected in [false, true] {
                    let ok = (0..l).all(|p| {
                        let q = if reflected { (shift + l - p) % l } else { (shift + p) % l };
                        a[p] == b[q]
                    });
                    if ok {
                        alignments.push(Alignment { shift, reflected });
                    }
                }
            }
            if !alignments.is_empty() {
                out.push(EquipotentPair { first: i, second: j, alignments });
            }
        }
    }
    out
}

pub fn ceil_sqrt(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while s * s > n {
        s -= 1;
    }
    while s * s < n {
        s += 1;
    }
    s
}

/// Ceiling of (ln n)^2.
pub fn ceil_ln_squared(n: usize) -> usize {
    let l = (n.max(1) as f64).ln();
    (l * l).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RareCaps {
    /// Longest alternating cycle examined.
    pub max_cycle_len: usize,
    /// Longest attached alternating path examined.
    pub max_path_len: usize,
    /// Distance and length threshold standing in for sqrt(n).
    pub sqrt_n: usize,
}

impl RareCaps {
    pub fn for_n(n: usize) -> Self {
        let l = ceil_ln_squared(n).max(3);
        RareCaps {
            max_cycle_len: l,
            max_path_len: l,
            sqrt_n: ceil_sqrt(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSummary {
    /// 1-based vertices in cyclic order.
    pub vertices: Vec<usize>,
    pub kind: CycleKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RareConfigReport {
    pub n: usize,
    pub caps: RareCaps,
    pub cycles: Vec<CycleSummary>,
    /// Cycles with an attached alternating path.
    pub attached_paths: usize,
    /// Cycles with an edge between two of their vertices that is not a
    /// cycle edge.
    pub internal_edges: usize,
    /// Pairs of cycles at red distance below the threshold.
    pub close_cycle_pairs: usize,
    /// Cycles with a short red segment of length at least 2.
    pub short_red_segments: usize,
    /// Pairs of disjoint red paths with equal degree sequences.
    pub twin_red_paths: usize,
    pub equipotent_pairs: usize,
}

impl RareConfigReport {
    /// True when none of the five configurations occurs.
    pub fn is_clean(&self) -> bool {
        self.counts().iter().all(|&c| c == 0)
    }

    pub fn counts(&self) -> [usize; 5] {
        [
            self.attached_paths,
            self.internal_edges,
            self.close_cycle_pairs,
            self.short_red_segments,
            self.twin_red_paths,
        ]
    }
}

pub fn rare_configuration_report(cg: &ColoredGraph, caps: RareCaps) -> Result<RareConfigReport, ColorError> {
    if !cg.is_sparse() {
        return Err(ColorError::NotSparse(cg.regular_edges));
    }
    let cycles = find_alternating_cycles(cg, caps.max_cycle_len);
    let attached_paths = cycles.iter().filter(|c| has_attached_path(cg, c, caps.max_path_len)).count();
    let internal_edges = cycles.iter().filter(|c| has_chord(cg, c)).count();
    let mut close_cycle_pairs = 0;
    for i in 0..cycles.len() {
        for j in i + 1..cycles.len() {
            if cg.red_distance(&cycles[i].vertices, &cycles[j].vertices) < caps.sqrt_n {
                close_cycle_pairs += 1;
            }
        }
    }
    let short_red_segments = cycles
        .iter()
        .filter(|c| cg.red_segments(&c.vertices).iter().any(|&t| (2..=caps.sqrt_n).contains(&t)))
        .count();
    let twin_red_paths = twin_red_paths(cg, caps.sqrt_n);
    let equipotent_pairs = equipotent_cycle_pairs(cg, &cycles).len();
    Ok(RareConfigReport {
        n: cg.n(),
        caps,
        cycles: cycles
            .iter()
            .map(|c| CycleSummary {
                vertices: c.vertices.iter().map(|&v| v + 1).collect(),
                kind: c.kind,
            })
            .collect(),
        attached_paths,
        internal_edges,
        close_cycle_pairs,
        short_red_segments,
        twin_red_paths,
        equipotent_pairs,
    })
}

fn has_chord(cg: &ColoredGraph, c: &AlternatingCycle) -> bool {
    let l = c.len();
    (0..l).any(|i| (i + 2..l).any(|j| !(i == 0 && j == l - 1) && cg.graph.has_edge(c.vertices[i], c.vertices[j])))
}

/// An alternating path of length in [2, max_len] joining two (not
/// necessarily distinct) cycle vertices, with every interior vertex off the
/// cycle.
fn has_attached_path(cg: &ColoredGraph, c: &AlternatingCycle, max_len: usize) -> bool {
    let n = cg.n();
    let mut on_cycle = vec![false; n];
    for &v in &c.vertices {
        on_cycle[v] = true;
    }
    let mut used = vec![false; n];
    c.vertices.iter().any(|&x| {
        cg.graph.neighbors(x).iter().any(|&w| {
            let col = cg.colour(x, w).expect("coloured");
            if on_cycle[w] || col == Colour::Regular {
                return false;
            }
            used[w] = true;
            let found = walk(cg, &on_cycle, &mut used, w, col, 1, max_len);
            used[w] = false;
            found
        })
    })
}

fn walk(cg: &ColoredGraph, on_cycle: &[bool], used: &mut [bool], at: usize, prev: Colour, len: usize, max_len: usize) -> bool {
    if len >= max_len {
        return false;
    }
    for &w in cg.graph.neighbors(at) {
        let col = cg.colour(at, w).expect("coloured");
        if col == prev || col == Colour::Regular {
            continue;
        }
        if on_cycle[w] {
            return true;
        }
        if used[w] {
            continue;
        }
        used[w] = true;
        let found = walk(cg, on_cycle, used, w, col, len + 1, max_len);
        used[w] = false;
        if found {
            return true;
        }
    }
    false
}

/// Pairs of vertex-disjoint red paths on `t` vertices whose degree
/// sequences coincide, counted up to reversing both paths and swapping them.
pub fn twin_red_paths(cg: &ColoredGraph, t: usize) -> usize {
    let n = cg.n();
    if t == 0 || 2 * t > n {
        return 0;
    }
    let deg: Vec<usize> = cg.hamilton_order.iter().map(|&v| cg.graph.degree(v)).collect();
    let window = |s: usize, reversed: bool| -> Vec<usize> {
        (0..t)
            .map(|i| if reversed { deg[(s + t - 1 - i) % n] } else { deg[(s + i) % n] })
            .collect()
    };
    let forward: Vec<Vec<usize>> = (0..n).map(|s| window(s, false)).collect();
    let backward: Vec<Vec<usize>> = (0..n).map(|s| window(s, true)).collect();
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            if b - a < t || n - (b - a) < t {
                continue;
            }
            count += usize::from(forward[a] == forward[b]) + usize::from(forward[a] == backward[b]);
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_order(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    /// Brute force: every simple cycle, then filter by colour pattern.
    fn brute_alternating(cg: &ColoredGraph, max_len: usize) -> Vec<Vec<usize>> {
        let g = cg.graph();
        let mut out = Vec::new();
        fn go(g: &SimpleGraph, max_len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let s = path[0];
            let last = *path.last().unwrap();
            for &w in g.neighbors(last) {
                if w == s && path.len() >= 3 && path[1] < last {
                    out.push(path.clone());
                } else if w > s && !path.contains(&w) && path.len() < max_len {
                    path.push(w);
                    go(g, max_len, path, out);
                    path.pop();
                }
            }
        }
        for s in 0..g.n() {
            go(g, max_len, &mut vec![s], &mut out);
        }
        out.retain(|c| {
            let l = c.len();
            let cols: Vec<Colour> = (0..l).map(|i| cg.colour(c[i], c[(i + 1) % l]).unwrap()).collect();
            is_alternating(&cols)
        });
        out.sort();
        out
    }

    fn found(cg: &ColoredGraph, max_len: usize) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = find_alternating_cycles(cg, max_len).into_iter().map(|c| c.vertices).collect();
        v.sort();
        v
    }

    #[test]
    fn antipodal_matching_matches_brute_force() {
        let cg = ColoredGraph::from_parts(6, &cycle_order(6), &[0, 1, 2], &[(0, 3), (1, 4), (2, 5)], &[]).unwrap();
        for l in 3..=6 {
            assert_eq!(found(&cg, l), brute_alternating(&cg, l));
        }
        assert!(!found(&cg, 6).is_empty());
    }

    #[test]
    fn random_colourings_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(4..=10);
            let mut blue = Vec::new();
            for u in 0..n {
                for v in u + 2..n {
                    if !(u == 0 && v == n - 1) && rng.gen_bool(0.25) {
                        blue.push((u, v));
                    }
                }
            }
            let cg = ColoredGraph::from_parts(n, &cycle_order(n), &[], &blue, &[]).unwrap();
            assert_eq!(found(&cg, n), brute_alternating(&cg, n));
        }
    }

    #[test]
    fn no_blue_means_no_cycles() {
        let cg = ColoredGraph::from_parts(9, &cycle_order(9), &[], &[], &[]).unwrap();
        assert!(find_alternating_cycles(&cg, 9).is_empty());
        let rep = rare_configuration_report(&cg, RareCaps::for_n(9)).unwrap();
        assert_eq!(rep.counts()[..4], [0, 0, 0, 0]);
    }

    #[test]
    fn even_four_cycle() {
        // u1=0 ~red~ w1=1, w1 ~blue~ u2=5, u2 ~red~ w2=6, w2 ~blue~ u1.
        let cg = ColoredGraph::from_parts(12, &cycle_order(12), &[1, 6], &[(1, 5), (6, 0)], &[]).unwrap();
        let cycles = find_alternating_cycles(&cg, 12);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].kind, CycleKind::Even);
        assert_eq!(cycles[0].vertices, vec![0, 1, 5, 6]);
        assert!(cg.endpoint_violations().is_empty());
    }

    #[test]
    fn odd_cycle_kinds() {
        // Triangle 0-1-2 with red 0-1, 1-2 and blue 2-0: reddish, x=0, z=2.
        let base = |r: &[usize]| ColoredGraph::from_parts(10, &cycle_order(10), r, &[(0, 2)], &[]).unwrap();
        let kind = |cg: &ColoredGraph| find_alternating_cycles(cg, 3)[0].kind;
        assert_eq!(kind(&base(&[0])), CycleKind::ReddishType1);
        assert_eq!(kind(&base(&[0, 2])), CycleKind::ReddishType3);
        assert_eq!(kind(&base(&[])), CycleKind::Unclassified);
        // Pentagon 0-1-2-3-4 with red 0-1,1-2,2-3,3-4 cannot alternate;
        // use red 0-1, 2-3 and blue 1-2, 3-4', 4'-0 instead.
        let order = [0, 1, 5, 6, 2, 3, 7, 8, 4, 9, 10, 11];
        let cg = ColoredGraph::from_parts(12, &order, &[1, 3, 4], &[(1, 2), (3, 4), (4, 0)], &[]).unwrap();
        let c = find_alternating_cycles(&cg, 5);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, CycleKind::Bluish);
        // Reddish type 2 on a 5-cycle: red 0-1, 1-2, 3-4; blue 2-3, 4-0;
        // x=0, z=2 in R and k = 2.
        let order = [0, 1, 2, 5, 6, 3, 4, 7, 8, 9];
        let cg = ColoredGraph::from_parts(10, &order, &[0, 2], &[(2, 3), (4, 0)], &[]).unwrap();
        let c = find_alternating_cycles(&cg, 5);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, CycleKind::ReddishType2);
    }

    fn gadget12() -> ColoredGraph {
        // Two copies of the alternating 4-cycle 0-1-4-3.
        ColoredGraph::from_parts(12, &cycle_order(12), &[1, 3, 7, 9], &[(1, 4), (3, 0), (7, 10), (9, 6)], &[]).unwrap()
    }

    #[test]
    fn equipotent_gadgets() {
        let cg = gadget12();
        let cycles = find_alternating_cycles(&cg, 4);
        assert_eq!(cycles.len(), 2);
        let pairs = equipotent_cycle_pairs(&cg, &cycles);
        assert_eq!(pairs.len(), 2);
        assert!(pairs[0].alignments.contains(&Alignment { shift: 0, reflected: false }));
        assert!(equipotent_cycle_pairs(&cg, &cycles[..1]).is_empty());
    }

    #[test]
    fn positive_instances_per_category() {
        let n = 100;
        let order = cycle_order(n);
        let caps = RareCaps::for_n(n);
        assert_eq!(caps.sqrt_n, 10);

        // (1) Four-cycle 0-1-51-52 plus the alternating path
        // 1 -blue- 30 -red- 31 -blue- 52.
        let cg = ColoredGraph::from_parts(n, &order, &[1, 52, 30], &[(1, 51), (52, 0), (30, 1), (31, 52)], &[]).unwrap();
        let rep = rare_configuration_report(&cg, caps).unwrap();
        assert!(rep.attached_paths >= 1, "{rep:?}");

        // (2) Six-cycle 0-1-40-41-70-71 with red pairs and blue links, plus
        // a chord 0-41 (blue from R vertex 0).
        let blue = [(1, 40), (41, 70), (71, 0), (0, 41)];
        let cg = ColoredGraph::from_parts(n, &order, &[1, 41, 71, 0], &blue, &[]).unwrap();
        let rep = rare_configuration_report(&cg, caps).unwrap();
        assert!(rep.internal_edges >= 1, "{rep:?}");

        // (3) Two four-cycles with red distance 3 (vertex 52 to 55).
        let blue = [(1, 51), (52, 0), (56, 96), (97, 55)];
        let cg = ColoredGraph::from_parts(n, &order, &[1, 52, 56, 97], &blue, &[]).unwrap();
        let rep = rare_configuration_report(&cg, caps).unwrap();
        assert_eq!(rep.cycles.len(), 2);
        assert_eq!(rep.close_cycle_pairs, 1);

        // (4) Four-cycle 0-1-5-6: segment 1..5 has length 4.
        let cg = ColoredGraph::from_parts(n, &order, &[1, 6], &[(1, 5), (6, 0)], &[]).unwrap();
        let rep = rare_configuration_report(&cg, caps).unwrap();
        assert_eq!(rep.short_red_segments, 1);
        // Far apart: no short segment.
        let cg = ColoredGraph::from_parts(n, &order, &[1, 51], &[(1, 50), (51, 0)], &[]).unwrap();
        assert_eq!(rare_configuration_report(&cg, caps).unwrap().short_red_segments, 0);

        // (5) Degree pattern 3,2,2,2,... repeated on two disjoint stretches.
        let cg = ColoredGraph::from_parts(n, &order, &[0, 40], &[(0, 20), (40, 60)], &[]).unwrap();
        assert!(twin_red_paths(&cg, 10) > 0);
    }

    #[test]
    fn twin_paths_counted_once() {
        // All degrees 2: any two disjoint windows match in both directions.
        let cg = ColoredGraph::from_parts(8, &cycle_order(8), &[], &[], &[]).unwrap();
        // Windows of 3 on C8: starts a < b with 3 <= b - a <= 5.
        let pairs = (0..8).flat_map(|a| (a + 1..8).map(move |b| (a, b))).filter(|&(a, b)| b - a >= 3 && 8 - (b - a) >= 3).count();
        assert_eq!(twin_red_paths(&cg, 3), 2 * pairs);
    }

    #[test]
    fn dense_input_rejected() {
        let cg = ColoredGraph::from_parts(6, &cycle_order(6), &[], &[], &[(0, 3)]).unwrap();
        assert!(matches!(rare_configuration_report(&cg, RareCaps::for_n(6)), Err(ColorError::NotSparse(1))));
    }

    #[test]
    fn helpers() {
        assert_eq!(ceil_sqrt(80), 9);
        assert_eq!(ceil_sqrt(81), 9);
        assert_eq!(ceil_sqrt(82), 10);
        assert_eq!(ceil_ln_squared(80), 20);
        let cg = ColoredGraph::from_parts(10, &cycle_order(10), &[], &[], &[]).unwrap();
        assert_eq!(cg.red_distance(&[0], &[7]), 3);
        let mut seg = cg.red_segments(&[2, 0, 5]);
        seg.sort();
        assert_eq!(seg, vec![2, 3, 5]);
    }
}
