//! Labeled simple graphs and multigraphs.
//!
//! Vertices are `0..n` inside the library. Every user-facing surface (edge-list
//! files, JSON sidecars, CLI output, emitted sentences) is 1-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    Duplicate(usize, usize),
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("vertex {0} listed twice")]
    RepeatedVertex(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: endpoint {vertex} outside 1..={n}")]
    OutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    Duplicate { line: usize, u: usize, v: usize },
    #[error("line {line}: loop at {vertex}")]
    Loop { line: usize, vertex: usize },
    #[error("missing vertex count")]
    MissingHeader,
}

/// Fixed-width bitset over `0..n`, used for adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersect_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn difference_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

/// A labeled undirected simple graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    m: usize,
    adj: Vec<Bits>,
    nbrs: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            n,
            m: 0,
            adj: (0..n).map(|_| Bits::new(n)).collect(),
            nbrs: vec![Vec::new(); n],
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = SimpleGraph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_unchecked(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut g = SimpleGraph::empty(n);
        for i in 0..n {
            g.insert_unchecked(i, (i + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for i in 1..n {
            g.insert_unchecked(i - 1, i);
        }
        g
    }

    /// Star with center `0` and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut g = SimpleGraph::empty(leaves + 1);
        for i in 1..=leaves {
            g.insert_unchecked(0, i);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::OutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::Loop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::Duplicate(u.min(v), u.max(v)));
        }
        self.insert_unchecked(u, v);
        Ok(())
    }

    fn insert_unchecked(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        let pos = self.nbrs[u].partition_point(|&x| x < v);
        self.nbrs[u].insert(pos, v);
        let pos = self.nbrs[v].partition_point(|&x| x < u);
        self.nbrs[v].insert(pos, u);
        self.m += 1;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || !self.has_edge(u, v) {
            return false;
        }
        self.adj[u].remove(v);
        self.adj[v].remove(u);
        self.nbrs[u].retain(|&x| x != v);
        self.nbrs[v].retain(|&x| x != u);
        self.m -= 1;
        true
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    #[inline]
    pub fn adjacency(&self, v: usize) -> &Bits {
        &self.adj[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.nbrs.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.nbrs.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.nbrs.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.nbrs[u]
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Exact density `e/v`.
    pub fn density(&self) -> BigRational {
        assert!(self.n >= 1, "density of the null graph is undefined");
        BigRational::new(BigInt::from(self.m), BigInt::from(self.n))
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.nbrs[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Number of edges with both endpoints in `set` (given as a bitset).
    pub fn edges_within(&self, set: &Bits) -> usize {
        let mut twice = 0;
        for u in set.iter() {
            let row = &self.adj[u];
            twice += row
                .words()
                .iter()
                .zip(set.words())
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum::<usize>();
        }
        twice / 2
    }

    /// Induced subgraph on `vertices`; vertex `i` of the result is
    /// `vertices[i]` of `self`. The returned map is that same list.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(SimpleGraph, Vec<usize>), GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::EmptyVertexSet);
        }
        let mut seen = Bits::new(self.n);
        for &v in vertices {
            if v >= self.n {
                return Err(GraphError::OutOfRange { vertex: v, n: self.n });
            }
            if seen.contains(v) {
                return Err(GraphError::RepeatedVertex(v));
            }
            seen.insert(v);
        }
        let mut h = SimpleGraph::empty(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    h.insert_unchecked(i, j);
                }
            }
        }
        Ok((h, vertices.to_vec()))
    }

    /// Relabel: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> SimpleGraph {
        assert_eq!(perm.len(), self.n);
        let mut h = SimpleGraph::empty(self.n);
        for (u, v) in self.edges() {
            h.insert_unchecked(perm[u], perm[v]);
        }
        h
    }

    pub fn complement(&self) -> SimpleGraph {
        let mut h = SimpleGraph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    h.insert_unchecked(u, v);
                }
            }
        }
        h
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> SimpleGraph {
        let mut h = SimpleGraph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            h.insert_unchecked(u, v);
        }
        for (u, v) in other.edges() {
            h.insert_unchecked(u + self.n, v + self.n);
        }
        h
    }

    pub fn to_multigraph(&self) -> MultiGraph {
        let mut mg = MultiGraph::new(self.n);
        for (u, v) in self.edges() {
            mg.add_edge(u, v);
        }
        mg
    }

    /// Parse the edge-list text format: a first line holding `n`, then one
    /// `u v` line per edge, 1-based. `#` starts a comment.
    pub fn parse_edge_list(text: &str) -> Result<SimpleGraph, ParseError> {
        let mut graph: Option<SimpleGraph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| ParseError::Malformed {
                    line: line_no,
                    msg: format!("not a nonnegative integer: {s:?}"),
                })
            };
            match graph.as_mut() {
                None => {
                    if fields.len() != 1 {
                        return Err(ParseError::Malformed {
                            line: line_no,
                            msg: "expected the vertex count alone on the first line".into(),
                        });
                    }
                    graph = Some(SimpleGraph::empty(parse(fields[0])?));
                }
                Some(g) => {
                    if fields.len() != 2 {
                        return Err(ParseError::Malformed {
                            line: line_no,
                            msg: format!("expected two endpoints, found {} fields", fields.len()),
                        });
                    }
                    let u = parse(fields[0])?;
                    let v = parse(fields[1])?;
                    for w in [u, v] {
                        if w == 0 || w > g.n {
                            return Err(ParseError::OutOfRange { line: line_no, vertex: w, n: g.n });
                        }
                    }
                    if u == v {
                        return Err(ParseError::Loop { line: line_no, vertex: u });
                    }
                    if g.has_edge(u - 1, v - 1) {
                        return Err(ParseError::Duplicate { line: line_no, u, v });
                    }
                    g.insert_unchecked(u - 1, v - 1);
                }
            }
        }
        graph.ok_or(ParseError::MissingHeader)
    }

    pub fn write_edge_list(&self) -> String {
        let mut out = String::with_capacity(8 * (self.m + 1));
        let _ = writeln!(out, "{}", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
        out
    }
}

/// Undirected multigraph on `0..n`; loops allowed, multiplicities kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    mult: BTreeMap<(usize, usize), u32>,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { n, mult: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "endpoint out of range");
        *self.mult.entry((u.min(v), u.max(v))).or_insert(0) += 1;
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.mult.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// Edge count with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.mult.values().map(|&k| k as usize).sum()
    }

    /// Degree; a loop contributes 2.
    pub fn degree(&self, v: usize) -> usize {
        self.mult
            .iter()
            .map(|(&(a, b), &k)| {
                let k = k as usize;
                match (a == v, b == v) {
                    (true, true) => 2 * k,
                    (true, false) | (false, true) => k,
                    _ => 0,
                }
            })
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for (&(a, b), &k) in &self.mult {
            d[a] += k as usize;
            d[b] += k as usize;
        }
        d
    }

    /// Multiset sum on a common vertex set.
    pub fn sum(&self, other: &MultiGraph) -> MultiGraph {
        assert_eq!(self.n, other.n, "summands must share a vertex set");
        let mut out = self.clone();
        for (&e, &k) in &other.mult {
            *out.mult.entry(e).or_insert(0) += k;
        }
        out
    }

    pub fn is_simple(&self) -> bool {
        self.mult.iter().all(|(&(a, b), &k)| a != b && k == 1)
    }

    pub fn to_simple(&self) -> Option<SimpleGraph> {
        if !self.is_simple() {
            return None;
        }
        let mut g = SimpleGraph::empty(self.n);
        for &(a, b) in self.mult.keys() {
            g.insert_unchecked(a, b);
        }
        Some(g)
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.mult.iter().map(|(&e, &k)| (e, k))
    }
}
