//! Counting and finding copies of a small pattern graph by backtracking over
//! injective maps, with bitset candidate sets and a node budget.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::canon::{automorphisms, CanonError, CanonOptions};
use crate::graph::{Bits, SimpleGraph};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("pattern has {pattern} vertices, host only {host}")]
    PatternTooLarge { pattern: usize, host: usize },
    #[error("pattern graph is empty")]
    EmptyPattern,
    #[error(transparent)]
    Canon(#[from] CanonError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Non-edges of the pattern must map to non-edges.
    Induced,
    /// Only edges are constrained.
    Subgraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    /// Number of copies; a lower bound when censored.
    pub count: u64,
    pub censored: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// `map[i]` is the image of pattern vertex i.
    Found(Vec<usize>),
    Absent,
    Censored,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

struct Matcher<'a> {
    g: &'a SimpleGraph,
    order: Vec<usize>,
    /// For each depth: earlier depths adjacent / non-adjacent in the pattern.
    back_adj: Vec<Vec<usize>>,
    back_non: Vec<Vec<usize>>,
    need_degree: Vec<usize>,
    image: Vec<usize>,
    used: Bits,
    all: Bits,
    nodes: u64,
    budget: u64,
    maps: u64,
    stop_at_first: bool,
    censored: bool,
}

/// Search order: repeatedly the vertex with most already ordered
/// neighbours, ties by degree. `alternate` breaks ties the other way and
/// starts from the last vertex of smallest degree.
fn search_order(h: &SimpleGraph, alternate: bool) -> Vec<usize> {
    let n = h.n();
    let mut placed = vec![false; n];
    let mut back = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let key = |v: usize| (back[v], if alternate { n - h.degree(v) } else { h.degree(v) });
        let best = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| key(a).cmp(&key(b)).then(if alternate { a.cmp(&b) } else { b.cmp(&a) }))
            .expect("unplaced vertex remains");
        placed[best] = true;
        order.push(best);
        for &w in h.neighbors(best) {
            back[w] += 1;
        }
    }
    order
}

impl<'a> Matcher<'a> {
    fn new(g: &'a SimpleGraph, h: &SimpleGraph, mode: Mode, budget: u64, alternate: bool) -> Self {
        let order = search_order(h, alternate);
        let mut back_adj = Vec::new();
        let mut back_non = Vec::new();
        for (d, &v) in order.iter().enumerate() {
            let (a, b): (Vec<usize>, Vec<usize>) = (0..d).partition(|&e| h.has_edge(v, order[e]));
            back_adj.push(a);
            back_non.push(if mode == Mode::Induced { b } else { Vec::new() });
        }
        let mut all = Bits::new(g.n());
        for v in 0..g.n() {
            all.insert(v);
        }
        Matcher {
            g,
            need_degree: order.iter().map(|&v| h.degree(v)).collect(),
            order,
            back_adj,
            back_non,
            image: Vec::with_capacity(h.n()),
            used: Bits::new(g.n()),
            all,
            nodes: 0,
            budget,
            maps: 0,
            stop_at_first: false,
            censored: false,
        }
    }

    /// Returns true when the search should stop.
    fn extend(&mut self) -> bool {
        let d = self.image.len();
        if d == self.order.len() {
            self.maps += 1;
            return self.stop_at_first;
        }
        let mut cand = match self.back_adj[d].first() {
            Some(&e) => self.g.adjacency(self.image[e]).clone(),
            None => self.all.clone(),
        };
        for &e in self.back_adj[d].iter().skip(1) {
            cand.intersect_with(self.g.adjacency(self.image[e]));
        }
        for &e in &self.back_non[d] {
            cand.difference_with(self.g.adjacency(self.image[e]));
            cand.remove(self.image[e]);
        }
        cand.difference_with(&self.used);
        let need = self.need_degree[d];
        for w in cand.iter() {
            if self.g.degree(w) < need {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.censored = true;
                return true;
            }
            self.image.push(w);
            self.used.insert(w);
            let stop = self.extend();
            self.used.remove(w);
            if stop {
                return true;
            }
            self.image.pop();
        }
        false
    }

    fn embedding(&self) -> Vec<usize> {
        let mut map = vec![0; self.order.len()];
        for (d, &v) in self.order.iter().enumerate() {
            map[v] = self.image[d];
        }
        map
    }
}

fn check_sizes(g: &SimpleGraph, h: &SimpleGraph) -> Result<(), CountError> {
    if h.n() == 0 {
        return Err(CountError::EmptyPattern);
    }
    if h.n() > g.n() {
        return Err(CountError::PatternTooLarge { pattern: h.n(), host: g.n() });
    }
    Ok(())
}

pub fn automorphism_count(h: &SimpleGraph) -> Result<BigUint, CountError> {
    let cap = h.n().max(crate::canon::DEFAULT_CAP);
    Ok(automorphisms(h, None, CanonOptions::with_cap(cap))?.1)
}

fn count(g: &SimpleGraph, h: &SimpleGraph, mode: Mode, budget: u64) -> Result<CountResult, CountError> {
    check_sizes(g, h)?;
    let aut = automorphism_count(h)?.to_u64().unwrap_or(u64::MAX);
    let mut m = Matcher::new(g, h, mode, budget, false);
    m.extend();
    Ok(CountResult {
        count: m.maps / aut,
        censored: m.censored,
        nodes: m.nodes,
    })
}

/// Number of vertex sets S with g[S] isomorphic to h.
pub fn count_induced_copies(g: &SimpleGraph, h: &SimpleGraph, budget: u64) -> Result<CountResult, CountError> {
    count(g, h, Mode::Induced, budget)
}

/// Number of subgraphs of g isomorphic to h.
pub fn count_copies(g: &SimpleGraph, h: &SimpleGraph, budget: u64) -> Result<CountResult, CountError> {
    count(g, h, Mode::Subgraph, budget)
}

/// First induced copy found; `alternate` uses a different search order,
/// for independent re-verification.
pub fn find_copy(g: &SimpleGraph, h: &SimpleGraph, mode: Mode, budget: u64, alternate: bool) -> Result<SearchOutcome, CountError> {
    check_sizes(g, h)?;
    let mut m = Matcher::new(g, h, mode, budget, alternate);
    m.stop_at_first = true;
    m.extend();
    Ok(if m.censored {
        SearchOutcome::Censored
    } else if m.maps > 0 {
        SearchOutcome::Found(m.embedding())
    } else {
        SearchOutcome::Absent
    })
}

pub fn find_induced_copy(g: &SimpleGraph, h: &SimpleGraph, budget: u64) -> Result<SearchOutcome, CountError> {
    find_copy(g, h, Mode::Induced, budget, false)
}

/// Whether `map` embeds h into g as an induced (or plain) copy.
pub fn is_embedding(g: &SimpleGraph, h: &SimpleGraph, map: &[usize], mode: Mode) -> bool {
    if map.len() != h.n() || map.iter().any(|&x| x >= g.n()) {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    if !map.iter().all(|x| seen.insert(*x)) {
        return false;
    }
    (0..h.n()).all(|u| {
        (u + 1..h.n()).all(|v| {
            let he = h.has_edge(u, v);
            let ge = g.has_edge(map[u], map[v]);
            match mode {
                Mode::Induced => he == ge,
                Mode::Subgraph => !he || ge,
            }
        })
    })
}
