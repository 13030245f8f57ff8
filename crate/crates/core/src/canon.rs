//! Canonical labeling and automorphism groups by individualization-refinement.
//!
//! The search tree is the usual one: refine an ordered partition to an
//! equitable one, individualize each vertex of the first smallest non-singleton
//! cell, recurse. Leaves are compared by (trace, relabeled adjacency) and the
//! largest leaf wins. Automorphisms found along the way prune siblings on the
//! first path.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::graph::SimpleGraph;

pub const DEFAULT_CAP: usize = 64;
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("graph has {n} vertices, above the configured cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("search tree exceeded {0} nodes")]
    BudgetExceeded(u64),
    #[error("colour vector has length {got}, expected {expected}")]
    ColourLength { got: usize, expected: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct CanonOptions {
    pub cap: usize,
    pub node_budget: u64,
    /// Stop as soon as one nontrivial automorphism is known.
    pub stop_at_first_automorphism: bool,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions {
            cap: DEFAULT_CAP,
            node_budget: DEFAULT_NODE_BUDGET,
            stop_at_first_automorphism: false,
        }
    }
}

impl CanonOptions {
    pub fn with_cap(cap: usize) -> Self {
        CanonOptions { cap, ..Default::default() }
    }
}

/// Byte string identifying an isomorphism class (of coloured graphs, when
/// colours are supplied). Ordering is bytewise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(pub Vec<u8>);

impl CanonicalForm {
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CanonResult {
    pub form: CanonicalForm,
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<usize>,
    pub generators: Vec<Vec<usize>>,
    pub group_order: BigUint,
    /// False when the search stopped at the first automorphism, in which
    /// case `form` and `group_order` are not meaningful.
    pub complete: bool,
}

impl CanonResult {
    pub fn canonical_graph(&self, g: &SimpleGraph) -> SimpleGraph {
        g.relabel(&self.labeling)
    }
}

pub fn canonical_form(g: &SimpleGraph) -> Result<CanonicalForm, CanonError> {
    Ok(canonize(g, None, CanonOptions::default())?.form)
}

/// Canonical form of `g` with a vertex colouring. Isomorphisms must preserve
/// colour values.
pub fn canonize(g: &SimpleGraph, colours: Option<&[u32]>, opts: CanonOptions) -> Result<CanonResult, CanonError> {
    let n = g.n();
    if n > opts.cap {
        return Err(CanonError::CapExceeded { n, cap: opts.cap });
    }
    let zero;
    let colours = match colours {
        Some(c) => {
            if c.len() != n {
                return Err(CanonError::ColourLength { got: c.len(), expected: n });
            }
            c
        }
        None => {
            zero = vec![0u32; n];
            &zero
        }
    };
    let mut search = Search::new(g, colours, opts);
    search.run()?;
    Ok(search.finish())
}

/// Automorphism group order and generators.
pub fn automorphisms(g: &SimpleGraph, colours: Option<&[u32]>, opts: CanonOptions) -> Result<(Vec<Vec<usize>>, BigUint), CanonError> {
    let r = canonize(g, colours, opts)?;
    Ok((r.generators, r.group_order))
}

pub fn is_asymmetric(g: &SimpleGraph, opts: CanonOptions) -> Result<bool, CanonError> {
    let opts = CanonOptions { stop_at_first_automorphism: true, ..opts };
    let r = canonize(g, None, opts)?;
    Ok(r.generators.is_empty())
}

pub fn is_automorphism(g: &SimpleGraph, perm: &[usize]) -> bool {
    g.edges().all(|(u, v)| g.has_edge(perm[u], perm[v]))
}

/// One graph from each isomorphism class on n vertices, in canonical-form
/// order. Grown one vertex at a time: every graph on n vertices is a graph
/// on n - 1 vertices plus a vertex.
pub fn graphs_up_to_isomorphism(n: usize) -> Result<Vec<SimpleGraph>, CanonError> {
    let mut level = std::collections::BTreeMap::new();
    let g0 = SimpleGraph::empty(0);
    level.insert(canonical_form(&g0)?, g0);
    for k in 0..n {
        let mut next = std::collections::BTreeMap::new();
        for g in level.values() {
            for mask in 0u64..(1 << k) {
                let mut h = SimpleGraph::empty(k + 1);
                for (a, b) in g.edges() {
                    h.add_edge(a, b).expect("copied edge");
                }
                for v in 0..k {
                    if mask >> v & 1 == 1 {
                        h.add_edge(v, k).expect("new edge");
                    }
                }
                next.entry(canonical_form(&h)?).or_insert(h);
            }
        }
        level = next;
    }
    Ok(level.into_values().collect())
}

#[derive(Clone)]
struct Partition {
    lab: Vec<usize>,
    pos: Vec<usize>,
    /// Start position of the cell holding each vertex.
    cell_of: Vec<usize>,
    /// End (exclusive) of the cell starting at each position; meaningful
    /// only at cell starts.
    cell_end: Vec<usize>,
    cells: usize,
}

impl Partition {
    fn from_colours(colours: &[u32]) -> (Self, Vec<usize>) {
        let n = colours.len();
        let mut lab: Vec<usize> = (0..n).collect();
        lab.sort_by_key(|&v| (colours[v], v));
        let mut pos = vec![0; n];
        for (p, &v) in lab.iter().enumerate() {
            pos[v] = p;
        }
        let mut cell_of = vec![0; n];
        let mut cell_end = vec![0; n];
        let mut starts = Vec::new();
        let mut p = 0;
        while p < n {
            let mut e = p + 1;
            while e < n && colours[lab[e]] == colours[lab[p]] {
                e += 1;
            }
            for &v in &lab[p..e] {
                cell_of[v] = p;
            }
            cell_end[p] = e;
            starts.push(p);
            p = e;
        }
        let cells = starts.len();
        (
            Partition { lab, pos, cell_of, cell_end, cells },
            starts,
        )
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let n = self.lab.len();
        let mut best: Option<(usize, usize)> = None;
        let mut p = 0;
        while p < n {
            let e = self.cell_end[p];
            let size = e - p;
            if size > 1 && best.is_none_or(|(_, s)| size < s) {
                best = Some((p, size));
            }
            p = e;
        }
        best.map(|(p, _)| p)
    }

    /// Move `v` to the front of its cell and make it a singleton.
    fn individualize(&mut self, v: usize) -> usize {
        let c = self.cell_of[v];
        let e = self.cell_end[c];
        let pv = self.pos[v];
        let w = self.lab[c];
        self.lab.swap(c, pv);
        self.pos[w] = pv;
        self.pos[v] = c;
        self.cell_end[c] = c + 1;
        self.cell_end[c + 1] = e;
        for &u in &self.lab[c + 1..e] {
            self.cell_of[u] = c + 1;
        }
        self.cells += 1;
        c
    }
}

struct Refiner {
    count: Vec<u32>,
    touched: Vec<usize>,
    in_queue: Vec<bool>,
    scratch: Vec<(u32, usize)>,
}

impl Refiner {
    fn new(n: usize) -> Self {
        Refiner {
            count: vec![0; n],
            touched: Vec::new(),
            in_queue: vec![false; n],
            scratch: Vec::new(),
        }
    }

    /// Refine to the coarsest equitable partition finer than `part`,
    /// appending an invariant trace of every split.
    fn refine(&mut self, g: &SimpleGraph, part: &mut Partition, initial: &[usize], trace: &mut Vec<u64>) {
        let n = part.lab.len();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in initial {
            if !self.in_queue[s] {
                self.in_queue[s] = true;
                queue.push_back(s);
            }
        }
        let mut splitter = Vec::new();
        let mut cells_hit = Vec::new();
        while let Some(ws) = queue.pop_front() {
            self.in_queue[ws] = false;
            if part.is_discrete() {
                continue;
            }
            splitter.clear();
            splitter.extend_from_slice(&part.lab[ws..part.cell_end[ws]]);
            for &w in &splitter {
                for &u in g.neighbors(w) {
                    if self.count[u] == 0 {
                        self.touched.push(u);
                    }
                    self.count[u] += 1;
                }
            }
            cells_hit.clear();
            cells_hit.extend(self.touched.iter().map(|&u| part.cell_of[u]));
            cells_hit.sort_unstable();
            cells_hit.dedup();
            for &c in &cells_hit {
                let e = part.cell_end[c];
                if e - c == 1 {
                    continue;
                }
                self.scratch.clear();
                self.scratch
                    .extend(part.lab[c..e].iter().map(|&v| (self.count[v], v)));
                let first = self.scratch[0].0;
                if self.scratch.iter().all(|&(k, _)| k == first) {
                    continue;
                }
                self.scratch.sort_by_key(|&(k, _)| k);
                trace.push(c as u64);
                let was_queued = self.in_queue[c];
                let mut start = c;
                for i in 0..self.scratch.len() {
                    let (k, v) = self.scratch[i];
                    let p = c + i;
                    part.lab[p] = v;
                    part.pos[v] = p;
                    if i > 0 && k != self.scratch[i - 1].0 {
                        part.cell_end[start] = p;
                        trace.push(((self.scratch[i - 1].0 as u64) << 32) | (p - start) as u64);
                        if !(start == c && was_queued) && !self.in_queue[start] {
                            self.in_queue[start] = true;
                            queue.push_back(start);
                        }
                        start = p;
                        part.cells += 1;
                    }
                    part.cell_of[v] = start;
                }
                part.cell_end[start] = e;
                trace.push(((self.scratch[self.scratch.len() - 1].0 as u64) << 32) | (e - start) as u64);
                if !self.in_queue[start] {
                    self.in_queue[start] = true;
                    queue.push_back(start);
                }
            }
            for &u in &self.touched {
                self.count[u] = 0;
            }
            self.touched.clear();
        }
        for &s in &queue {
            self.in_queue[s] = false;
        }
        let _ = n;
        trace.push(u64::MAX);
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct LeafKey {
    traces: Vec<Vec<u64>>,
    bits: Vec<u64>,
}

enum Step {
    Continue,
    Unwind(usize),
    Stop,
}

struct Search<'a> {
    g: &'a SimpleGraph,
    colours: &'a [u32],
    opts: CanonOptions,
    refiner: Refiner,
    nodes: u64,
    first: Option<(LeafKey, Vec<usize>)>,
    best: Option<(LeafKey, Vec<usize>)>,
    first_path: Vec<usize>,
    generators: Vec<Vec<usize>>,
    stopped: bool,
}

impl<'a> Search<'a> {
    fn new(g: &'a SimpleGraph, colours: &'a [u32], opts: CanonOptions) -> Self {
        Search {
            g,
            colours,
            opts,
            refiner: Refiner::new(g.n()),
            nodes: 0,
            first: None,
            best: None,
            first_path: Vec::new(),
            generators: Vec::new(),
            stopped: false,
        }
    }

    fn run(&mut self) -> Result<(), CanonError> {
        let n = self.g.n();
        if n == 0 {
            let key = LeafKey { traces: vec![], bits: vec![] };
            self.first = Some((key.clone(), vec![]));
            self.best = Some((key, vec![]));
            return Ok(());
        }
        let (mut part, starts) = Partition::from_colours(self.colours);
        let mut trace = Vec::new();
        for &s in &starts {
            trace.push(((s as u64) << 32) | (part.cell_end[s] - s) as u64);
        }
        self.refiner.refine(self.g, &mut part, &starts, &mut trace);
        let mut traces = vec![trace];
        let mut path = Vec::new();
        self.descend(&part, &mut traces, &mut path, true)?;
        Ok(())
    }

    fn leaf_bits(&self, lab: &[usize]) -> Vec<u64> {
        let n = lab.len();
        let total = n * n.saturating_sub(1) / 2;
        let mut bits = vec![0u64; total.div_ceil(64)];
        let mut k = 0;
        for i in 0..n {
            let row = self.g.adjacency(lab[i]);
            for &lj in &lab[i + 1..n] {
                if row.contains(lj) {
                    bits[k >> 6] |= 1 << (63 - (k & 63));
                }
                k += 1;
            }
        }
        bits
    }

    fn prefix_cmp(a: &[Vec<u64>], b: &[Vec<u64>]) -> std::cmp::Ordering {
        let l = a.len().min(b.len());
        a[..l].cmp(&b[..l])
    }

    fn descend(
        &mut self,
        part: &Partition,
        traces: &mut Vec<Vec<u64>>,
        path: &mut Vec<usize>,
        on_first_path: bool,
    ) -> Result<Step, CanonError> {
        self.nodes += 1;
        if self.nodes > self.opts.node_budget {
            return Err(CanonError::BudgetExceeded(self.opts.node_budget));
        }
        let level = path.len();
        if !on_first_path {
            let first_eq = self
                .first
                .as_ref()
                .is_some_and(|(k, _)| Self::prefix_cmp(traces, &k.traces).is_eq());
            let worse = self
                .best
                .as_ref()
                .is_some_and(|(k, _)| Self::prefix_cmp(traces, &k.traces).is_lt());
            if worse && !first_eq {
                return Ok(Step::Continue);
            }
        }
        if part.is_discrete() {
            return Ok(self.leaf(part, traces, path));
        }
        let target = part.target_cell().expect("non-discrete partition has a target cell");
        let cell: Vec<usize> = part.lab[target..part.cell_end[target]].to_vec();
        let mut explored: Vec<usize> = Vec::new();
        for (idx, &v) in cell.iter().enumerate() {
            let child_first = on_first_path && idx == 0;
            if on_first_path && idx > 0 {
                let orbits = self.stabilizer_orbits(path);
                if explored.iter().any(|&w| orbits[w] == orbits[v]) {
                    continue;
                }
            }
            let mut child = part.clone();
            let s = child.individualize(v);
            let mut trace = vec![s as u64];
            self.refiner.refine(self.g, &mut child, &[s], &mut trace);
            traces.push(trace);
            path.push(v);
            if child_first {
                self.first_path.push(v);
            }
            let step = self.descend(&child, traces, path, child_first)?;
            path.pop();
            traces.pop();
            explored.push(v);
            match step {
                Step::Stop => return Ok(Step::Stop),
                Step::Unwind(l) if l < level => return Ok(Step::Unwind(l)),
                _ => {}
            }
        }
        Ok(Step::Continue)
    }

    fn leaf(&mut self, part: &Partition, traces: &[Vec<u64>], path: &[usize]) -> Step {
        let level = path.len();
        let key = LeafKey {
            traces: traces.to_vec(),
            bits: self.leaf_bits(&part.lab),
        };
        let colours_match = |other: &[usize]| {
            other
                .iter()
                .zip(&part.lab)
                .all(|(&a, &b)| self.colours[a] == self.colours[b])
        };
        let Some((first_key, first_lab)) = self.first.clone() else {
            self.first = Some((key.clone(), part.lab.clone()));
            self.best = Some((key, part.lab.clone()));
            return Step::Continue;
        };
        if key.bits == first_key.bits && colours_match(&first_lab) {
            let gamma = Self::map_between(&first_lab, &part.lab);
            self.push_generator(gamma);
            if self.opts.stop_at_first_automorphism {
                self.stopped = true;
                return Step::Stop;
            }
            if key.traces == first_key.traces {
                // The subtree below the divergence point is the image of the
                // first path's subtree.
                let diverge = path
                    .iter()
                    .zip(&self.first_path)
                    .position(|(a, b)| a != b)
                    .unwrap_or(level);
                return Step::Unwind(diverge);
            }
            return Step::Continue;
        }
        let (best_key, best_lab) = self.best.clone().expect("best set with first");
        if key.bits == best_key.bits && colours_match(&best_lab) {
            let gamma = Self::map_between(&best_lab, &part.lab);
            self.push_generator(gamma);
            if self.opts.stop_at_first_automorphism {
                self.stopped = true;
                return Step::Stop;
            }
        }
        if key > best_key {
            self.best = Some((key, part.lab.clone()));
        }
        Step::Continue
    }

    fn map_between(from: &[usize], to: &[usize]) -> Vec<usize> {
        let mut gamma = vec![0; from.len()];
        for (a, b) in from.iter().zip(to) {
            gamma[*a] = *b;
        }
        gamma
    }

    fn push_generator(&mut self, gamma: Vec<usize>) {
        if gamma.iter().enumerate().all(|(i, &x)| i == x) {
            return;
        }
        debug_assert!(is_automorphism(self.g, &gamma));
        if !self.generators.contains(&gamma) {
            self.generators.push(gamma);
        }
    }

    /// Orbit representatives under generators fixing `prefix` pointwise.
    fn stabilizer_orbits(&self, prefix: &[usize]) -> Vec<usize> {
        let n = self.g.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for gamma in &self.generators {
            if prefix.iter().any(|&v| gamma[v] != v) {
                continue;
            }
            for (i, &j) in gamma.iter().enumerate() {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    fn finish(self) -> CanonResult {
        let n = self.g.n();
        let (_, best_lab) = self.best.clone().expect("search produced a leaf");
        let mut labeling = vec![0; n];
        for (p, &v) in best_lab.iter().enumerate() {
            labeling[v] = p;
        }
        let mut bytes = Vec::with_capacity(4 + 4 * n + n * n / 16);
        bytes.extend_from_slice(&(n as u32).to_be_bytes());
        for &v in &best_lab {
            bytes.extend_from_slice(&self.colours[v].to_be_bytes());
        }
        for w in self.leaf_bits(&best_lab) {
            bytes.extend_from_slice(&w.to_be_bytes());
        }
        let mut order = BigUint::one();
        if !self.stopped {
            for level in 0..self.first_path.len() {
                let orbits = self.stabilizer_orbits(&self.first_path[..level]);
                let v = self.first_path[level];
                let size = orbits.iter().filter(|&&o| o == orbits[v]).count();
                order *= BigUint::from(size);
            }
        }
        CanonResult {
            form: CanonicalForm(bytes),
            labeling,
            generators: self.generators,
            group_order: order,
            complete: !self.stopped,
        }
    }
}
