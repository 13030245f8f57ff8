//! Rooted graphs (extensions), their density class, safety and rigidity,
//! and extension counting.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::EfError;
use crate::canon::{automorphisms, CanonOptions};
use crate::graph::{Bits, SimpleGraph};

/// Largest number of nonroots for subset enumeration.
pub const SUBSET_CAP: usize = 16;
/// Largest number of nonroots for extension counting and automorphisms.
pub const COUNT_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Sparse,
    Dense,
}

/// Sparse iff v - alpha e > 0. An exact tie means the rational stand-in for
/// alpha is not precise enough to decide.
pub fn classify_type(v: usize, e: usize, alpha: &BigRational) -> Result<Density, EfError> {
    let x = BigRational::from_integer(BigInt::from(v)) - alpha * BigInt::from(e);
    if x.is_zero() {
        return Err(EfError::Tie { v, e });
    }
    Ok(if x.is_positive() { Density::Sparse } else { Density::Dense })
}

/// Roots are vertices `0..r`, nonroots `r..r+v`. Edges between two roots
/// are not part of a rooted graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    r: usize,
    graph: SimpleGraph,
}

impl RootedGraph {
    pub fn new<I>(r: usize, v: usize, edges: I) -> Result<Self, EfError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if v == 0 {
            return Err(EfError::BadRootedGraph("no nonroot vertices".into()));
        }
        let graph = SimpleGraph::from_edges(r + v, edges).map_err(|e| EfError::BadRootedGraph(e.to_string()))?;
        if let Some((a, b)) = graph.edges().find(|&(a, b)| a < r && b < r) {
            return Err(EfError::BadRootedGraph(format!("edge {a}-{b} joins two roots")));
        }
        Ok(RootedGraph { r, graph })
    }

    /// The rooted graph (roots, g[roots + nonroots]) with root-root edges
    /// dropped. Roots keep their order, then nonroots in the given order.
    pub fn from_host(g: &SimpleGraph, roots: &[usize], nonroots: &[usize]) -> Result<Self, EfError> {
        let all: Vec<usize> = roots.iter().chain(nonroots).copied().collect();
        let r = roots.len();
        let mut edges = Vec::new();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if j >= r && g.has_edge(all[i], all[j]) {
                    edges.push((i, j));
                }
            }
        }
        RootedGraph::new(r, nonroots.len(), edges)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn v(&self) -> usize {
        self.graph.n() - self.r
    }

    pub fn e(&self) -> usize {
        self.graph.m()
    }

    pub fn ty(&self) -> (usize, usize) {
        (self.v(), self.e())
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn is_root(&self, x: usize) -> bool {
        x < self.r
    }

    fn profile(&self) -> Profile {
        let r = self.r;
        let v = self.v();
        let mut root_deg = vec![0; v];
        let mut adj = vec![0u32; v];
        for (a, b) in self.graph.edges() {
            if a < r {
                root_deg[b - r] += 1;
            } else {
                adj[a - r] |= 1 << (b - r);
                adj[b - r] |= 1 << (a - r);
            }
        }
        Profile { root_deg, adj }
    }

    fn check_subset_cap(&self) -> Result<(), EfError> {
        if self.v() > SUBSET_CAP {
            return Err(EfError::TooLarge { what: "nonroots", size: self.v(), cap: SUBSET_CAP });
        }
        Ok(())
    }

    pub fn classify(&self, alpha: &BigRational) -> Result<Density, EfError> {
        classify_type(self.v(), self.e(), alpha)
    }

    /// Every (R, H[S]) with R strictly inside S is sparse.
    pub fn is_safe(&self, alpha: &BigRational) -> Result<bool, EfError> {
        self.check_subset_cap()?;
        let p = self.profile();
        for mask in 1..(1u32 << self.v()) {
            let (v, e) = p.sub_type(mask);
            if classify_type(v, e, alpha)? == Density::Dense {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every (S, H) with S a proper superset-or-equal of R missing some
    /// vertex is dense.
    pub fn is_rigid(&self, alpha: &BigRational) -> Result<bool, EfError> {
        self.check_subset_cap()?;
        self.profile().is_rigid(alpha)
    }

    /// Nonroot subset A (as nonroot indices) such that (R, H[R + A]) is
    /// rigid, if any.
    pub fn rigid_subextension(&self, alpha: &BigRational) -> Result<Option<Vec<usize>>, EfError> {
        self.check_subset_cap()?;
        let p = self.profile();
        for mask in 1..(1u32 << self.v()) {
            if p.restrict(mask).is_rigid(alpha)? {
                return Ok(Some(bits_of(mask)));
            }
        }
        Ok(None)
    }

    /// Root-preserving automorphisms: permutations of the nonroots fixing
    /// every root.
    pub fn automorphism_count(&self) -> Result<BigUint, EfError> {
        if self.v() > COUNT_CAP {
            return Err(EfError::TooLarge { what: "nonroots", size: self.v(), cap: COUNT_CAP });
        }
        let colours: Vec<u32> = (0..self.graph.n()).map(|x| if x < self.r { x as u32 + 1 } else { 0 }).collect();
        let (_, order) = automorphisms(&self.graph, Some(&colours), CanonOptions::with_cap(self.graph.n().max(64)))?;
        Ok(order)
    }
}

fn bits_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Nonroot view of an extension: edges to roots per nonroot and adjacency
/// among nonroots. Density questions only depend on this.
#[derive(Clone, Debug)]
pub(crate) struct Profile {
    pub root_deg: Vec<usize>,
    pub adj: Vec<u32>,
}

impl Profile {
    fn internal(&self, mask: u32) -> usize {
        bits_of(mask).iter().map(|&i| (self.adj[i] & mask).count_ones() as usize).sum::<usize>() / 2
    }

    /// Type of (R, H[R + A]).
    fn sub_type(&self, mask: u32) -> (usize, usize) {
        let roots: usize = bits_of(mask).iter().map(|&i| self.root_deg[i]).sum();
        (mask.count_ones() as usize, roots + self.internal(mask))
    }

    /// Type of (R + (all minus W), H): nonroots W.
    fn nail_type(&self, w: u32) -> (usize, usize) {
        let all = (1u32 << self.adj.len()) - 1;
        let rest = all & !w;
        let cross: usize = bits_of(w).iter().map(|&i| (self.adj[i] & rest).count_ones() as usize).sum();
        let (v, e) = self.sub_type(w);
        (v, e + cross)
    }

    /// The extension (R, H[R + A]) with A's vertices renumbered.
    fn restrict(&self, mask: u32) -> Profile {
        let idx = bits_of(mask);
        let adj = idx
            .iter()
            .map(|&i| idx.iter().enumerate().filter(|&(_, &j)| self.adj[i] >> j & 1 == 1).fold(0u32, |m, (k, _)| m | 1 << k))
            .collect();
        Profile { root_deg: idx.iter().map(|&i| self.root_deg[i]).collect(), adj }
    }

    pub fn is_rigid(&self, alpha: &BigRational) -> Result<bool, EfError> {
        for w in 1..(1u32 << self.adj.len()) {
            let (v, e) = self.nail_type(w);
            if classify_type(v, e, alpha)? == Density::Sparse {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Extension of `base` by `z` inside g.
    pub fn over(g: &SimpleGraph, base: &Bits, z: &[usize]) -> Profile {
        let root_deg = z.iter().map(|&x| g.neighbors(x).iter().filter(|&&y| base.contains(y)).count()).collect();
        let adj = z
            .iter()
            .map(|&a| z.iter().enumerate().filter(|&(_, &b)| g.has_edge(a, b)).fold(0u32, |m, (k, _)| m | 1 << k))
            .collect();
        Profile { root_deg, adj }
    }
}

/// Number of tuples y of distinct vertices outside x with every edge of
/// rg present (root i at x[i], nonroot j at y[j]); extra edges allowed.
pub fn count_extensions(g: &SimpleGraph, x: &[usize], rg: &RootedGraph) -> Result<u64, EfError> {
    if rg.v() > COUNT_CAP {
        return Err(EfError::TooLarge { what: "nonroots", size: rg.v(), cap: COUNT_CAP });
    }
    check_roots(g, x, rg)?;
    let r = rg.r();
    let mut used = Bits::new(g.n());
    for &a in x {
        used.insert(a);
    }
    let mut all = Bits::new(g.n());
    for i in 0..g.n() {
        all.insert(i);
    }
    let mut y = Vec::with_capacity(rg.v());
    let mut total = 0u64;
    extend_tuple(g, x, rg, r, &all, &mut used, &mut y, &mut total);
    Ok(total)
}

fn check_roots(g: &SimpleGraph, x: &[usize], rg: &RootedGraph) -> Result<(), EfError> {
    if x.len() != rg.r() {
        return Err(EfError::LengthMismatch { left: x.len(), right: rg.r() });
    }
    for (i, &a) in x.iter().enumerate() {
        if a >= g.n() {
            return Err(EfError::NotExtension(format!("root vertex {a} out of range")));
        }
        if x[..i].contains(&a) {
            return Err(EfError::NotExtension(format!("root vertex {a} repeated")));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extend_tuple(g: &SimpleGraph, x: &[usize], rg: &RootedGraph, r: usize, all: &Bits, used: &mut Bits, y: &mut Vec<usize>, total: &mut u64) {
    let j = y.len();
    if j == rg.v() {
        *total += 1;
        return;
    }
    let me = r + j;
    let mut cand = all.clone();
    for &nb in rg.graph().neighbors(me) {
        if nb < r {
            cand.intersect_with(g.adjacency(x[nb]));
        } else if nb < me {
            cand.intersect_with(g.adjacency(y[nb - r]));
        }
    }
    cand.difference_with(used);
    for c in cand.iter().collect::<Vec<_>>() {
        used.insert(c);
        y.push(c);
        extend_tuple(g, x, rg, r, all, used, y, total);
        y.pop();
        used.remove(c);
    }
}

/// Expected number of extension tuples in G(n, p), (n - r)_v p^e, and the
/// same divided by the root-preserving automorphism count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionExpectation {
    pub tuples: BigRational,
    pub unordered: BigRational,
    pub automorphisms: BigUint,
}

pub fn expected_extensions(n: usize, p: &BigRational, rg: &RootedGraph) -> Result<ExtensionExpectation, EfError> {
    let a = rg.automorphism_count()?;
    let free = n.saturating_sub(rg.r());
    let falling = (0..rg.v()).fold(BigInt::one(), |acc, i| acc * BigInt::from(free.saturating_sub(i)));
    let tuples = BigRational::from_integer(falling) * num_traits::pow(p.clone(), rg.e());
    let unordered = &tuples / BigRational::from_integer(BigInt::from(a.clone()));
    Ok(ExtensionExpectation { tuples, unordered, automorphisms: a })
}

pub fn expected_extensions_f64(n: usize, p: &BigRational, rg: &RootedGraph) -> Result<f64, EfError> {
    let e = expected_extensions(n, p, rg)?;
    Ok(e.tuples.numer().to_f64().unwrap_or(f64::NAN) / e.tuples.denom().to_f64().unwrap_or(f64::NAN))
}
