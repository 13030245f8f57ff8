//! Permutations of the vertex set and the orbits they induce on vertex pairs.

use std::collections::BTreeMap;

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::SimpleGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not a permutation of 0..{0}")]
pub struct NotAPermutation(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, NotAPermutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(NotAPermutation(n));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, NotAPermutation> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= n || touched[x] {
                    return Err(NotAPermutation(n));
                }
                touched[x] = true;
                images[x] = c[(i + 1) % c.len()];
            }
        }
        Permutation::new(images)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            images.swap(i, j);
        }
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Cycles in order of their smallest element, each starting there.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut x = self.images[s];
            while x != s {
                seen[x] = true;
                c.push(x);
                x = self.images[x];
            }
            out.push(c);
        }
        out
    }

    /// For each point: (cycle index, position inside the cycle, cycle length).
    fn cycle_positions(&self) -> Vec<(usize, usize, usize)> {
        let mut out = vec![(0, 0, 0); self.n()];
        for (ci, c) in self.cycles().iter().enumerate() {
            for (p, &x) in c.iter().enumerate() {
                out[x] = (ci, p, c.len());
            }
        }
        out
    }
}

/// Every permutation of `0..n` in lexicographic order. Meant for n <= 8.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Size of the orbit of the pair {u, v} under the cyclic group generated by
/// `sigma`, from the cycle structure alone.
pub fn edge_orbit_size(sigma: &Permutation, u: usize, v: usize) -> usize {
    assert!(u != v, "a pair needs two distinct points");
    let pos = sigma.cycle_positions();
    let (c1, p1, l1) = pos[u];
    let (c2, p2, l2) = pos[v];
    if c1 != c2 {
        l1.lcm(&l2)
    } else if l1 % 2 == 0 && (p1 + l1 - p2) % l1 == l1 / 2 {
        l1 / 2
    } else {
        l1
    }
}

/// Pair type: (i, j) with i <= j for points in S_i, S_j, where S_4 holds
/// points on cycles of length at least 4; (0, 2) and (0, 4) for opposite
/// points of an even cycle.
pub type PairType = (u8, u8);

/// Minimum orbit size of each pair type over all permutations.
pub const H_TABLE: [(PairType, usize); 12] = [
    ((0, 2), 1),
    ((0, 4), 2),
    ((1, 1), 1),
    ((1, 2), 2),
    ((1, 3), 3),
    ((1, 4), 4),
    ((2, 2), 2),
    ((2, 3), 6),
    ((2, 4), 4),
    ((3, 3), 3),
    ((3, 4), 6),
    ((4, 4), 4),
];

pub fn h_table() -> BTreeMap<PairType, usize> {
    H_TABLE.iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    /// Sizes of S_1..S_4.
    pub s: [usize; 4],
    /// Number of pairs of each type.
    pub t: BTreeMap<String, usize>,
    /// Smallest observed orbit of each populated type.
    pub h: BTreeMap<String, usize>,
    /// Orbits as lists of pairs (u, v), u < v; each list starts at its
    /// smallest pair.
    pub orbits: Vec<Vec<(usize, usize)>>,
}

pub fn type_key(t: PairType) -> String {
    format!("{}{}", t.0, t.1)
}

pub fn pair_type(sigma: &Permutation, u: usize, v: usize) -> PairType {
    let pos = sigma.cycle_positions();
    pair_type_with(&pos, u, v)
}

fn class(len: usize) -> u8 {
    len.min(4) as u8
}

fn pair_type_with(pos: &[(usize, usize, usize)], u: usize, v: usize) -> PairType {
    let (c1, p1, l1) = pos[u];
    let (c2, p2, l2) = pos[v];
    if c1 == c2 && l1 % 2 == 0 && (p1 + l1 - p2) % l1 == l1 / 2 {
        return (0, class(l1));
    }
    let (a, b) = (class(l1), class(l2));
    (a.min(b), a.max(b))
}

/// Orbit partition of all pairs by explicit iteration, with the type
/// statistics.
pub fn orbit_report(sigma: &Permutation) -> OrbitReport {
    let n = sigma.n();
    let pos = sigma.cycle_positions();
    let mut s = [0usize; 4];
    for &(_, _, l) in &pos {
        s[class(l) as usize - 1] += 1;
    }
    let index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        a * n + b
    };
    let mut assigned = vec![false; n * n];
    let mut orbits = Vec::new();
    let mut t: BTreeMap<String, usize> = BTreeMap::new();
    let mut h: BTreeMap<String, usize> = BTreeMap::new();
    for u in 0..n {
        for v in u + 1..n {
            if assigned[index(u, v)] {
                continue;
            }
            let mut orbit = Vec::new();
            let (mut a, mut b) = (u, v);
            loop {
                let (x, y) = (a.min(b), a.max(b));
                if assigned[index(x, y)] {
                    break;
                }
                assigned[index(x, y)] = true;
                orbit.push((x, y));
                a = sigma.apply(a);
                b = sigma.apply(b);
            }
            let key = type_key(pair_type_with(&pos, u, v));
            *t.entry(key.clone()).or_default() += orbit.len();
            let e = h.entry(key).or_insert(usize::MAX);
            *e = (*e).min(orbit.len());
            orbits.push(orbit);
        }
    }
    OrbitReport { s, t, h, orbits }
}

pub fn is_automorphism(g: &SimpleGraph, sigma: &Permutation) -> bool {
    g.n() == sigma.n() && g.edges().all(|(u, v)| g.has_edge(sigma.apply(u), sigma.apply(v)))
}

/// True when some orbit has pairs both inside and outside E(g).
pub fn splits_orbits(g: &SimpleGraph, report: &OrbitReport) -> bool {
    report.orbits.iter().any(|o| {
        let inside = o.iter().filter(|&&(u, v)| g.has_edge(u, v)).count();
        inside != 0 && inside != o.len()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orbit_size_examples() {
        let s = Permutation::from_cycles(5, &[&[0, 1, 2], &[3, 4]]).unwrap();
        assert_eq!(edge_orbit_size(&s, 0, 3), 6);
        let s = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        assert_eq!(edge_orbit_size(&s, 0, 2), 2);
        assert_eq!(edge_orbit_size(&s, 0, 1), 4);
        let id = Permutation::identity(6);
        for u in 0..6 {
            for v in u + 1..6 {
                assert_eq!(edge_orbit_size(&id, u, v), 1);
            }
        }
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::from_cycles(3, &[&[0, 1], &[1, 2]]).is_err());
    }

    #[test]
    fn report_examples() {
        let r = orbit_report(&Permutation::identity(6));
        assert_eq!(r.orbits.len(), 15);
        assert!(r.orbits.iter().all(|o| o.len() == 1));
        assert_eq!(r.t.get("11"), Some(&15));
        assert_eq!(r.s, [6, 0, 0, 0]);

        let c7 = Permutation::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]).unwrap();
        let r = orbit_report(&c7);
        assert!(r.orbits.iter().all(|o| o.len() == 7));
        assert_eq!(r.orbits.len(), 3);
    }

    #[test]
    fn orbit_sizes_match_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.gen_range(2..=12);
            let s = Permutation::random(n, &mut rng);
            let r = orbit_report(&s);
            let total: usize = r.orbits.iter().map(Vec::len).sum();
            assert_eq!(total, n * (n - 1) / 2);
            assert_eq!(r.s.iter().sum::<usize>(), n);
            for o in &r.orbits {
                for &(u, v) in o {
                    assert_eq!(edge_orbit_size(&s, u, v), o.len());
                }
            }
        }
    }

    #[test]
    fn h_table_is_attained_and_never_beaten() {
        let table = h_table();
        let mut global: BTreeMap<String, usize> = BTreeMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut perms: Vec<Permutation> = (0..500)
            .map(|_| {
                let n = rng.gen_range(2..=12);
                Permutation::random(n, &mut rng)
            })
            .collect();
        // Cycle types that attain each minimum.
        perms.push(Permutation::from_cycles(12, &[&[0, 1, 2, 3], &[4, 5], &[6, 7, 8], &[9, 10]]).unwrap());
        perms.push(Permutation::from_cycles(12, &[&[0, 1, 2, 3, 4, 5], &[6, 7, 8]]).unwrap());
        for p in &perms {
            let r = orbit_report(p);
            for (k, &h) in &r.h {
                let t = (k.as_bytes()[0] - b'0', k.as_bytes()[1] - b'0');
                assert!(h >= table[&t], "type {k}: {h} below table");
                let e = global.entry(k.clone()).or_insert(usize::MAX);
                *e = (*e).min(h);
            }
        }
        for (t, h) in table {
            assert_eq!(global.get(&type_key(t)), Some(&h), "type {t:?}");
        }
    }

    #[test]
    fn automorphism_iff_orbits_not_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut hits = 0;
        for _ in 0..2000 {
            let n = rng.gen_range(2..=7);
            let mut g = SimpleGraph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let s = Permutation::random(n, &mut rng);
            let aut = is_automorphism(&g, &s);
            hits += usize::from(aut && !s.is_identity());
            assert_eq!(aut, !splits_orbits(&g, &orbit_report(&s)));
        }
        assert!(hits > 10, "both directions exercised");
    }

    #[test]
    fn permutations_enumerated() {
        assert_eq!(all_permutations(4).len(), 24);
        assert_eq!(all_permutations(1), vec![vec![0]]);
    }
}
