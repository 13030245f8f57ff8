//! Exact Ehrenfeucht-Fraisse game values by memoized game-tree search.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::EfError;
use crate::graph::SimpleGraph;

pub const DEFAULT_STATE_CAP: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Spoiler,
    Duplicator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

/// Two graphs, the vertices marked so far in each, and the rounds left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    pub g1: SimpleGraph,
    pub g2: SimpleGraph,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub rounds_remaining: usize,
}

impl GameState {
    pub fn new(g1: SimpleGraph, g2: SimpleGraph, rounds: usize) -> Self {
        GameState { g1, g2, x: Vec::new(), y: Vec::new(), rounds_remaining: rounds }
    }

    /// Marks are equal-length and x_i -> y_i preserves equality and
    /// adjacency.
    pub fn is_partial_isomorphism(&self) -> bool {
        self.x.len() == self.y.len() && partial_iso(&self.g1, &self.g2, &pairs(&self.x, &self.y))
    }

    pub fn play(&self, x: usize, y: usize) -> GameState {
        let mut s = self.clone();
        s.x.push(x);
        s.y.push(y);
        s.rounds_remaining = s.rounds_remaining.saturating_sub(1);
        s
    }
}

fn pairs(x: &[usize], y: &[usize]) -> Vec<(usize, usize)> {
    x.iter().copied().zip(y.iter().copied()).collect()
}

fn partial_iso(g1: &SimpleGraph, g2: &SimpleGraph, p: &[(usize, usize)]) -> bool {
    p.iter().enumerate().all(|(i, &(a, b))| p[..i].iter().all(|&(c, d)| (a == c) == (b == d) && g1.has_edge(a, c) == g2.has_edge(b, d)))
}

struct Solver<'a> {
    g1: &'a SimpleGraph,
    g2: &'a SimpleGraph,
    memo: HashMap<(Vec<(u16, u16)>, usize), bool>,
    cap: usize,
    twins1: Vec<usize>,
    twins2: Vec<usize>,
}

/// Class representative for true or false twins: vertices with the same
/// neighbourhood apart from each other are swapped by an automorphism.
fn twin_classes(g: &SimpleGraph) -> Vec<usize> {
    let n = g.n();
    let mut rep: Vec<usize> = (0..n).collect();
    for a in 0..n {
        if rep[a] != a {
            continue;
        }
        for b in a + 1..n {
            if rep[b] != b {
                continue;
            }
            let same = (0..n).all(|w| w == a || w == b || g.has_edge(a, w) == g.has_edge(b, w));
            if same {
                rep[b] = a;
            }
        }
    }
    rep
}

/// Pattern of an unmarked vertex: adjacency to each marked vertex.
fn pattern(g: &SimpleGraph, marks: &[usize], v: usize) -> Vec<bool> {
    marks.iter().map(|&m| g.has_edge(v, m)).collect()
}

impl<'a> Solver<'a> {
    fn new(g1: &'a SimpleGraph, g2: &'a SimpleGraph, cap: usize) -> Self {
        Solver { g1, g2, memo: HashMap::new(), cap, twins1: twin_classes(g1), twins2: twin_classes(g2) }
    }

    /// Spoiler's useful moves on one side: unmarked vertices, one per twin
    /// class among vertices whose twin partner is also unmarked.
    fn moves(g: &SimpleGraph, twins: &[usize], marks: &[usize]) -> Vec<usize> {
        let mut seen: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for v in 0..g.n() {
            if marks.contains(&v) {
                continue;
            }
            let r = twins[v];
            // Twins remain interchangeable only while none of the class
            // members is marked.
            let class_marked = marks.iter().any(|&m| twins[m] == r);
            if !class_marked {
                if seen.contains(&r) {
                    continue;
                }
                seen.push(r);
            }
            out.push(v);
        }
        out
    }

    /// True when Duplicator wins with `k` rounds from the given marks,
    /// which already form a partial isomorphism.
    fn duplicator_wins(&mut self, x: &mut Vec<usize>, y: &mut Vec<usize>, k: usize) -> Result<bool, EfError> {
        if k == 0 {
            return Ok(true);
        }
        if k == 1 {
            // Only the adjacency pattern of a fresh vertex to the marks
            // matters in the last round.
            let unmarked1: std::collections::BTreeSet<Vec<bool>> = (0..self.g1.n()).filter(|v| !x.contains(v)).map(|v| pattern(self.g1, x, v)).collect();
            let unmarked2: std::collections::BTreeSet<Vec<bool>> = (0..self.g2.n()).filter(|v| !y.contains(v)).map(|v| pattern(self.g2, y, v)).collect();
            return Ok(unmarked1 == unmarked2);
        }
        let mut key: Vec<(u16, u16)> = x.iter().zip(y.iter()).map(|(&a, &b)| (a as u16, b as u16)).collect();
        key.sort_unstable();
        key.dedup();
        if let Some(&w) = self.memo.get(&(key.clone(), k)) {
            return Ok(w);
        }
        if self.memo.len() >= self.cap {
            return Err(EfError::StateSpace(self.cap));
        }
        let mut result = true;
        'outer: for side in [Side::First, Side::Second] {
            let (gs, gd, ms, md) = match side {
                Side::First => (self.g1, self.g2, x.clone(), y.clone()),
                Side::Second => (self.g2, self.g1, y.clone(), x.clone()),
            };
            let tw = if side == Side::First { self.twins1.clone() } else { self.twins2.clone() };
            for s in Self::moves(gs, &tw, &ms) {
                let pat = pattern(gs, &ms, s);
                let mut answered = false;
                for d in 0..gd.n() {
                    if md.contains(&d) || pattern(gd, &md, d) != pat {
                        continue;
                    }
                    let (a, b) = if side == Side::First { (s, d) } else { (d, s) };
                    x.push(a);
                    y.push(b);
                    let w = self.duplicator_wins(x, y, k - 1)?;
                    x.pop();
                    y.pop();
                    if w {
                        answered = true;
                        break;
                    }
                }
                if !answered {
                    result = false;
                    break 'outer;
                }
            }
        }
        self.memo.insert((key, k), result);
        Ok(result)
    }
}

/// Winner of the k-round game on (g1, g2) from the empty position.
pub fn ef_winner(g1: &SimpleGraph, g2: &SimpleGraph, k: usize) -> Result<Winner, EfError> {
    ef_winner_from(&GameState::new(g1.clone(), g2.clone(), k), DEFAULT_STATE_CAP)
}

/// Winner from an arbitrary position. Spoiler has already won if the marks
/// are not a partial isomorphism.
pub fn ef_winner_from(state: &GameState, cap: usize) -> Result<Winner, EfError> {
    if state.x.len() != state.y.len() {
        return Err(EfError::LengthMismatch { left: state.x.len(), right: state.y.len() });
    }
    if state.g1.n() > u16::MAX as usize || state.g2.n() > u16::MAX as usize {
        return Err(EfError::TooLarge { what: "graph order", size: state.g1.n().max(state.g2.n()), cap: u16::MAX as usize });
    }
    if !state.is_partial_isomorphism() {
        return Ok(Winner::Spoiler);
    }
    let mut solver = Solver::new(&state.g1, &state.g2, cap);
    // Repeated marks add nothing; keep one copy of each pair.
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (a, b) in pairs(&state.x, &state.y) {
        if !x.contains(&a) {
            x.push(a);
            y.push(b);
        }
    }
    Ok(if solver.duplicator_wins(&mut x, &mut y, state.rounds_remaining)? { Winner::Duplicator } else { Winner::Spoiler })
}

/// Game values for k = 1..=kmax.
pub fn winners_up_to(g1: &SimpleGraph, g2: &SimpleGraph, kmax: usize) -> Result<Vec<Winner>, EfError> {
    (1..=kmax).map(|k| ef_winner(g1, g2, k)).collect()
}

/// Smallest k <= kmax at which Spoiler wins. Every solved k is checked for
/// monotonicity.
pub fn min_distinguishing_depth(g1: &SimpleGraph, g2: &SimpleGraph, kmax: usize) -> Result<Option<usize>, EfError> {
    let w = winners_up_to(g1, g2, kmax)?;
    let first = w.iter().position(|&x| x == Winner::Spoiler);
    if let Some(i) = first {
        if let Some(j) = w[i..].iter().position(|&x| x == Winner::Duplicator) {
            return Err(EfError::NotMonotone { spoiler_at: i + 1, duplicator_at: i + j + 1 });
        }
    }
    Ok(first.map(|i| i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let k3 = SimpleGraph::complete(3);
        let p3 = SimpleGraph::path(3);
        assert_eq!(ef_winner(&k3, &p3, 1).unwrap(), Winner::Duplicator);
        assert_eq!(ef_winner(&k3, &p3, 2).unwrap(), Winner::Spoiler);
        assert_eq!(min_distinguishing_depth(&k3, &p3, 4).unwrap(), Some(2));
        let k2 = SimpleGraph::complete(2);
        assert_eq!(min_distinguishing_depth(&k2, &k3, 4).unwrap(), Some(3));
        assert_eq!(min_distinguishing_depth(&k3, &k3, 5).unwrap(), None);
        assert_eq!(ef_winner(&p3, &p3.relabel(&[2, 0, 1]), 4).unwrap(), Winner::Duplicator);
        // C4 and two disjoint edges agree on depth 2 but not 3.
        let c4 = SimpleGraph::cycle(4);
        let m2 = SimpleGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(min_distinguishing_depth(&c4, &m2, 4).unwrap(), Some(3));
    }

    #[test]
    fn positions() {
        let p3 = SimpleGraph::path(3);
        let k3 = SimpleGraph::complete(3);
        let s = GameState::new(p3.clone(), p3.clone(), 2).play(0, 1);
        assert_eq!(ef_winner_from(&s, DEFAULT_STATE_CAP).unwrap(), Winner::Spoiler);
        let s = GameState::new(p3.clone(), k3, 1).play(0, 0).play(0, 1);
        assert!(!s.is_partial_isomorphism());
        assert_eq!(ef_winner_from(&s, DEFAULT_STATE_CAP).unwrap(), Winner::Spoiler);
        let s = GameState::new(p3.clone(), p3, 3).play(0, 2);
        assert_eq!(ef_winner_from(&s, DEFAULT_STATE_CAP).unwrap(), Winner::Duplicator);
    }

    #[test]
    fn state_cap_is_reported() {
        let a = SimpleGraph::cycle(9);
        let b = SimpleGraph::from_edges(9, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 3)]).unwrap();
        assert!(matches!(ef_winner_from(&GameState::new(a, b, 5), 3), Err(EfError::StateSpace(3))));
    }
}
