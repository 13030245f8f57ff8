//! Dinic max-flow on integer capacities.

use std::collections::VecDeque;

pub const INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

#[derive(Clone, Debug)]
pub struct Dinic {
    g: Vec<Vec<Arc>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    pub fn new(n: usize) -> Self {
        Dinic {
            g: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        let rf = self.g[to].len() + usize::from(from == to);
        let rt = self.g[from].len();
        self.g[from].push(Arc { to, cap, rev: rf });
        self.g[to].push(Arc { to: from, cap: 0, rev: rt });
    }

    /// Undirected edge: capacity `cap` both ways.
    pub fn add_undirected(&mut self, a: usize, b: usize, cap: i64) {
        let ra = self.g[b].len();
        let rb = self.g[a].len();
        self.g[a].push(Arc { to: b, cap, rev: ra });
        self.g[b].push(Arc { to: a, cap, rev: rb });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for a in &self.g[u] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[u] + 1;
                    q.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64) -> i64 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.g[u].len() {
            let i = self.iter[u];
            let (to, cap) = (self.g[u][i].to, self.g[u][i].cap);
            if cap > 0 && self.level[u] < self.level[to] {
                let d = self.dfs(to, t, f.min(cap));
                if d > 0 {
                    self.g[u][i].cap -= d;
                    let rev = self.g[u][i].rev;
                    self.g[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, INF);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Vertices reachable from `s` in the residual graph: the source side of
    /// the minimal minimum cut. Call after `max_flow`.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.g.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in &self.g[u] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        let mut d = Dinic::new(6);
        for (a, b, c) in [(0, 1, 10), (0, 2, 10), (1, 3, 4), (1, 4, 8), (2, 4, 9), (3, 5, 10), (4, 3, 6), (4, 5, 10)] {
            d.add_edge(a, b, c);
        }
        assert_eq!(d.max_flow(0, 5), 19);
        let side = d.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn disconnected_and_undirected() {
        let mut d = Dinic::new(4);
        d.add_edge(0, 1, 10);
        d.add_edge(2, 3, 5);
        assert_eq!(d.max_flow(0, 3), 0);
        let mut d = Dinic::new(3);
        d.add_undirected(0, 1, 3);
        d.add_undirected(1, 2, 2);
        assert_eq!(d.max_flow(2, 0), 2);
    }
}
