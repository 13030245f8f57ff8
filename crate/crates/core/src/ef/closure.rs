//! t-closures, t-types of tuples and generic extensions.

use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::rooted::{Profile, RootedGraph};
use super::EfError;
use crate::graph::{Bits, SimpleGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCaps {
    pub max_t: usize,
    pub max_n: usize,
}

impl Default for ClosureCaps {
    fn default() -> Self {
        ClosureCaps { max_t: 3, max_n: 200 }
    }
}

/// Scan order for candidate sets; the closure does not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanOrder {
    Forward,
    Reverse,
}

fn check_caps(g: &SimpleGraph, t: usize, caps: &ClosureCaps) -> Result<(), EfError> {
    if t > caps.max_t {
        return Err(EfError::TooLarge { what: "closure depth t", size: t, cap: caps.max_t });
    }
    if g.n() > caps.max_n {
        return Err(EfError::TooLarge { what: "graph order", size: g.n(), cap: caps.max_n });
    }
    Ok(())
}

/// All vertex sets Z outside `base` with 1 <= |Z| <= t such that
/// (base, g[base + Z]) is rigid, in scan order of their sorted vertex lists.
/// When no graph on t vertices is denser than 1/alpha, every component of
/// a rigid Z touches the base, so only sets grown from the base's
/// neighbourhood are tried.
fn rigid_sets(g: &SimpleGraph, base: &Bits, t: usize, alpha: &BigRational, order: ScanOrder, first_only: bool) -> Result<Vec<Vec<usize>>, EfError> {
    let n = g.n();
    let local = BigRational::from_integer(((t.saturating_sub(1)) as i64).into()) * alpha <= BigRational::from_integer(2.into());
    let mut found = Vec::new();
    for size in 1..=t {
        let sets: Vec<Vec<usize>> = if local {
            grown_sets(g, base, size)
        } else {
            all_sets(n, base, size)
        };
        let mut sets = sets;
        if order == ScanOrder::Reverse {
            sets.reverse();
        }
        for z in sets {
            if Profile::over(g, base, &z).is_rigid(alpha)? {
                found.push(z);
                if first_only {
                    return Ok(found);
                }
            }
        }
    }
    Ok(found)
}

fn grown_sets(g: &SimpleGraph, base: &Bits, size: usize) -> Vec<Vec<usize>> {
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier: BTreeSet<Vec<usize>> = BTreeSet::new();
    frontier.insert(Vec::new());
    for _ in 0..size {
        let mut next = BTreeSet::new();
        for z in &frontier {
            let mut touch: BTreeSet<usize> = BTreeSet::new();
            for b in base.iter().chain(z.iter().copied()) {
                for &w in g.neighbors(b) {
                    if !base.contains(w) && !z.contains(&w) {
                        touch.insert(w);
                    }
                }
            }
            for w in touch {
                let mut z2 = z.clone();
                z2.push(w);
                z2.sort_unstable();
                next.insert(z2);
            }
        }
        frontier = next;
    }
    out.extend(frontier);
    out.into_iter().collect()
}

fn all_sets(n: usize, base: &Bits, size: usize) -> Vec<Vec<usize>> {
    let pool: Vec<usize> = (0..n).filter(|&v| !base.contains(v)).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(pool: &[usize], start: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, i + 1, size, cur, out);
            cur.pop();
        }
    }
    rec(&pool, 0, size, &mut cur, &mut out);
    out
}

/// Least superset of U closed under adding rigid extensions with at most t
/// nonroots. Returned sorted.
pub fn t_closure(g: &SimpleGraph, u: &[usize], t: usize, alpha: &BigRational, caps: &ClosureCaps) -> Result<Vec<usize>, EfError> {
    t_closure_ordered(g, u, t, alpha, caps, ScanOrder::Forward)
}

pub fn t_closure_ordered(g: &SimpleGraph, u: &[usize], t: usize, alpha: &BigRational, caps: &ClosureCaps, order: ScanOrder) -> Result<Vec<usize>, EfError> {
    check_caps(g, t, caps)?;
    let mut set = Bits::new(g.n());
    for &x in u {
        if x >= g.n() {
            return Err(EfError::NotExtension(format!("vertex {x} out of range")));
        }
        set.insert(x);
    }
    loop {
        let found = rigid_sets(g, &set, t, alpha, order, true)?;
        match found.first() {
            Some(z) => z.iter().for_each(|&v| set.insert(v)),
            None => break,
        }
    }
    Ok(set.iter().collect())
}

/// Isomorphism g1[a] -> g2[b] extending the given vertex pairs.
fn extend_isomorphism(g1: &SimpleGraph, a: &[usize], g2: &SimpleGraph, b: &[usize], fixed: &[(usize, usize)]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let deg = |g: &SimpleGraph, set: &[usize], x: usize| set.iter().filter(|&&y| g.has_edge(x, y)).count();
    let mut map: Vec<(usize, usize)> = Vec::new();
    for &(x, y) in fixed {
        if let Some(&(_, y0)) = map.iter().find(|&&(x0, _)| x0 == x) {
            if y0 != y {
                return false;
            }
            continue;
        }
        if map.iter().any(|&(_, y0)| y0 == y) {
            return false;
        }
        map.push((x, y));
    }
    if !map.iter().all(|&(x, y)| deg(g1, a, x) == deg(g2, b, y)) || !consistent(g1, g2, &map) {
        return false;
    }
    let free_a: Vec<usize> = a.iter().copied().filter(|x| !map.iter().any(|&(x0, _)| x0 == *x)).collect();
    let free_b: Vec<usize> = b.iter().copied().filter(|y| !map.iter().any(|&(_, y0)| y0 == *y)).collect();
    let da: Vec<usize> = free_a.iter().map(|&x| deg(g1, a, x)).collect();
    let db: Vec<usize> = free_b.iter().map(|&y| deg(g2, b, y)).collect();
    let mut sa = da.clone();
    let mut sb = db.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let mut used = vec![false; free_b.len()];
    backtrack(g1, g2, &free_a, &da, &free_b, &db, &mut used, &mut map)
}

fn consistent(g1: &SimpleGraph, g2: &SimpleGraph, map: &[(usize, usize)]) -> bool {
    map.iter().enumerate().all(|(i, &(x, y))| map[..i].iter().all(|&(x0, y0)| g1.has_edge(x, x0) == g2.has_edge(y, y0)))
}

#[allow(clippy::too_many_arguments)]
fn backtrack(g1: &SimpleGraph, g2: &SimpleGraph, fa: &[usize], da: &[usize], fb: &[usize], db: &[usize], used: &mut [bool], map: &mut Vec<(usize, usize)>) -> bool {
    let Some(i) = fa.iter().position(|x| !map.iter().any(|&(x0, _)| x0 == *x)) else {
        return true;
    };
    let x = fa[i];
    for j in 0..fb.len() {
        if used[j] || db[j] != da[i] {
            continue;
        }
        let y = fb[j];
        if map.iter().all(|&(x0, y0)| g1.has_edge(x, x0) == g2.has_edge(y, y0)) {
            used[j] = true;
            map.push((x, y));
            if backtrack(g1, g2, fa, da, fb, db, used, map) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
    }
    false
}

/// Same t-type: an isomorphism of the t-closures sending x_i to y_i.
pub fn types_equal(g1: &SimpleGraph, x: &[usize], g2: &SimpleGraph, y: &[usize], t: usize, alpha: &BigRational, caps: &ClosureCaps) -> Result<bool, EfError> {
    if x.len() != y.len() {
        return Err(EfError::LengthMismatch { left: x.len(), right: y.len() });
    }
    let c1 = t_closure(g1, x, t, alpha, caps)?;
    let c2 = t_closure(g2, y, t, alpha, caps)?;
    let fixed: Vec<(usize, usize)> = x.iter().copied().zip(y.iter().copied()).collect();
    Ok(extend_isomorphism(g1, &c1, g2, &c2, &fixed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericViolation {
    /// An edge among x and y that the rooted graph does not have.
    ExtraEdge(usize, usize),
    /// A rigid extension of x + y by these vertices with an edge into y.
    RigidAttachment(Vec<usize>),
}

/// Whether y is a t-generic (R, H)-extension of x in g.
pub fn is_generic_extension(g: &SimpleGraph, x: &[usize], y: &[usize], rg: &RootedGraph, t: usize, alpha: &BigRational, caps: &ClosureCaps) -> Result<(bool, Option<GenericViolation>), EfError> {
    check_caps(g, t, caps)?;
    if x.len() != rg.r() || y.len() != rg.v() {
        return Err(EfError::LengthMismatch { left: x.len() + y.len(), right: rg.r() + rg.v() });
    }
    let all: Vec<usize> = x.iter().chain(y).copied().collect();
    for (i, &a) in all.iter().enumerate() {
        if a >= g.n() || all[..i].contains(&a) {
            return Err(EfError::NotExtension(format!("vertex {a} repeated or out of range")));
        }
    }
    let r = rg.r();
    for (a, b) in rg.graph().edges() {
        if !g.has_edge(all[a], all[b]) {
            return Err(EfError::NotExtension(format!("edge {}-{} missing", all[a], all[b])));
        }
    }
    for i in 0..all.len() {
        for j in (i + 1).max(r)..all.len() {
            if g.has_edge(all[i], all[j]) && !rg.graph().has_edge(i, j) {
                return Ok((false, Some(GenericViolation::ExtraEdge(all[i], all[j]))));
            }
        }
    }
    let mut base = Bits::new(g.n());
    for &a in &all {
        base.insert(a);
    }
    for z in rigid_sets(g, &base, t, alpha, ScanOrder::Forward, false)? {
        if z.iter().any(|&w| y.iter().any(|&b| g.has_edge(w, b))) {
            return Ok((false, Some(GenericViolation::RigidAttachment(z))));
        }
    }
    Ok((true, None))
}
