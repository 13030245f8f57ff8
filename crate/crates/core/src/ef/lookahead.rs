//! Look-ahead schedule and Duplicator's type-matching strategy.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::closure::{t_closure, types_equal, ClosureCaps};
use super::game::{ef_winner_from, GameState, Side, Winner, DEFAULT_STATE_CAP};
use super::rooted::RootedGraph;
use super::EfError;

/// Bit length beyond which schedule terms are refused.
pub const SCHEDULE_BITS: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub t: Vec<BigUint>,
    /// t_i <= (2 C k)^(d^i) for each i.
    pub bound_holds: Vec<bool>,
}

/// t_0 = 0, t_1 = 1, t_(i+1) = C (k - i) t_i^d + 1.
pub fn lookahead_schedule(k: usize, c: u64, d: u32) -> Result<Schedule, EfError> {
    if k == 0 || c == 0 || d < 2 {
        return Err(EfError::Domain("need k >= 1, C >= 1, d >= 2".into()));
    }
    let mut t = vec![BigUint::zero()];
    if k > 1 {
        t.push(BigUint::one());
    }
    while t.len() < k {
        let i = t.len() - 1;
        let last = &t[i];
        if last.bits().saturating_mul(u64::from(d)) > SCHEDULE_BITS {
            return Err(EfError::Overflow);
        }
        let next = BigUint::from(c) * BigUint::from((k - i) as u64) * num_traits::pow(last.clone(), d as usize) + 1u32;
        t.push(next);
    }
    let base = BigUint::from(2 * c) * BigUint::from(k as u64);
    let bound_holds = t
        .iter()
        .enumerate()
        .map(|(i, ti)| {
            // (2Ck)^(d^i) has at least d^i * floor(log2 2Ck) + 1 bits; when
            // that is past the cap, compare bit lengths.
            let exp = (d as u64).checked_pow(i as u32);
            match exp {
                Some(e) if e.saturating_mul(base.bits()) <= SCHEDULE_BITS => *ti <= num_traits::pow(base.clone(), e as usize),
                _ => ti.bits() <= SCHEDULE_BITS,
            }
        })
        .collect();
    Ok(Schedule { t, bound_holds })
}

/// (1 / ln d0) ln ln ln n.
pub fn depth_lower_bound_formula(n: f64, d0: f64) -> Result<f64, EfError> {
    if !(n >= 16.0) || !(d0 > 2.0) || !n.is_finite() || !d0.is_finite() {
        return Err(EfError::Domain("need n >= 16 and d0 > 2".into()));
    }
    Ok(n.ln().ln().ln() / d0.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveMethod {
    /// The reply has the same type as Spoiler's move at the next level.
    TypeMatch,
    /// The exact solver chose the reply.
    ExactSolver,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LookaheadFailure {
    /// The current tuples do not have the same type at the required level.
    UnequalTypes { level: usize },
    /// No reply keeps the types equal and the exact solver is out of reach.
    NoMatch { level: usize },
    /// A schedule level is beyond the closure cap.
    LevelTooLarge { level: String, cap: usize },
    /// Closure or solver limits were hit.
    Cap(String),
    /// Every round has been played already.
    GameOver,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LookaheadReport {
    pub reply: Option<usize>,
    pub method: Option<MoveMethod>,
    /// Set when a type-matching reply existed but the exact solver showed
    /// it loses, so the solver's move was used instead.
    pub type_match_overruled: bool,
    /// Size of the closure of Spoiler's extended tuple at the next level,
    /// and whether it splits as a safe extension over a rigid one.
    pub closure_size: Option<usize>,
    pub closure_safe_over_rigid: Option<bool>,
    pub failure: Option<LookaheadFailure>,
}

impl LookaheadReport {
    fn fail(f: LookaheadFailure) -> Self {
        LookaheadReport { reply: None, method: None, type_match_overruled: false, closure_size: None, closure_safe_over_rigid: None, failure: Some(f) }
    }
}

/// Largest total order for which the exact solver is used as fallback.
pub const EXACT_FALLBACK_ORDER: usize = 16;

fn level(schedule: &[BigUint], i: usize, caps: &ClosureCaps) -> Result<usize, LookaheadFailure> {
    let t = schedule.get(i).ok_or(LookaheadFailure::GameOver)?;
    match t.to_usize() {
        Some(v) if v <= caps.max_t => Ok(v),
        _ => Err(LookaheadFailure::LevelTooLarge { level: t.to_string(), cap: caps.max_t }),
    }
}

/// Duplicator's reply to Spoiler marking `vertex` on `side`. With j rounds
/// left the marks must share their t_j-type; the reply is a vertex whose
/// addition keeps the t_(j-1)-types equal. When the graphs are small the
/// reply is checked against the exact solver and replaced if it loses.
pub fn duplicator_lookahead_move(state: &GameState, side: Side, vertex: usize, schedule: &[BigUint], alpha: &BigRational, caps: &ClosureCaps) -> Result<LookaheadReport, EfError> {
    let j = state.rounds_remaining;
    if j == 0 {
        return Ok(LookaheadReport::fail(LookaheadFailure::GameOver));
    }
    let (gs, gd, ms, md) = match side {
        Side::First => (&state.g1, &state.g2, &state.x, &state.y),
        Side::Second => (&state.g2, &state.g1, &state.y, &state.x),
    };
    if vertex >= gs.n() {
        return Err(EfError::NotExtension(format!("vertex {vertex} out of range")));
    }
    let next = match level(schedule, j - 1, caps) {
        Ok(v) => v,
        Err(f) => return Ok(LookaheadReport::fail(f)),
    };
    // The level before this move; a missing entry (first move of a game
    // longer than the schedule) is checked at the next level instead.
    let pre = match schedule.get(j) {
        Some(_) => match level(schedule, j, caps) {
            Ok(v) => v,
            Err(f) => return Ok(LookaheadReport::fail(f)),
        },
        None => next,
    };
    let cap_err = |e: EfError| match e {
        EfError::TooLarge { .. } | EfError::StateSpace(_) => Ok(LookaheadReport::fail(LookaheadFailure::Cap(e.to_string()))),
        other => Err(other),
    };
    match types_equal(gs, ms, gd, md, pre, alpha, caps) {
        Ok(true) => {}
        Ok(false) => return Ok(LookaheadReport::fail(LookaheadFailure::UnequalTypes { level: pre })),
        Err(e) => return cap_err(e),
    }

    let mut extended = ms.clone();
    extended.push(vertex);
    let (closure_size, safe_over_rigid) = match closure_shape(gs, ms, &extended, next, alpha, caps) {
        Ok(v) => v,
        Err(e) => return cap_err(e),
    };

    let mut candidates = Vec::new();
    for d in 0..gd.n() {
        let mut other = md.clone();
        other.push(d);
        match types_equal(gs, &extended, gd, &other, next, alpha, caps) {
            Ok(true) => candidates.push(d),
            Ok(false) => {}
            Err(e) => return cap_err(e),
        }
    }
    let matched = candidates.first().copied();
    let orient = |d: usize| match side {
        Side::First => state.play(vertex, d),
        Side::Second => state.play(d, vertex),
    };
    let small = state.g1.n() + state.g2.n() <= EXACT_FALLBACK_ORDER;
    let mut report = LookaheadReport {
        reply: matched,
        method: matched.map(|_| MoveMethod::TypeMatch),
        type_match_overruled: false,
        closure_size: Some(closure_size),
        closure_safe_over_rigid: safe_over_rigid,
        failure: None,
    };
    if !small {
        if matched.is_none() {
            report.failure = Some(LookaheadFailure::NoMatch { level: next });
        }
        return Ok(report);
    }
    for &d in &candidates {
        match ef_winner_from(&orient(d), DEFAULT_STATE_CAP) {
            Ok(Winner::Duplicator) => {
                report.reply = Some(d);
                return Ok(report);
            }
            Ok(Winner::Spoiler) => report.type_match_overruled = true,
            Err(e) => return cap_err(e),
        }
    }
    for d in 0..gd.n() {
        match ef_winner_from(&orient(d), DEFAULT_STATE_CAP) {
            Ok(Winner::Duplicator) => {
                report.reply = Some(d);
                report.method = Some(MoveMethod::ExactSolver);
                return Ok(report);
            }
            Ok(Winner::Spoiler) => {}
            Err(e) => return cap_err(e),
        }
    }
    // Every reply loses; return the type match if there was one.
    if matched.is_none() {
        report.failure = Some(LookaheadFailure::NoMatch { level: next });
    }
    report.method = matched.map(|_| MoveMethod::TypeMatch);
    report.reply = matched;
    Ok(report)
}

/// Closure of the extended tuple at level t, and whether the new part
/// splits into a rigid extension of cl_t(old marks) followed by a safe
/// one. Only attempted for at most 16 new vertices.
fn closure_shape(g: &crate::graph::SimpleGraph, old: &[usize], extended: &[usize], t: usize, alpha: &BigRational, caps: &ClosureCaps) -> Result<(usize, Option<bool>), EfError> {
    let base = t_closure(g, old, t, alpha, caps)?;
    let full = t_closure(g, extended, t, alpha, caps)?;
    let new: Vec<usize> = full.iter().copied().filter(|v| !base.contains(v)).collect();
    if new.is_empty() || new.len() > super::rooted::SUBSET_CAP {
        return Ok((full.len(), None));
    }
    // Rigid part: largest subset A of the new vertices with (base, base + A)
    // rigid; take the union of all rigid subsets.
    let mut rigid: Vec<usize> = Vec::new();
    for mask in 1u32..(1 << new.len()) {
        let a: Vec<usize> = (0..new.len()).filter(|i| mask >> i & 1 == 1).map(|i| new[i]).collect();
        if RootedGraph::from_host(g, &base, &a)?.is_rigid(alpha)? {
            for v in a {
                if !rigid.contains(&v) {
                    rigid.push(v);
                }
            }
        }
    }
    let inner: Vec<usize> = base.iter().chain(&rigid).copied().collect();
    let rest: Vec<usize> = new.iter().copied().filter(|v| !rigid.contains(v)).collect();
    if rest.is_empty() {
        return Ok((full.len(), Some(true)));
    }
    let safe = RootedGraph::from_host(g, &inner, &rest)?.is_safe(alpha)?;
    Ok((full.len(), Some(safe)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use crate::rational::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schedule_examples() {
        let s = lookahead_schedule(3, 1, 2).unwrap();
        assert_eq!(s.t, vec![BigUint::zero(), BigUint::one(), BigUint::from(3u32)]);
        assert_eq!(lookahead_schedule(1, 1, 3).unwrap().t, vec![BigUint::zero()]);
        for (k, c, d) in [(3, 1, 2), (5, 2, 3), (6, 1, 3), (8, 3, 2)] {
            let s = lookahead_schedule(k, c, d).unwrap();
            assert_eq!(s.t.len(), k);
            assert!(s.bound_holds.iter().all(|&b| b), "{k} {c} {d}");
        }
        assert!(lookahead_schedule(0, 1, 3).is_err());
        assert!(lookahead_schedule(3, 1, 1).is_err());
    }

    #[test]
    fn lower_bound_formula() {
        let e = std::f64::consts::E;
        let n = e.powf(e.powf(e));
        assert!((depth_lower_bound_formula(n, e).unwrap() - 1.0).abs() < 1e-12);
        let v = depth_lower_bound_formula(1e6, 2.5).unwrap();
        assert!((v - 1.0535766636833623).abs() < 1e-9);
        assert!(depth_lower_bound_formula(1e7, 2.5).unwrap() > v);
        assert!(depth_lower_bound_formula(10.0, 2.5).is_err());
        assert!(depth_lower_bound_formula(1e6, 2.0).is_err());
    }

    fn caps() -> ClosureCaps {
        ClosureCaps::default()
    }

    #[test]
    fn mirrors_isomorphism() {
        let g = SimpleGraph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 5)]).unwrap();
        let perm = [6, 5, 4, 3, 2, 1, 0];
        let h = g.relabel(&perm);
        let sched = lookahead_schedule(3, 1, 2).unwrap().t;
        let state = GameState::new(g.clone(), h, 3).play(1, perm[1]);
        let rep = duplicator_lookahead_move(&GameState { rounds_remaining: 2, ..state }, Side::First, 3, &sched, &ratio(3, 5), &caps()).unwrap();
        assert!(rep.failure.is_none());
        let d = rep.reply.unwrap();
        assert_eq!(rep.method, Some(MoveMethod::TypeMatch));
        let after = GameState { rounds_remaining: 2, ..GameState::new(g.clone(), g.relabel(&perm), 3).play(1, perm[1]) }.play(3, d);
        assert_eq!(ef_winner_from(&after, DEFAULT_STATE_CAP).unwrap(), Winner::Duplicator);
    }

    #[test]
    fn unequal_types_are_reported() {
        let sched = lookahead_schedule(3, 1, 2).unwrap().t;
        // 0 and 1 have a common neighbour in g1 only, which their level-1
        // closure picks up.
        let g1 = SimpleGraph::from_edges(4, [(0, 2), (2, 1)]).unwrap();
        let g2 = SimpleGraph::from_edges(4, [(1, 2)]).unwrap();
        let state = GameState { rounds_remaining: 1, ..GameState::new(g1, g2, 3).play(0, 0).play(1, 1) };
        let rep = duplicator_lookahead_move(&state, Side::First, 3, &sched, &ratio(3, 5), &caps()).unwrap();
        assert_eq!(rep.failure, Some(LookaheadFailure::UnequalTypes { level: 1 }));
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SimpleGraph {
        let mut g = SimpleGraph::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(a, b).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn never_loses_a_won_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let alpha = ratio(3, 5);
        let sched = lookahead_schedule(3, 1, 2).unwrap().t;
        let mut tried = 0;
        for _ in 0..200 {
            let n1 = rng.gen_range(3..7);
            let n2 = rng.gen_range(3..7);
            let g1 = random_graph(&mut rng, n1, 0.4);
            let g2 = random_graph(&mut rng, n2, 0.4);
            let k = 2;
            let start = GameState::new(g1.clone(), g2.clone(), k);
            if ef_winner_from(&start, DEFAULT_STATE_CAP).unwrap() != Winner::Duplicator {
                continue;
            }
            let side = if rng.gen_bool(0.5) { Side::First } else { Side::Second };
            let v = rng.gen_range(0..if side == Side::First { n1 } else { n2 });
            let rep = duplicator_lookahead_move(&start, side, v, &sched, &alpha, &caps()).unwrap();
            if rep.failure.is_some() {
                continue;
            }
            let d = rep.reply.unwrap();
            let after = match side {
                Side::First => start.play(v, d),
                Side::Second => start.play(d, v),
            };
            assert_eq!(ef_winner_from(&after, DEFAULT_STATE_CAP).unwrap(), Winner::Duplicator);
            tried += 1;
        }
        assert!(tried > 20, "{tried}");
    }
}
