use balgraph::ef::{
    duplicator_lookahead_move, ef_winner, ef_winner_from, lookahead_schedule, t_closure, winners_up_to, ClosureCaps, GameState, Side, Winner,
    DEFAULT_STATE_CAP,
};
use balgraph::rational::ratio;
use balgraph::SimpleGraph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph(max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            SimpleGraph::from_edges(n, edges).unwrap()
        })
    })
}

fn shuffled(g: &SimpleGraph, seed: u64) -> SimpleGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..g.n()).collect();
    for i in (1..perm.len()).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    g.relabel(&perm)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn game_value_is_symmetric_and_monotone(a in graph(5), b in graph(5)) {
        let w = winners_up_to(&a, &b, 4).unwrap();
        prop_assert_eq!(&w, &winners_up_to(&b, &a, 4).unwrap());
        if let Some(i) = w.iter().position(|&x| x == Winner::Spoiler) {
            prop_assert!(w[i..].iter().all(|&x| x == Winner::Spoiler));
        }
    }

    #[test]
    fn game_value_ignores_labels_and_complements(a in graph(5), b in graph(5), s in any::<u64>()) {
        let w = winners_up_to(&a, &b, 4).unwrap();
        prop_assert_eq!(&w, &winners_up_to(&shuffled(&a, s), &shuffled(&b, s ^ 1), 4).unwrap());
        prop_assert_eq!(&w, &winners_up_to(&a.complement(), &b.complement(), 4).unwrap());
    }

    #[test]
    fn isomorphic_copies_never_lose(a in graph(6), s in any::<u64>()) {
        prop_assert_eq!(ef_winner(&a, &shuffled(&a, s), 5).unwrap(), Winner::Duplicator);
    }

    #[test]
    fn order_difference_is_seen_by_one_more_round(a in graph(5), b in graph(5)) {
        // With min(n1, n2) + 1 rounds Spoiler can count vertices.
        if a.n() != b.n() {
            prop_assert_eq!(ef_winner(&a, &b, a.n().min(b.n()) + 1).unwrap(), Winner::Spoiler);
        }
    }

    #[test]
    fn closure_is_a_closure(g in graph(9), picks in proptest::collection::vec(0usize..9, 1..3), t in 1usize..=3) {
        let alpha = ratio(7, 11);
        let caps = ClosureCaps::default();
        let mut u: Vec<usize> = picks.into_iter().map(|x| x % g.n()).collect();
        u.sort_unstable();
        u.dedup();
        let cl = t_closure(&g, &u, t, &alpha, &caps).unwrap();
        prop_assert!(u.iter().all(|x| cl.contains(x)));
        prop_assert_eq!(&t_closure(&g, &cl, t, &alpha, &caps).unwrap(), &cl);
        if t < 3 {
            let wider = t_closure(&g, &u, t + 1, &alpha, &caps).unwrap();
            prop_assert!(cl.iter().all(|x| wider.contains(x)));
        }
    }

    #[test]
    fn closure_follows_relabelling(g in graph(8), x in 0usize..8, s in any::<u64>()) {
        let alpha = ratio(5, 7);
        let caps = ClosureCaps::default();
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut perm: Vec<usize> = (0..g.n()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let h = g.relabel(&perm);
        let x = x % g.n();
        let mut mapped: Vec<usize> = t_closure(&g, &[x], 2, &alpha, &caps).unwrap().into_iter().map(|v| perm[v]).collect();
        mapped.sort_unstable();
        prop_assert_eq!(mapped, t_closure(&h, &[perm[x]], 2, &alpha, &caps).unwrap());
    }
}

#[test]
fn identity_games_up_to_five_vertices() {
    for n in 1..=5 {
        for g in balgraph::canon::graphs_up_to_isomorphism(n).unwrap() {
            assert!(winners_up_to(&g, &g, 5).unwrap().iter().all(|&w| w == Winner::Duplicator));
        }
    }
}

/// Duplicator answers every round with the look-ahead move against a
/// random Spoiler, starting from positions Duplicator wins.
#[test]
fn lookahead_play_keeps_winning_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let alpha = ratio(7, 11);
    let caps = ClosureCaps::default();
    let sched = lookahead_schedule(3, 1, 2).unwrap().t;
    let mut games = 0;
    while games < 40 {
        let n = rng.gen_range(3..7);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.45) {
                    edges.push((u, v));
                }
            }
        }
        let g1 = SimpleGraph::from_edges(n, edges).unwrap();
        let g2 = if rng.gen_bool(0.5) { shuffled(&g1, rng.gen()) } else { shuffled(&g1.complement(), rng.gen()) };
        let mut state = GameState::new(g1, g2, 3);
        if ef_winner_from(&state, DEFAULT_STATE_CAP).unwrap() != Winner::Duplicator {
            continue;
        }
        games += 1;
        while state.rounds_remaining > 0 {
            let side = if rng.gen_bool(0.5) { Side::First } else { Side::Second };
            let v = rng.gen_range(0..n);
            let rep = duplicator_lookahead_move(&state, side, v, &sched, &alpha, &caps).unwrap();
            let d = rep.reply.expect("a reply whenever the position is won");
            state = match side {
                Side::First => state.play(v, d),
                Side::Second => state.play(d, v),
            };
            assert!(state.is_partial_isomorphism());
            assert_eq!(ef_winner_from(&state, DEFAULT_STATE_CAP).unwrap(), Winner::Duplicator);
        }
    }
}
