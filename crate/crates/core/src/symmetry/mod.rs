//! Automorphism groups, asymmetry rates, the orbit calculus of single
//! permutations and red/blue structure diagnostics of sampled graphs.

mod colored;
mod permutation;

pub use colored::*;
pub use permutation::*;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{self, CanonError, CanonOptions};
use crate::graph::SimpleGraph;
use crate::rng::{tag, trial_rng};
use crate::sampler::{sample_h, RateEstimate, SampleError, SampleOptions};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("brute force is limited to {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    pub generators: Vec<Permutation>,
    pub order: BigUint,
}

pub fn find_automorphisms(g: &SimpleGraph, cap: usize) -> Result<AutomorphismGroup, SymmetryError> {
    let (gens, order) = canon::automorphisms(g, None, CanonOptions::with_cap(cap))?;
    let generators = gens.into_iter().map(|p| Permutation::new(p).expect("engine returns permutations")).collect();
    Ok(AutomorphismGroup { generators, order })
}

/// Asymmetry test with the default vertex cap; stops at the first
/// nontrivial automorphism.
pub fn is_asymmetric(g: &SimpleGraph) -> Result<bool, SymmetryError> {
    is_asymmetric_with_cap(g, canon::DEFAULT_CAP)
}

pub fn is_asymmetric_with_cap(g: &SimpleGraph, cap: usize) -> Result<bool, SymmetryError> {
    Ok(canon::is_asymmetric(g, CanonOptions::with_cap(cap))?)
}

pub const BRUTE_FORCE_MAX: usize = 8;

/// Automorphism count by trying all n! maps.
pub fn brute_force_group_order(g: &SimpleGraph) -> Result<u64, SymmetryError> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX {
        return Err(SymmetryError::TooLarge { n, max: BRUTE_FORCE_MAX });
    }
    Ok(all_permutations(n).iter().filter(|p| canon::is_automorphism(g, p)).count() as u64)
}

/// Per-trial asymmetry flags for H(n, m); trial i draws from stream
/// (seed, i). The canonical engine cap is raised to n.
pub fn asymmetry_trials(n: usize, m: usize, trials: u64, seed: u64, opts: &SampleOptions) -> Result<Vec<bool>, SymmetryError> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i, tag::SAMPLE);
            let s = sample_h(n, m, &mut rng, opts)?;
            let g = s.simple_graph.expect("sample_h returns simple graphs");
            is_asymmetric_with_cap(&g, n.max(canon::DEFAULT_CAP))
        })
        .collect()
}

pub fn asymmetry_rate(n: usize, m: usize, trials: u64, seed: u64, opts: &SampleOptions) -> Result<RateEstimate, SymmetryError> {
    let flags = asymmetry_trials(n, m, trials, seed, opts)?;
    Ok(RateEstimate::from_counts(flags.iter().filter(|&&f| f).count() as u64, trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn small_graphs_are_symmetric() {
        for n in 1..=5usize {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            for mask in 0u32..(1 << pairs.len()) {
                let g = SimpleGraph::from_edges(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)).unwrap();
                if n > 1 {
                    assert!(!is_asymmetric(&g).unwrap());
                }
            }
        }
    }

    #[test]
    fn spider_and_chorded_cycle() {
        let spider = SimpleGraph::from_edges(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)]).unwrap();
        assert!(is_asymmetric(&spider).unwrap());
        assert_eq!(brute_force_group_order(&spider).unwrap(), 1);
        let mut g = SimpleGraph::cycle(8);
        g.add_edge(0, 3).unwrap();
        assert!(!is_asymmetric(&g).unwrap());
        let grp = find_automorphisms(&g, 64).unwrap();
        assert_eq!(grp.order.to_u64(), Some(2));
        assert_eq!(brute_force_group_order(&g).unwrap(), 2);
        for s in &grp.generators {
            assert!(is_automorphism(&g, s));
        }
    }

    #[test]
    fn group_orders_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..150 {
            let n = rng.gen_range(1..=8);
            let mut g = SimpleGraph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let grp = find_automorphisms(&g, 64).unwrap();
            assert_eq!(grp.order.to_u64(), Some(brute_force_group_order(&g).unwrap()));
        }
        assert!(matches!(brute_force_group_order(&SimpleGraph::empty(9)), Err(SymmetryError::TooLarge { .. })));
    }

    #[test]
    fn small_rate_positive() {
        let r = asymmetry_rate(12, 14, 500, 1, &SampleOptions::default()).unwrap();
        assert!(r.rate > 0.0);
    }
}
