//! Sampled H(60, 75) graphs should almost never contain two equipotent
//! alternating cycles. The hand-built positive case lives with the unit
//! tests of the colouring code.

use balgraph::rng::{tag, trial_rng};
use balgraph::sampler::{sample_h, SampleOptions};
use balgraph::symmetry::{equipotent_cycle_pairs, find_alternating_cycles, ColoredGraph, RareCaps};
use rayon::prelude::*;

const SAMPLES: u64 = 200;
const MIN_CLEAN: f64 = 0.95;

#[test]
fn equipotent_pairs_are_rare() {
    let (n, m) = (60, 75);
    let caps = RareCaps::for_n(n);
    let with_pairs: Vec<u64> = (0..SAMPLES)
        .into_par_iter()
        .filter(|&i| {
            let s = sample_h(n, m, &mut trial_rng(2024, i, tag::SAMPLE), &SampleOptions::default()).unwrap();
            let cg = ColoredGraph::from_decomposition(&s.decomposition).unwrap();
            let cycles = find_alternating_cycles(&cg, caps.max_cycle_len);
            !equipotent_cycle_pairs(&cg, &cycles).is_empty()
        })
        .collect();
    let clean = 1.0 - with_pairs.len() as f64 / SAMPLES as f64;
    println!("equipotent control: {clean:.3} of {SAMPLES} samples clean (need {MIN_CLEAN}), cycle cap {}", caps.max_cycle_len);
    assert!(clean >= MIN_CLEAN, "clean fraction {clean:.3} < {MIN_CLEAN}; samples with pairs: {with_pairs:?}");
}
