//! Distinguishing two independent G(n, n^-alpha) graphs by an induced
//! pattern from a family of sampled balanced graphs, and the copy-count
//! experiment whose counts should look Poisson.

mod alpha;
mod count;
mod gnp;

pub use alpha::*;
pub use count::*;
pub use gnp::*;

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diophantine::convergents;
use crate::graph::SimpleGraph;
use crate::rational::{format_rational, to_f64};
use crate::rng::{tag, trial_rng};
use crate::sampler::{sample_family, Family, FamilyFilters, SampleError};
use crate::balance::EnhancedParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistinguishError {
    #[error(transparent)]
    Alpha(#[from] AlphaError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("family has {got} classes, {wanted} requested")]
    FamilyTooSmall { got: usize, wanted: usize },
    #[error("family is empty")]
    EmptyFamily,
    #[error("v must be even, got {0}")]
    OddV(usize),
    #[error("v/e = {ratio} is not a convergent of alpha within 2^-20")]
    RatioMismatch { ratio: String },
}

fn falling(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n.saturating_sub(i)))
}

/// (n)_v / |Aut h| * p^e (1 - p)^(C(v,2) - e).
pub fn expected_induced_count(n: usize, p: &BigRational, h: &SimpleGraph) -> Result<BigRational, DistinguishError> {
    let v = h.n();
    let e = h.m();
    let aut = BigInt::from(automorphism_count(h)?);
    let q = BigRational::one() - p;
    let non = v * v.saturating_sub(1) / 2 - e;
    Ok(BigRational::new(falling(n, v), aut) * num_traits::pow(p.clone(), e) * num_traits::pow(q, non))
}

/// (n)_v / |Aut h| * p^e.
pub fn expected_copy_count(n: usize, p: &BigRational, h: &SimpleGraph) -> Result<BigRational, DistinguishError> {
    let aut = BigInt::from(automorphism_count(h)?);
    Ok(BigRational::new(falling(n, h.n()), aut) * num_traits::pow(p.clone(), h.m()))
}

/// Existential sentence stating that h occurs as an induced subgraph, and
/// its quantifier depth.
pub fn distinguishing_sentence(h: &SimpleGraph) -> (String, usize) {
    let v = h.n();
    assert!(v > 0, "pattern must be nonempty");
    let prefix: String = (1..=v).map(|i| format!("∃x{i}")).collect();
    if v == 1 {
        return (format!("{prefix} (x1=x1)"), 1);
    }
    let mut lits = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            lits.push(format!("x{}≠x{}", i + 1, j + 1));
        }
    }
    for i in 0..v {
        for j in i + 1..v {
            let a = format!("x{}~x{}", i + 1, j + 1);
            lits.push(if h.has_edge(i, j) { a } else { format!("¬{a}") });
        }
    }
    (format!("{prefix} ({})", lits.join(" ∧ ")), v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    PresentInG1,
    PresentInG2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Success,
    None,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOutcome {
    pub verdict: Verdict,
    pub winner: Option<usize>,
    pub direction: Option<Direction>,
    /// Image of each pattern vertex in the graph that contains it.
    pub embedding: Option<Vec<usize>>,
    /// Family members skipped because a search hit the budget.
    pub censored: Vec<usize>,
}

/// Walks the family in order and stops at the first member present in
/// exactly one of the two graphs. Members whose presence could not be
/// settled within the budget are skipped and recorded; if nothing else
/// separates the graphs the verdict is inconclusive.
pub fn distinguish_pair(g1: &SimpleGraph, g2: &SimpleGraph, family: &[SimpleGraph], budget: u64) -> Result<PairOutcome, DistinguishError> {
    if family.is_empty() {
        return Err(DistinguishError::EmptyFamily);
    }
    let mut censored = Vec::new();
    for (i, h) in family.iter().enumerate() {
        let a = find_induced_copy(g1, h, budget)?;
        let b = find_induced_copy(g2, h, budget)?;
        let (dir, map) = match (a, b) {
            (SearchOutcome::Censored, _) | (_, SearchOutcome::Censored) => {
                censored.push(i);
                continue;
            }
            (SearchOutcome::Found(m), SearchOutcome::Absent) => (Direction::PresentInG1, m),
            (SearchOutcome::Absent, SearchOutcome::Found(m)) => (Direction::PresentInG2, m),
            _ => continue,
        };
        return Ok(PairOutcome {
            verdict: Verdict::Success,
            winner: Some(i),
            direction: Some(dir),
            embedding: Some(map),
            censored,
        });
    }
    Ok(PairOutcome {
        verdict: if censored.is_empty() { Verdict::None } else { Verdict::Inconclusive },
        winner: None,
        direction: None,
        embedding: None,
        censored,
    })
}

/// Re-checks a success: the embedding is an induced copy in the winning
/// graph and a fresh search with another vertex order finds nothing in the
/// other graph.
pub fn verify_witness(winner: &SimpleGraph, loser: &SimpleGraph, h: &SimpleGraph, map: &[usize], budget: u64) -> Result<bool, DistinguishError> {
    if !is_embedding(winner, h, map, Mode::Induced) {
        return Ok(false);
    }
    Ok(find_copy(loser, h, Mode::Induced, budget, true)? == SearchOutcome::Absent)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishParams {
    pub n: usize,
    pub alpha: String,
    pub alpha_bits: u64,
    pub v: usize,
    pub e: usize,
    pub family_size: usize,
    pub budget: u64,
    pub family_max_samples: u64,
    /// Multiplier in v = floor(omega ln n / ln ln n); recorded only.
    pub omega: f64,
}

impl DistinguishParams {
    pub fn new(n: usize, alpha: &str, v: usize, e: usize, family_size: usize) -> Self {
        DistinguishParams {
            n,
            alpha: alpha.to_string(),
            alpha_bits: 64,
            v,
            e,
            family_size,
            budget: DEFAULT_NODE_BUDGET,
            family_max_samples: 200_000,
            omega: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamSeeds {
    pub master: u64,
    pub pair: u64,
    pub g1_stream: u64,
    pub g2_stream: u64,
    pub family_stream: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishReport {
    pub seeds: StreamSeeds,
    pub n: usize,
    pub alpha: String,
    pub alpha_bits: u64,
    pub p: String,
    pub v: usize,
    pub e: usize,
    pub family_size: usize,
    pub verdict: Verdict,
    pub winner_form: Option<String>,
    pub winner_index: Option<usize>,
    pub direction: Option<Direction>,
    /// 1-based host vertices, indexed by pattern vertex.
    pub embedding: Option<Vec<usize>>,
    pub sentence: Option<String>,
    pub quantifier_depth: Option<usize>,
    pub witness_verified: bool,
    pub censored_members: Vec<usize>,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishSummary {
    pub params: DistinguishParams,
    pub seed: u64,
    pub family_forms: Vec<String>,
    pub family_samples_drawn: u64,
    pub reports: Vec<DistinguishReport>,
    pub successes: usize,
    pub success_rate: f64,
    /// For each family member, the fraction of all sampled graphs that
    /// contain it as an induced subgraph.
    pub containment_rates: Vec<f64>,
    pub max_containment_rate: f64,
    pub all_witnesses_verified: bool,
}

pub fn distinguish_family(params: &DistinguishParams, seed: u64) -> Result<Family, DistinguishError> {
    let spec = AlphaSpec::parse(&params.alpha)?;
    let (a, _) = spec.value_at_precision(params.alpha_bits)?;
    let filters = FamilyFilters {
        asymmetric: true,
        enhanced: Some(EnhancedParams::new(a)),
    };
    let fam = sample_family(params.v, params.e, params.family_size, seed, &filters, params.family_max_samples)?;
    if fam.graphs.len() < params.family_size {
        return Err(DistinguishError::FamilyTooSmall { got: fam.graphs.len(), wanted: params.family_size });
    }
    Ok(fam)
}

/// Runs `pairs` independent pair trials sharing one family.
pub fn run_distinguish(params: &DistinguishParams, seed: u64, pairs: u64) -> Result<DistinguishSummary, DistinguishError> {
    let spec = AlphaSpec::parse(&params.alpha)?;
    let p = alpha_to_p(params.n as u64, &spec, params.alpha_bits)?;
    let fam = distinguish_family(params, seed)?;
    let family = &fam.graphs;
    let results: Vec<(DistinguishReport, Vec<bool>)> = (0..pairs)
        .into_par_iter()
        .map(|i| -> Result<_, DistinguishError> {
            let start = Instant::now();
            let g1 = sample_gnp(params.n, &p, &mut trial_rng(seed, i, tag::GNP_FIRST));
            let g2 = sample_gnp(params.n, &p, &mut trial_rng(seed, i, tag::GNP_SECOND));
            let out = distinguish_pair(&g1, &g2, family, params.budget)?;
            let mut verified = false;
            let (mut sentence, mut depth, mut form) = (None, None, None);
            if let (Some(w), Some(dir), Some(map)) = (out.winner, out.direction, &out.embedding) {
                let (win, lose) = match dir {
                    Direction::PresentInG1 => (&g1, &g2),
                    Direction::PresentInG2 => (&g2, &g1),
                };
                verified = verify_witness(win, lose, &family[w], map, params.budget)?;
                let (s, d) = distinguishing_sentence(&family[w]);
                sentence = Some(s);
                depth = Some(d);
                form = Some(fam.forms[w].to_hex());
            }
            // Containment of every member in both graphs.
            let mut contained = Vec::with_capacity(2 * family.len());
            for g in [&g1, &g2] {
                for h in family {
                    contained.push(find_induced_copy(g, h, params.budget)?.is_found());
                }
            }
            let report = DistinguishReport {
                seeds: StreamSeeds {
                    master: seed,
                    pair: i,
                    g1_stream: tag::GNP_FIRST,
                    g2_stream: tag::GNP_SECOND,
                    family_stream: tag::FAMILY,
                },
                n: params.n,
                alpha: spec.describe(),
                alpha_bits: params.alpha_bits,
                p: format_rational(&p),
                v: params.v,
                e: params.e,
                family_size: family.len(),
                verdict: out.verdict,
                winner_form: form,
                winner_index: out.winner,
                direction: out.direction,
                embedding: out.embedding.map(|m| m.iter().map(|x| x + 1).collect()),
                sentence,
                quantifier_depth: depth,
                witness_verified: verified,
                censored_members: out.censored,
                wall_time_ms: start.elapsed().as_millis() as u64,
            };
            Ok((report, contained))
        })
        .collect::<Result<_, _>>()?;
    let k = family.len();
    let graphs = 2 * pairs as usize;
    let mut containment_rates = vec![0.0; k];
    for (_, c) in &results {
        for j in 0..2 {
            for (h, rate) in containment_rates.iter_mut().enumerate() {
                if c[j * k + h] {
                    *rate += 1.0;
                }
            }
        }
    }
    for r in &mut containment_rates {
        *r /= graphs.max(1) as f64;
    }
    let reports: Vec<DistinguishReport> = results.into_iter().map(|(r, _)| r).collect();
    let successes = reports.iter().filter(|r| r.verdict == Verdict::Success).count();
    Ok(DistinguishSummary {
        params: params.clone(),
        seed,
        family_forms: fam.forms.iter().map(|f| f.to_hex()).collect(),
        family_samples_drawn: fam.samples_drawn,
        all_witnesses_verified: reports.iter().all(|r| r.verdict != Verdict::Success || r.witness_verified),
        successes,
        success_rate: successes as f64 / pairs.max(1) as f64,
        max_containment_rate: containment_rates.iter().cloned().fold(0.0, f64::max),
        containment_rates,
        reports,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonParams {
    pub alpha: String,
    pub alpha_bits: u64,
    pub v: usize,
    pub e: usize,
    pub n: usize,
    pub trials: u64,
    pub classes: usize,
    pub budget: u64,
    pub family_max_samples: u64,
}

impl PoissonParams {
    pub fn new(alpha: &str, v: usize, e: usize, n: usize, trials: u64, classes: usize) -> Self {
        PoissonParams {
            alpha: alpha.to_string(),
            alpha_bits: 64,
            v,
            e,
            n,
            trials,
            classes,
            budget: DEFAULT_NODE_BUDGET,
            family_max_samples: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub form: String,
    pub automorphisms: u64,
    pub expected: String,
    pub expected_approx: f64,
    pub mean: f64,
    pub std_err: f64,
    pub p_zero: f64,
    pub histogram: BTreeMap<u64, u64>,
    /// Fraction of trial pairs (2j, 2j+1) where exactly one count is zero.
    pub disagreement_rate: f64,
    pub censored_trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub params: PoissonParams,
    pub seed: u64,
    pub p: String,
    pub classes: Vec<ClassStats>,
}

/// Checks that v is even and v/e is a convergent of alpha within 2^-20.
pub fn check_poisson_parameters(alpha: &BigRational, v: usize, e: usize) -> Result<(), DistinguishError> {
    if v % 2 == 1 {
        return Err(DistinguishError::OddV(v));
    }
    let ratio = BigRational::new(v.into(), e.into());
    let close = (alpha - &ratio).abs() <= ratio_tolerance();
    if !close || !convergents(alpha, usize::MAX).contains(&ratio) {
        return Err(DistinguishError::RatioMismatch { ratio: format_rational(&ratio) });
    }
    Ok(())
}

/// Copy counts of `classes` sampled patterns in `trials` independent
/// G(n, n^-alpha) draws.
pub fn poisson_experiment(params: &PoissonParams, seed: u64) -> Result<PoissonReport, DistinguishError> {
    let spec = AlphaSpec::parse(&params.alpha)?;
    let (a, _) = spec.value_at_precision(params.alpha_bits)?;
    check_poisson_parameters(&a, params.v, params.e)?;
    let p = alpha_to_p(params.n as u64, &spec, params.alpha_bits)?;
    let filters = FamilyFilters { asymmetric: true, enhanced: None };
    let fam = sample_family(params.v, params.e, params.classes, seed, &filters, params.family_max_samples)?;
    if fam.graphs.len() < params.classes {
        return Err(DistinguishError::FamilyTooSmall { got: fam.graphs.len(), wanted: params.classes });
    }
    poisson_counts(params, seed, &p, &fam)
}

fn poisson_counts(params: &PoissonParams, seed: u64, p: &BigRational, fam: &Family) -> Result<PoissonReport, DistinguishError> {
    let counts: Vec<Vec<CountResult>> = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let g = sample_gnp(params.n, p, &mut trial_rng(seed, t, tag::GNP_FIRST));
            fam.graphs.iter().map(|h| count_copies(&g, h, params.budget)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut classes = Vec::new();
    for (i, h) in fam.graphs.iter().enumerate() {
        let xs: Vec<u64> = counts.iter().map(|c| c[i].count).collect();
        let trials = xs.len().max(1) as f64;
        let mean = xs.iter().sum::<u64>() as f64 / trials;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (trials - 1.0).max(1.0);
        let mut histogram = BTreeMap::new();
        for &x in &xs {
            *histogram.entry(x).or_insert(0) += 1;
        }
        let pairs: Vec<bool> = xs.chunks_exact(2).map(|w| (w[0] == 0) != (w[1] == 0)).collect();
        let expected = expected_copy_count(params.n, p, h)?;
        classes.push(ClassStats {
            form: fam.forms[i].to_hex(),
            automorphisms: automorphism_count(h)?.to_u64().unwrap_or(u64::MAX),
            expected_approx: to_f64(&expected),
            expected: format_rational(&expected),
            mean,
            std_err: (var / trials).sqrt(),
            p_zero: xs.iter().filter(|&&x| x == 0).count() as f64 / trials,
            histogram,
            disagreement_rate: if pairs.is_empty() { 0.0 } else { pairs.iter().filter(|&&d| d).count() as f64 / pairs.len() as f64 },
            censored_trials: counts.iter().filter(|c| c[i].censored).count() as u64,
        });
    }
    Ok(PoissonReport {
        params: params.clone(),
        seed,
        p: format_rational(p),
        classes,
    })
}

/// Poisson statistics with an explicit edge probability, for checks that
/// bypass the alpha parameterization (for example p = 0).
pub fn poisson_with_p(params: &PoissonParams, seed: u64, p: &BigRational) -> Result<PoissonReport, DistinguishError> {
    let filters = FamilyFilters { asymmetric: true, enhanced: None };
    let fam = sample_family(params.v, params.e, params.classes, seed, &filters, params.family_max_samples)?;
    if fam.graphs.len() < params.classes {
        return Err(DistinguishError::FamilyTooSmall { got: fam.graphs.len(), wanted: params.classes });
    }
    poisson_counts(params, seed, p, &fam)
}

pub fn is_zero_probability(p: &BigRational) -> bool {
    p.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn expectation_examples() {
        assert_eq!(expected_induced_count(10, &ratio(1, 2), &SimpleGraph::complete(3)).unwrap(), ratio(15, 1));
        assert!(expected_induced_count(10, &ratio(0, 1), &SimpleGraph::path(3)).unwrap().is_zero());
    }

    #[test]
    fn induced_mean_matches_expectation() {
        let h = SimpleGraph::path(3);
        let p = ratio(1, 3);
        let expected = to_f64(&expected_induced_count(12, &p, &h).unwrap());
        let xs: Vec<f64> = (0..1000)
            .map(|i| {
                let g = sample_gnp(12, &p, &mut trial_rng(9, i, tag::GNP_FIRST));
                count_induced_copies(&g, &h, u64::MAX).unwrap().count as f64
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0).sqrt();
        assert!((mean - expected).abs() < 3.0 * sd / 1000f64.sqrt(), "{mean} vs {expected}");
    }

    #[test]
    fn sentences() {
        let (s, d) = distinguishing_sentence(&SimpleGraph::complete(3));
        assert_eq!(s, "∃x1∃x2∃x3 (x1≠x2 ∧ x1≠x3 ∧ x2≠x3 ∧ x1~x2 ∧ x1~x3 ∧ x2~x3)");
        assert_eq!(d, 3);
        assert_eq!(distinguishing_sentence(&SimpleGraph::empty(1)), ("∃x1 (x1=x1)".to_string(), 1));
        let (s, d) = distinguishing_sentence(&SimpleGraph::path(3));
        assert_eq!(d, 3);
        assert!(s.contains("¬x1~x3"));
    }

    #[test]
    fn planted_and_isomorphic_pairs() {
        let fam = vec![SimpleGraph::cycle(5), SimpleGraph::complete(4)];
        let mut g1 = SimpleGraph::empty(12);
        for i in 0..5 {
            g1.add_edge(i + 3, (i + 1) % 5 + 3).unwrap();
        }
        let g2 = SimpleGraph::empty(12);
        let out = distinguish_pair(&g1, &g2, &fam, u64::MAX).unwrap();
        assert_eq!(out.verdict, Verdict::Success);
        assert_eq!(out.winner, Some(0));
        assert_eq!(out.direction, Some(Direction::PresentInG1));
        assert!(verify_witness(&g1, &g2, &fam[0], out.embedding.as_ref().unwrap(), u64::MAX).unwrap());
        let swapped = distinguish_pair(&g2, &g1, &fam, u64::MAX).unwrap();
        assert_eq!(swapped.winner, Some(0));
        assert_eq!(swapped.direction, Some(Direction::PresentInG2));

        let perm: Vec<usize> = (0..12).rev().collect();
        let g3 = g1.relabel(&perm);
        assert_eq!(distinguish_pair(&g1, &g3, &fam, u64::MAX).unwrap().verdict, Verdict::None);
    }

    #[test]
    fn pair_is_antisymmetric_on_random_graphs() {
        let fam: Vec<SimpleGraph> = vec![SimpleGraph::path(4), SimpleGraph::cycle(4), SimpleGraph::star(3), SimpleGraph::complete(3)];
        for i in 0..60 {
            let g1 = sample_gnp(9, &ratio(1, 5), &mut trial_rng(4, i, tag::GNP_FIRST));
            let g2 = sample_gnp(9, &ratio(1, 5), &mut trial_rng(4, i, tag::GNP_SECOND));
            let a = distinguish_pair(&g1, &g2, &fam, u64::MAX).unwrap();
            let b = distinguish_pair(&g2, &g1, &fam, u64::MAX).unwrap();
            assert_eq!(a.winner, b.winner);
            assert_eq!(a.verdict, b.verdict);
            match (a.direction, b.direction) {
                (Some(Direction::PresentInG1), Some(Direction::PresentInG2)) | (Some(Direction::PresentInG2), Some(Direction::PresentInG1)) | (None, None) => {}
                other => panic!("not antisymmetric: {other:?}"),
            }
        }
    }

    #[test]
    fn parameter_checks() {
        let a = ratio(5, 8) + crate::rational::pow2(-30);
        assert!(check_poisson_parameters(&a, 10, 16).is_ok());
        assert!(matches!(check_poisson_parameters(&a, 5, 8), Err(DistinguishError::OddV(5))));
        assert!(check_poisson_parameters(&a, 10, 15).is_err());
    }

    #[test]
    fn zero_probability_gives_zero_counts() {
        let params = PoissonParams::new("5/8", 10, 16, 40, 20, 2);
        let rep = poisson_with_p(&params, 3, &BigRational::zero()).unwrap();
        assert!(rep.classes.iter().all(|c| c.mean == 0.0 && c.p_zero == 1.0));
    }

    #[test]
    fn single_class_mean_matches_formula() {
        let params = PoissonParams::new("5/8", 10, 16, 60, 400, 1);
        let rep = poisson_experiment(&params, 5).unwrap();
        let c = &rep.classes[0];
        assert!((c.mean - c.expected_approx).abs() <= 3.0 * c.std_err.max(1e-9), "{c:?}");
    }
}
