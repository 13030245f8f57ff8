//! Seeded experiments with versioned JSON reports and exact replay.
//!
//! Every experiment is a pure function of its parameters and master seed;
//! trial i of any experiment draws from the stream (seed, i, tag), so the
//! worker count never changes a result.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::balance::{brute_force_densest, densest_proper_induced, is_strictly_balanced, BalanceError, EnhancedParams, BRUTE_FORCE_CAP};
use crate::canon::{canonical_form, graphs_up_to_isomorphism, CanonError};
use crate::diophantine::{construct_liouville, verify_approximation, DiophantineError, LiouvilleOptions, Phi};
use crate::distinguish::{sample_gnp, poisson_experiment, run_distinguish, AlphaSpec, DistinguishError, DistinguishParams, DistinguishSummary, PoissonParams, PoissonReport};
use crate::ef::{count_extensions, expected_extensions, min_distinguishing_depth, winners_up_to, EfError, RootedGraph, Winner};
use crate::graph::SimpleGraph;
use crate::rational::{format_rational, parse_rational, to_f64};
use crate::rng::{tag, trial_rng};
use crate::sampler::{equidistributed_set, estimate_simplicity, sample_family, sample_h, satisfies_window_bound, BalancedDecomposition, FamilyFilters, RateEstimate, SampleError, SampleOptions};
use crate::symmetry::{asymmetry_rate, edge_orbit_size, h_table, orbit_report, rare_configuration_report, type_key, ColorError, ColoredGraph, Permutation, RareCaps, SymmetryError};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Distinguish(#[from] DistinguishError),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    Ef(#[from] EfError),
    #[error("bad parameter: {0}")]
    Parameter(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("report schema version {found}, this build reads {expected}")]
    Version { found: u32, expected: u32 },
    #[error("replay diverged at {path}")]
    Divergence { path: String },
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

/// A rooted graph for the extension-count experiment: roots 0..r, nonroots
/// r..r+v, edges as pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedSpec {
    pub r: usize,
    pub v: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    /// Accepted H(n, m) samples checked for strict balance, the degree
    /// window and the equidistribution of R.
    Balance { sizes: Vec<usize>, samples: u64, flow_n: usize, flow_samples: u64 },
    /// Flow-based densest proper subgraph against subset enumeration.
    DensestOracle { max_n: usize, random_n: usize, random_count: u64 },
    Simplicity { points: Vec<(usize, usize)>, trials: u64 },
    Asymmetry { points: Vec<(usize, usize)>, trials: u64 },
    Orbits { permutations: u64, max_n: usize },
    RareConfig { n: usize, r: usize, samples: u64 },
    Distinguish { params: DistinguishParams, pairs: u64 },
    Poisson { params: PoissonParams },
    Liouville { phis: Vec<String>, terms: usize, verify_terms: usize },
    EfOracle { max_n: usize, max_k: usize },
    Extensions { n: usize, p: String, alpha: String, draws: u64, rooted: Vec<RootedSpec> },
    Sample { n: usize, m: usize, count: u64, force_odd: bool },
    Family { v: usize, e: usize, count: usize, asymmetric: bool, alpha: Option<String>, max_samples: u64 },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Balance { .. } => "balance",
            Experiment::DensestOracle { .. } => "densest_oracle",
            Experiment::Simplicity { .. } => "simplicity",
            Experiment::Asymmetry { .. } => "asymmetry",
            Experiment::Orbits { .. } => "orbits",
            Experiment::RareConfig { .. } => "rare_config",
            Experiment::Distinguish { .. } => "distinguish",
            Experiment::Poisson { .. } => "poisson",
            Experiment::Liouville { .. } => "liouville",
            Experiment::EfOracle { .. } => "ef_oracle",
            Experiment::Extensions { .. } => "extensions",
            Experiment::Sample { .. } => "sample",
            Experiment::Family { .. } => "family",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub experiment: Experiment,
    pub seed: u64,
    /// Worker count; None uses the global pool.
    pub threads: Option<usize>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

impl RunConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        RunConfig { command: experiment.name().to_string(), experiment, seed, threads: None, outputs: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub result: Value,
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    pub fn typed<T: serde::de::DeserializeOwned>(&self) -> Result<T, serde_json::Error> {
        serde_json::from_value(self.result.clone())
    }
}

/// Runs the experiment on a pool of `config.threads` workers.
pub fn run(config: &RunConfig) -> Result<ExperimentReport, ExperimentError> {
    let start = Instant::now();
    let result = match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build().map_err(|e| ExperimentError::Pool(e.to_string()))?;
            pool.install(|| execute(&config.experiment, config.seed))?
        }
        None => execute(&config.experiment, config.seed)?,
    };
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        config: config.clone(),
        result,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Re-runs a report's configuration, optionally with another worker count,
/// and checks that every stored value comes out the same. Wall times are
/// ignored.
pub fn replay(report: &ExperimentReport, threads: Option<usize>) -> Result<ExperimentReport, ReplayError> {
    if report.schema_version != SCHEMA_VERSION {
        return Err(ReplayError::Version { found: report.schema_version, expected: SCHEMA_VERSION });
    }
    let mut config = report.config.clone();
    if threads.is_some() {
        config.threads = threads;
    }
    let fresh = run(&config)?;
    if let Some(path) = first_difference(&strip_times(&report.result), &strip_times(&fresh.result), "result") {
        return Err(ReplayError::Divergence { path });
    }
    Ok(fresh)
}

/// Copy of a JSON value with every `wall_time_ms` field removed.
pub fn strip_times(v: &Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(map.iter().filter(|(k, _)| k.as_str() != "wall_time_ms").map(|(k, v)| (k.clone(), strip_times(v))).collect()),
        Value::Array(a) => Value::Array(a.iter().map(strip_times).collect()),
        other => other.clone(),
    }
}

fn first_difference(a: &Value, b: &Value, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for k in x.keys().chain(y.keys()) {
                match (x.get(k), y.get(k)) {
                    (Some(p), Some(q)) => {
                        if let Some(d) = first_difference(p, q, &format!("{path}.{k}")) {
                            return Some(d);
                        }
                    }
                    _ => return Some(format!("{path}.{k}")),
                }
            }
            None
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(format!("{path}.len"));
            }
            x.iter().zip(y).enumerate().find_map(|(i, (p, q))| first_difference(p, q, &format!("{path}[{i}]")))
        }
        _ => (a != b).then(|| path.to_string()),
    }
}

pub fn execute(experiment: &Experiment, seed: u64) -> Result<Value, ExperimentError> {
    let v = match experiment {
        Experiment::Balance { sizes, samples, flow_n, flow_samples } => serde_json::to_value(balance_experiment(sizes, *samples, *flow_n, *flow_samples, seed)?)?,
        Experiment::DensestOracle { max_n, random_n, random_count } => serde_json::to_value(densest_oracle_experiment(*max_n, *random_n, *random_count, seed)?)?,
        Experiment::Simplicity { points, trials } => {
            let rates: Vec<PointRate> = points
                .iter()
                .map(|&(n, m)| Ok(PointRate { n, m, rate: estimate_simplicity(n, m, *trials, seed, &SampleOptions::default())? }))
                .collect::<Result<_, ExperimentError>>()?;
            serde_json::to_value(rates)?
        }
        Experiment::Asymmetry { points, trials } => {
            let rates: Vec<PointRate> = points
                .iter()
                .map(|&(n, m)| Ok(PointRate { n, m, rate: asymmetry_rate(n, m, *trials, seed, &SampleOptions::default())? }))
                .collect::<Result<_, ExperimentError>>()?;
            serde_json::to_value(rates)?
        }
        Experiment::Orbits { permutations, max_n } => serde_json::to_value(orbit_experiment(*permutations, *max_n, seed)?)?,
        Experiment::RareConfig { n, r, samples } => serde_json::to_value(rare_config_experiment(*n, *r, *samples, seed)?)?,
        Experiment::Distinguish { params, pairs } => serde_json::to_value::<DistinguishSummary>(run_distinguish(params, seed, *pairs)?)?,
        Experiment::Poisson { params } => serde_json::to_value::<PoissonReport>(poisson_experiment(params, seed)?)?,
        Experiment::Liouville { phis, terms, verify_terms } => serde_json::to_value(liouville_experiment(phis, *terms, *verify_terms)?)?,
        Experiment::EfOracle { max_n, max_k } => serde_json::to_value(ef_oracle_experiment(*max_n, *max_k)?)?,
        Experiment::Extensions { n, p, alpha, draws, rooted } => serde_json::to_value(extension_experiment(*n, p, alpha, *draws, rooted, seed)?)?,
        Experiment::Sample { n, m, count, force_odd } => serde_json::to_value(sample_experiment(*n, *m, *count, *force_odd, seed)?)?,
        Experiment::Family { v, e, count, asymmetric, alpha, max_samples } => serde_json::to_value(family_experiment(*v, *e, *count, *asymmetric, alpha.as_deref(), *max_samples, seed)?)?,
    };
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRate {
    pub n: usize,
    pub m: usize,
    pub rate: RateEstimate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceRecord {
    pub trial: u64,
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub r: usize,
    pub rejections: u64,
    pub strictly_balanced: bool,
    /// 0-based witness subset when strict balance fails.
    pub witness: Option<Vec<usize>>,
    /// Subset enumeration agrees with the flow checker (small n only).
    pub enumeration_agrees: Option<bool>,
    pub min_degree: usize,
    pub max_degree: usize,
    pub degree_window: bool,
    pub r_size_ok: bool,
    pub window_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceResult {
    pub records: Vec<BalanceRecord>,
    pub balance_failures: usize,
    pub enumeration_disagreements: usize,
    pub degree_failures: usize,
    pub equidistribution_failures: usize,
}

/// m cycles through [n + 2, floor(2.5 n)] as trials advance.
fn balance_point(n: usize, k: u64) -> usize {
    let hi = 5 * n / 2;
    let lo = n + 2;
    lo + (k as usize) % (hi - lo + 1)
}

pub fn balance_experiment(sizes: &[usize], samples: u64, flow_n: usize, flow_samples: u64, seed: u64) -> Result<BalanceResult, ExperimentError> {
    if sizes.is_empty() || sizes.iter().chain([&flow_n]).any(|&n| n < 4) {
        return Err(ExperimentError::Parameter("sizes must be nonempty and at least 4".into()));
    }
    let total = samples + flow_samples;
    let records: Vec<BalanceRecord> = (0..total)
        .into_par_iter()
        .map(|i| -> Result<BalanceRecord, ExperimentError> {
            let (n, m) = if i < samples {
                let n = sizes[(i % sizes.len() as u64) as usize];
                (n, balance_point(n, i / sizes.len() as u64))
            } else {
                (flow_n, balance_point(flow_n, i - samples))
            };
            let s = sample_h(n, m, &mut trial_rng(seed, i, tag::SAMPLE), &SampleOptions::default())?;
            let g = s.simple_graph.as_ref().expect("accepted samples are simple");
            let d = &s.decomposition;
            let (ok, witness) = is_strictly_balanced(g)?;
            let enumeration_agrees = if n <= BRUTE_FORCE_CAP { Some(brute_force_densest(g)? == densest_proper_induced(g)?) } else { None };
            let (lo, hi) = (g.min_degree(), g.max_degree());
            Ok(BalanceRecord {
                trial: i,
                n,
                m,
                q: d.q,
                r: d.r,
                rejections: s.rejections,
                strictly_balanced: ok,
                witness: witness.map(|w| w.subset),
                enumeration_agrees,
                min_degree: lo,
                max_degree: hi,
                degree_window: d.q <= lo && hi <= d.q + 2,
                r_size_ok: d.r_positions.len() == d.r && d.r_positions == equidistributed_set(n, d.r)?,
                window_bound: satisfies_window_bound(n, d.r, &d.r_positions),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(BalanceResult {
        balance_failures: records.iter().filter(|r| !r.strictly_balanced).count(),
        enumeration_disagreements: records.iter().filter(|r| r.enumeration_agrees == Some(false)).count(),
        degree_failures: records.iter().filter(|r| !r.degree_window).count(),
        equidistribution_failures: records.iter().filter(|r| !r.r_size_ok || !r.window_bound).count(),
        records,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensestOracleResult {
    pub classes_checked: usize,
    pub classes_at_max_n: usize,
    pub random_checked: u64,
    /// Canonical forms (hex) or trial numbers of disagreements.
    pub class_mismatches: Vec<String>,
    pub random_mismatches: Vec<u64>,
}

pub fn densest_oracle_experiment(max_n: usize, random_n: usize, random_count: u64, seed: u64) -> Result<DensestOracleResult, ExperimentError> {
    if max_n > 8 || !(2..=BRUTE_FORCE_CAP).contains(&random_n) {
        return Err(ExperimentError::Parameter("max_n <= 8 and 2 <= random_n <= 16".into()));
    }
    let mut classes = Vec::new();
    let mut at_max = 0;
    for n in 2..=max_n {
        let gs = graphs_up_to_isomorphism(n)?;
        if n == max_n {
            at_max = gs.len();
        }
        classes.extend(gs);
    }
    let class_mismatches: Vec<String> = classes
        .par_iter()
        .map(|g| -> Result<Option<String>, ExperimentError> {
            Ok((densest_proper_induced(g)? != brute_force_densest(g)?).then(|| canonical_form(g).map(|f| f.to_hex())).transpose()?)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let random_mismatches: Vec<u64> = (0..random_count)
        .into_par_iter()
        .map(|i| -> Result<Option<u64>, ExperimentError> {
            let p = BigRational::new(((i % 9) + 1).into(), 10.into());
            let g = sample_gnp(random_n, &p, &mut trial_rng(seed, i, tag::MISC));
            Ok((densest_proper_induced(&g)? != brute_force_densest(&g)?).then_some(i))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(DensestOracleResult { classes_checked: classes.len(), classes_at_max_n: at_max, random_checked: random_count, class_mismatches, random_mismatches })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub permutations: u64,
    pub pairs_checked: u64,
    pub size_mismatches: u64,
    /// Smallest orbit seen per pair type over all permutations.
    pub global_min: BTreeMap<String, usize>,
    /// Types where some permutation beat the table.
    pub below_table: Vec<String>,
    /// Populated types whose minimum stayed above the table.
    pub not_attained: Vec<String>,
}

/// Random permutations on 2..=max_n points, followed by three fixed cycle
/// types that attain every table entry.
pub fn orbit_experiment(permutations: u64, max_n: usize, seed: u64) -> Result<OrbitResult, ExperimentError> {
    if max_n < 2 {
        return Err(ExperimentError::Parameter("max_n >= 2".into()));
    }
    use rand::Rng;
    let mut perms: Vec<Permutation> = (0..permutations)
        .map(|i| {
            let mut rng = trial_rng(seed, i, tag::PERMUTATION);
            let n = rng.gen_range(2..=max_n);
            Permutation::random(n, &mut rng)
        })
        .collect();
    let fixed: [&[&[usize]]; 3] = [&[&[0, 1, 2, 3], &[4, 5], &[6, 7, 8], &[9, 10]], &[&[0, 1, 2, 3, 4, 5], &[6, 7, 8]], &[&[0, 1], &[2, 3, 4], &[5, 6, 7, 8]]];
    for c in fixed {
        perms.push(Permutation::from_cycles(12, c).map_err(|e| ExperimentError::Parameter(format!("{e:?}")))?);
    }
    let table = h_table();
    let per: Vec<(u64, u64, BTreeMap<String, usize>)> = perms
        .par_iter()
        .map(|s| {
            let rep = orbit_report(s);
            let mut pairs = 0;
            let mut bad = 0;
            for orbit in &rep.orbits {
                for &(u, v) in orbit {
                    pairs += 1;
                    if edge_orbit_size(s, u, v) != orbit.len() {
                        bad += 1;
                    }
                }
            }
            (pairs, bad, rep.h)
        })
        .collect();
    let mut global_min: BTreeMap<String, usize> = BTreeMap::new();
    let (mut pairs_checked, mut size_mismatches) = (0, 0);
    for (p, b, h) in per {
        pairs_checked += p;
        size_mismatches += b;
        for (k, v) in h {
            let e = global_min.entry(k).or_insert(usize::MAX);
            *e = (*e).min(v);
        }
    }
    let mut below_table = Vec::new();
    let mut not_attained = Vec::new();
    for (t, &h) in &table {
        if let Some(&g) = global_min.get(&type_key(*t)) {
            if g < h {
                below_table.push(type_key(*t));
            } else if g > h {
                not_attained.push(type_key(*t));
            }
        }
    }
    Ok(OrbitResult { permutations: perms.len() as u64, pairs_checked, size_mismatches, global_min, below_table, not_attained })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RareRecord {
    pub trial: u64,
    /// Attached paths, internal edges, close cycle pairs, short red
    /// segments, twin red paths.
    pub counts: [usize; 5],
    pub cycles: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RareResult {
    pub n: usize,
    pub m: usize,
    pub caps: RareCaps,
    pub records: Vec<RareRecord>,
    pub clean: u64,
    /// Samples with a nonzero count, per category.
    pub nonzero: [u64; 5],
}

pub fn rare_config_experiment(n: usize, r: usize, samples: u64, seed: u64) -> Result<RareResult, ExperimentError> {
    let m = n + r;
    let caps = RareCaps::for_n(n);
    let records: Vec<RareRecord> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<RareRecord, ExperimentError> {
            let s = sample_h(n, m, &mut trial_rng(seed, i, tag::SAMPLE), &SampleOptions::default())?;
            let cg = ColoredGraph::from_decomposition(&s.decomposition)?;
            let rep = rare_configuration_report(&cg, caps)?;
            Ok(RareRecord { trial: i, counts: rep.counts(), cycles: rep.cycles.len() })
        })
        .collect::<Result<_, _>>()?;
    let mut nonzero = [0u64; 5];
    for rec in &records {
        for (k, &c) in rec.counts.iter().enumerate() {
            if c > 0 {
                nonzero[k] += 1;
            }
        }
    }
    Ok(RareResult { n, m, caps, clean: records.iter().filter(|r| r.counts.iter().all(|&c| c == 0)).count() as u64, records, nonzero })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiouvilleRecord {
    pub phi: String,
    pub exponents: Vec<String>,
    pub next_exponent: Option<String>,
    /// p_t/q_t for t = 1..verify_terms.
    pub convergents: Vec<String>,
    pub verified: Vec<bool>,
}

pub fn liouville_experiment(phis: &[String], terms: usize, verify_terms: usize) -> Result<Vec<LiouvilleRecord>, ExperimentError> {
    phis.iter()
        .map(|s| {
            let phi = Phi::parse(s)?;
            let x = construct_liouville(phi, terms, LiouvilleOptions::default())?;
            let mut convergents = Vec::new();
            let mut verified = Vec::new();
            for t in 1..=verify_terms {
                let (p, q) = x.convergent(t)?;
                convergents.push(format!("{p}/{q}"));
                verified.push(verify_approximation(&x, t)?);
            }
            Ok(LiouvilleRecord {
                phi: s.clone(),
                exponents: x.exponents.iter().map(|e| e.to_string()).collect(),
                next_exponent: x.next_exponent.as_ref().map(|e| e.to_string()),
                convergents,
                verified,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfOracleResult {
    pub k3_p3: Option<usize>,
    pub k2_k3: Option<usize>,
    /// Graphs (up to isomorphism) where Spoiler beat a graph against itself.
    pub self_losses: Vec<String>,
    pub self_games: usize,
    pub pairs_solved: usize,
    pub monotonicity_violations: usize,
    /// Pairs of different orders whose depth exceeds min order + 1.
    pub order_bound_violations: usize,
    /// Nonisomorphic pairs that no k <= max_k + 1 distinguished.
    pub undistinguished: usize,
}

pub fn ef_oracle_experiment(max_n: usize, max_k: usize) -> Result<EfOracleResult, ExperimentError> {
    let k3_p3 = min_distinguishing_depth(&SimpleGraph::complete(3), &SimpleGraph::path(3), max_k)?;
    let k2_k3 = min_distinguishing_depth(&SimpleGraph::complete(2), &SimpleGraph::complete(3), max_k)?;
    let mut graphs = Vec::new();
    for n in 1..=max_n {
        graphs.extend(graphs_up_to_isomorphism(n)?);
    }
    let self_losses: Vec<String> = graphs
        .par_iter()
        .map(|g| -> Result<Option<String>, ExperimentError> {
            let w = winners_up_to(g, g, max_k)?;
            Ok(w.contains(&Winner::Spoiler).then(|| canonical_form(g).map(|f| f.to_hex())).transpose()?)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let pairs: Vec<(usize, usize)> = (0..graphs.len()).flat_map(|i| (i + 1..graphs.len()).map(move |j| (i, j))).collect();
    let kmax_pairs = max_n + 1;
    let outcomes: Vec<(bool, bool, bool)> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(bool, bool, bool), ExperimentError> {
            let (a, b) = (&graphs[i], &graphs[j]);
            match min_distinguishing_depth(a, b, kmax_pairs) {
                Ok(depth) => {
                    let bound = a.n() != b.n() && depth.is_some_and(|d| d > a.n().min(b.n()) + 1);
                    Ok((true, bound, depth.is_none()))
                }
                Err(EfError::NotMonotone { .. }) => Ok((false, false, false)),
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(EfOracleResult {
        k3_p3,
        k2_k3,
        self_games: graphs.len(),
        self_losses,
        pairs_solved: pairs.len(),
        monotonicity_violations: outcomes.iter().filter(|o| !o.0).count(),
        order_bound_violations: outcomes.iter().filter(|o| o.1).count(),
        undistinguished: outcomes.iter().filter(|o| o.2).count(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionRecord {
    pub rooted: RootedSpec,
    pub safe: bool,
    /// (n - r)_v p^e, exact.
    pub expected: String,
    pub expected_approx: f64,
    pub automorphisms: String,
    pub mean: f64,
    pub std_err: f64,
    pub counts: Vec<u64>,
}

pub fn extension_experiment(n: usize, p: &str, alpha: &str, draws: u64, rooted: &[RootedSpec], seed: u64) -> Result<Vec<ExtensionRecord>, ExperimentError> {
    let p = parse_rational(p).map_err(|e| ExperimentError::Parameter(e.to_string()))?;
    let alpha = parse_rational(alpha).map_err(|e| ExperimentError::Parameter(e.to_string()))?;
    let graphs: Vec<RootedGraph> = rooted.iter().map(|s| RootedGraph::new(s.r, s.v, s.edges.iter().copied())).collect::<Result<_, _>>()?;
    let per_draw: Vec<Vec<u64>> = (0..draws)
        .into_par_iter()
        .map(|i| -> Result<Vec<u64>, ExperimentError> {
            let g = sample_gnp(n, &p, &mut trial_rng(seed, i, tag::GNP_FIRST));
            graphs.iter().map(|rg| Ok(count_extensions(&g, &(0..rg.r()).collect::<Vec<_>>(), rg)?)).collect()
        })
        .collect::<Result<_, _>>()?;
    graphs
        .iter()
        .zip(rooted)
        .enumerate()
        .map(|(k, (rg, spec))| {
            let counts: Vec<u64> = per_draw.iter().map(|c| c[k]).collect();
            let d = counts.len().max(1) as f64;
            let mean = counts.iter().sum::<u64>() as f64 / d;
            let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (d - 1.0).max(1.0);
            let e = expected_extensions(n, &p, rg)?;
            Ok(ExtensionRecord {
                rooted: spec.clone(),
                safe: rg.is_safe(&alpha)?,
                expected: format_rational(&e.tuples),
                expected_approx: to_f64(&e.tuples),
                automorphisms: e.automorphisms.to_string(),
                mean,
                std_err: (var / d).sqrt(),
                counts,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub trial: u64,
    pub decomposition: BalancedDecomposition,
    pub rejections: u64,
    pub edges: Vec<(usize, usize)>,
}

pub fn sample_experiment(n: usize, m: usize, count: u64, force_odd: bool, seed: u64) -> Result<Vec<SampleRecord>, ExperimentError> {
    let opts = SampleOptions { force_odd, ..SampleOptions::default() };
    (0..count)
        .into_par_iter()
        .map(|i| {
            let s = sample_h(n, m, &mut trial_rng(seed, i, tag::SAMPLE), &opts)?;
            let g = s.simple_graph.expect("accepted samples are simple");
            Ok(SampleRecord { trial: i, rejections: s.rejections, edges: g.edges().collect(), decomposition: s.decomposition })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyResult {
    pub forms: Vec<String>,
    pub graphs: Vec<Vec<(usize, usize)>>,
    pub samples_drawn: u64,
    pub complete: bool,
}

pub fn family_experiment(v: usize, e: usize, count: usize, asymmetric: bool, alpha: Option<&str>, max_samples: u64, seed: u64) -> Result<FamilyResult, ExperimentError> {
    let enhanced = match alpha {
        Some(a) => {
            let (x, _) = AlphaSpec::parse(a).map_err(DistinguishError::from)?.value_at_precision(64).map_err(DistinguishError::from)?;
            Some(EnhancedParams::new(x))
        }
        None => None,
    };
    let fam = sample_family(v, e, count, seed, &FamilyFilters { asymmetric, enhanced }, max_samples)?;
    Ok(FamilyResult {
        forms: fam.forms.iter().map(|f| f.to_hex()).collect(),
        graphs: fam.graphs.iter().map(|g| g.edges().collect()).collect(),
        samples_drawn: fam.samples_drawn,
        complete: fam.complete,
    })
}

pub fn rate_is_zero(r: &BigRational) -> bool {
    r.is_zero() || r.to_f64() == Some(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_exact_across_worker_counts() {
        let mut config = RunConfig::new(Experiment::Sample { n: 12, m: 20, count: 12, force_odd: false }, 77);
        config.threads = Some(1);
        let report = run(&config).unwrap();
        let again = replay(&report, Some(4)).unwrap();
        assert_eq!(strip_times(&again.result), strip_times(&report.result));
        let text = serde_json::to_string(&report).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert!(replay(&back, None).is_ok());
    }

    #[test]
    fn tampering_is_detected() {
        let report = run(&RunConfig::new(Experiment::Simplicity { points: vec![(20, 26)], trials: 30 }, 5)).unwrap();
        let mut bad = report.clone();
        bad.config.seed = 6;
        assert!(matches!(replay(&bad, None), Err(ReplayError::Divergence { .. })));
        let mut old = report;
        old.schema_version = 0;
        assert!(matches!(replay(&old, None), Err(ReplayError::Version { .. })));
    }

    // Float statistics must survive a trip through report text.
    #[test]
    fn float_results_replay_from_text() {
        let params = PoissonParams::new("5/8+2^-30", 10, 16, 300, 20, 2);
        let report = run(&RunConfig::new(Experiment::Poisson { params }, 0)).unwrap();
        let back: ExperimentReport = serde_json::from_str(&serde_json::to_string_pretty(&report).unwrap()).unwrap();
        assert!(replay(&back, Some(1)).is_ok());
    }

    #[test]
    fn small_balance_run() {
        let r = balance_experiment(&[8, 10], 20, 16, 4, 3).unwrap();
        assert_eq!(r.records.len(), 24);
        assert_eq!(r.balance_failures, 0);
        assert_eq!(r.enumeration_disagreements, 0);
        assert_eq!(r.degree_failures, 0);
        assert_eq!(r.equidistribution_failures, 0);
        assert!(r.records.iter().all(|x| x.m >= x.n + 2 && x.m <= 5 * x.n / 2));
    }

    #[test]
    fn orbit_run_finds_the_table() {
        let r = orbit_experiment(100, 12, 1).unwrap();
        assert_eq!(r.size_mismatches, 0);
        assert!(r.below_table.is_empty() && r.not_attained.is_empty());
        assert_eq!(r.global_min.len(), 12);
    }
}
