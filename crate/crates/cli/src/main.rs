use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use balgraph::balance::{is_enhanced_balanced, is_strictly_balanced, EnhancedParams};
use balgraph::diophantine::{construct_liouville, irrationality_witness_search, verify_approximation, LiouvilleOptions, Phi};
use balgraph::distinguish::{AlphaSpec, DistinguishParams, DistinguishSummary, PoissonParams, Verdict};
use balgraph::ef::{t_closure, winners_up_to, ClosureCaps, EfError, Winner};
use balgraph::experiment::{self, Experiment, ExperimentReport, ReplayError, RunConfig, SampleRecord, SCHEMA_VERSION};
use balgraph::rational::{format_rational, parse_rational, pow2};
use balgraph::sampler::BalancedDecomposition;
use balgraph::symmetry::{rare_configuration_report, ColoredGraph, RareCaps};
use balgraph::SimpleGraph;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "balgraph", version, about = "Random strictly balanced graphs and the tools around them")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Master seed.
    #[arg(long, global = true, env = "BALGRAPH_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw accepted samples of H(n, m) into a directory.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        out: PathBuf,
        /// Accept odd n; the result lies outside the construction's regime.
        #[arg(long)]
        force_odd: bool,
        /// Warn when m/n exceeds this; all guarantees assume bounded density.
        #[arg(long, default_value_t = 3.0)]
        max_ratio: f64,
    },
    /// Check strict (and optionally enhanced) balancedness of an edge list.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        enhanced: bool,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        delta0: Option<String>,
        #[arg(long)]
        beta0: Option<String>,
    },
    /// Sample a family of pairwise nonisomorphic strictly balanced graphs.
    Family {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        asymmetric: bool,
        /// Also require enhanced balancedness for this alpha.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 200_000)]
        max_samples: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distinguish independent pairs of G(n, n^-alpha) by a family member.
    Distinguish {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        family_size: usize,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        alpha_bits: Option<u64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Copy-count distribution of small strictly balanced graphs.
    Poisson {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 5)]
        classes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rare-configuration report for a sample sidecar.
    Diagnose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        max_cycle_len: Option<usize>,
    },
    /// Solve the EF game on two edge lists for k = 1..=kmax.
    Ef {
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        #[arg(long)]
        kmax: usize,
    },
    /// t-closure of a vertex tuple.
    EfClosure {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated 1-based vertices.
        #[arg(long)]
        tuple: String,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        alpha: String,
    },
    /// Liouville-type number for phi, term by term.
    Liouville {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Rationals p/q with |alpha - p/q| <= q^-d, q <= qmax.
    AlphaWitness {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        d: String,
        #[arg(long)]
        qmax: u64,
        /// Precision of the surrogate for irrational alpha.
        #[arg(long, default_value_t = 256)]
        bits: u64,
    },
    /// Re-run a report and check that every value matches.
    Replay {
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    let g = cli.global;
    match cli.command {
        Command::Sample { n, m, count, out, force_odd, max_ratio } => {
            if n > 0 && m as f64 / n as f64 > max_ratio {
                eprintln!("warning: m/n = {:.2} exceeds {max_ratio}; the balance guarantees are for bounded m/n", m as f64 / n as f64);
            }
            sample(&g, n, m, count, &out, force_odd)
        }
        Command::Verify { input, enhanced, alpha, delta0, beta0 } => verify(&input, enhanced, alpha, delta0, beta0),
        Command::Family { v, e, count, asymmetric, alpha, max_samples, out } => {
            let report = run(&g, Experiment::Family { v, e, count, asymmetric, alpha, max_samples }, out.as_deref())?;
            Ok(if report.result["complete"] == json!(true) { OK } else { INCONCLUSIVE })
        }
        Command::Distinguish { n, alpha, v, e, family_size, trials, budget, alpha_bits, omega, out } => {
            AlphaSpec::parse(&alpha)?;
            let mut params = DistinguishParams::new(n, &alpha, v, e, family_size);
            if let Some(b) = budget {
                params.budget = b;
            }
            if let Some(b) = alpha_bits {
                params.alpha_bits = b;
            }
            if let Some(w) = omega {
                params.omega = w;
            }
            let report = run(&g, Experiment::Distinguish { params, pairs: trials }, out.as_deref())?;
            let s: DistinguishSummary = report.typed()?;
            let verdicts: Vec<Verdict> = s.reports.iter().map(|r| r.verdict).collect();
            Ok(if verdicts.contains(&Verdict::Inconclusive) {
                INCONCLUSIVE
            } else if verdicts.contains(&Verdict::None) || !s.all_witnesses_verified {
                NEGATIVE
            } else {
                OK
            })
        }
        Command::Poisson { alpha, v, e, n, trials, classes, out } => {
            AlphaSpec::parse(&alpha)?;
            run(&g, Experiment::Poisson { params: PoissonParams::new(&alpha, v, e, n, trials, classes) }, out.as_deref())?;
            Ok(OK)
        }
        Command::Diagnose { input, max_cycle_len } => diagnose(&input, max_cycle_len),
        Command::Ef { g1, g2, kmax } => ef(&read_graph(&g1)?, &read_graph(&g2)?, kmax),
        Command::EfClosure { input, tuple, t, alpha } => ef_closure(&input, &tuple, t, &alpha),
        Command::Liouville { phi, terms } => liouville(&phi, terms),
        Command::AlphaWitness { alpha, d, qmax, bits } => alpha_witness(&alpha, &d, qmax, bits),
        Command::Replay { report } => replay(&report, g.threads),
    }
}

fn read_graph(path: &Path) -> Result<SimpleGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SimpleGraph::parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn rational(s: &str) -> Result<num_rational::BigRational> {
    parse_rational(s).map_err(|e| anyhow!("{e}"))
}

fn emit(text: &str) {
    // A closed pipe (e.g. `| head`) is not an error.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print(v: &Value) -> Result<()> {
    emit(&serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_report(report: &ExperimentReport, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            emit(&text);
            Ok(())
        }
    }
}

fn config(g: &Global, experiment: Experiment, outputs: Vec<String>) -> RunConfig {
    let mut c = RunConfig::new(experiment, g.seed);
    c.threads = g.threads;
    c.outputs = outputs;
    c
}

fn run(g: &Global, experiment: Experiment, out: Option<&Path>) -> Result<ExperimentReport> {
    let outputs = out.map(|p| vec![p.display().to_string()]).unwrap_or_default();
    let report = experiment::run(&config(g, experiment, outputs))?;
    write_report(&report, out)?;
    Ok(report)
}

/// Per-sample JSON written next to each edge list.
#[derive(Serialize, Deserialize)]
struct Sidecar {
    schema_version: u32,
    seed: u64,
    trial: u64,
    rejections: u64,
    decomposition: BalancedDecomposition,
}

fn sample(g: &Global, n: usize, m: usize, count: u64, out: &Path, force_odd: bool) -> Result<u8> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let width = count.saturating_sub(1).to_string().len().max(4);
    let names: Vec<String> = (0..count).map(|i| format!("sample_{i:0width$}")).collect();
    let report_path = out.join("report.json");
    let mut outputs = vec![report_path.display().to_string()];
    for name in &names {
        outputs.push(out.join(format!("{name}.el")).display().to_string());
        outputs.push(out.join(format!("{name}.json")).display().to_string());
    }
    let report = experiment::run(&config(g, Experiment::Sample { n, m, count, force_odd }, outputs))?;
    let records: Vec<SampleRecord> = report.typed()?;
    for (rec, name) in records.iter().zip(&names) {
        let graph = SimpleGraph::from_edges(n, rec.edges.iter().copied())?;
        fs::write(out.join(format!("{name}.el")), graph.write_edge_list())?;
        let side = Sidecar { schema_version: SCHEMA_VERSION, seed: g.seed, trial: rec.trial, rejections: rec.rejections, decomposition: rec.decomposition.clone() };
        fs::write(out.join(format!("{name}.json")), serde_json::to_string_pretty(&side)? + "\n")?;
    }
    write_report(&report, Some(&report_path))?;
    Ok(OK)
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn verify(input: &Path, enhanced: bool, alpha: Option<String>, delta0: Option<String>, beta0: Option<String>) -> Result<u8> {
    let g = read_graph(input)?;
    let (ok, witness) = is_strictly_balanced(&g)?;
    let mut out = json!({
        "n": g.n(),
        "m": g.m(),
        "density": format_rational(&g.density()),
        "strictly_balanced": ok,
        "witness": witness.map(|w| json!({
            "vertices": one_based(&w.subset),
            "edges": w.edges,
            "density": format_rational(&w.density),
        })),
    });
    let mut pass = ok;
    if enhanced {
        let alpha = alpha.ok_or_else(|| anyhow!("--enhanced needs --alpha"))?;
        let (a, _) = AlphaSpec::parse(&alpha)?.value_at_precision(64)?;
        let mut p = EnhancedParams::new(a);
        if let Some(d) = delta0 {
            p.delta0 = rational(&d)?;
        }
        if let Some(b) = beta0 {
            p.beta0 = rational(&b)?;
        }
        let (eok, violation) = is_enhanced_balanced(&g, &p)?;
        out["enhanced_balanced"] = json!(eok);
        out["enhanced_violation"] = json!(violation.map(|v| json!({ "vertices": one_based(&v.subset), "edges": v.edges })));
        pass &= eok;
    }
    print(&out)?;
    Ok(if pass { OK } else { NEGATIVE })
}

fn diagnose(input: &Path, max_cycle_len: Option<usize>) -> Result<u8> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let v: Value = serde_json::from_str(&text)?;
    // A sample sidecar, or a bare decomposition.
    let d: BalancedDecomposition = serde_json::from_value(v.get("decomposition").cloned().unwrap_or(v)).context("no decomposition in input")?;
    let cg = ColoredGraph::from_decomposition(&d)?;
    let mut caps = RareCaps::for_n(d.n);
    if let Some(l) = max_cycle_len {
        caps.max_cycle_len = l;
        caps.max_path_len = l;
    }
    let rep = rare_configuration_report(&cg, caps)?;
    print(&serde_json::to_value(&rep)?)?;
    Ok(if rep.is_clean() { OK } else { NEGATIVE })
}

fn ef(g1: &SimpleGraph, g2: &SimpleGraph, kmax: usize) -> Result<u8> {
    let winners = match winners_up_to(g1, g2, kmax) {
        Ok(w) => w,
        Err(EfError::StateSpace(cap)) => {
            print(&json!({ "inconclusive": format!("state space exceeded {cap} positions") }))?;
            return Ok(INCONCLUSIVE);
        }
        Err(e) => return Err(e.into()),
    };
    let first = winners.iter().position(|&w| w == Winner::Spoiler);
    let monotone = first.is_none_or(|i| winners[i..].iter().all(|&w| w == Winner::Spoiler));
    print(&json!({
        "winners": winners.iter().enumerate().map(|(i, w)| json!({ "k": i + 1, "winner": w })).collect::<Vec<_>>(),
        "min_distinguishing_depth": first.map(|i| i + 1),
        "monotone": monotone,
    }))?;
    Ok(OK)
}

fn ef_closure(input: &Path, tuple: &str, t: usize, alpha: &str) -> Result<u8> {
    let g = read_graph(input)?;
    let mut u = Vec::new();
    for s in tuple.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let x: usize = s.parse().with_context(|| format!("bad vertex {s:?}"))?;
        if x == 0 || x > g.n() {
            bail!("vertex {x} outside 1..={}", g.n());
        }
        u.push(x - 1);
    }
    let a = rational(alpha)?;
    let cl = t_closure(&g, &u, t, &a, &ClosureCaps::default())?;
    print(&json!({ "tuple": one_based(&u), "t": t, "alpha": format_rational(&a), "closure": one_based(&cl), "size": cl.len() }))?;
    Ok(OK)
}

fn liouville(phi: &str, terms: usize) -> Result<u8> {
    let x = construct_liouville(Phi::parse(phi)?, terms, LiouvilleOptions::default())?;
    let mut rows = Vec::new();
    let mut all = true;
    for t in 1..=x.terms() {
        let u = x.exponent(t).map(|e| e.to_string());
        let conv = x.convergent(t).ok().map(|(p, q)| format!("{p}/{q}"));
        let tail = x.tail_exponent(t).map(|k| format!("2^-{k}"));
        let verified = verify_approximation(&x, t).ok();
        all &= verified != Some(false);
        rows.push(json!({ "t": t, "u": u, "convergent": conv, "residual_below": tail, "verified": verified }));
    }
    print(&json!({ "phi": phi, "terms": rows }))?;
    Ok(if all { OK } else { NEGATIVE })
}

fn alpha_witness(alpha: &str, d: &str, qmax: u64, bits: u64) -> Result<u8> {
    let spec = AlphaSpec::parse(alpha)?;
    let (x, exact) = spec.value_at_precision(bits)?;
    let (lo, hi) = if exact { (x.clone(), x) } else { (&x - pow2(-(bits as i64)), &x + pow2(-(bits as i64))) };
    let search = irrationality_witness_search(&lo, &hi, &rational(d)?, &BigUint::from(qmax))?;
    print(&json!({
        "alpha": spec.describe(),
        "interval": [format_rational(&lo), format_rational(&hi)],
        "d": d,
        "qmax": qmax,
        "search": search,
    }))?;
    Ok(if search.hits.is_empty() { NEGATIVE } else { OK })
}

fn replay(path: &Path, threads: Option<usize>) -> Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let report: ExperimentReport = serde_json::from_str(&text).context("not a report")?;
    match experiment::replay(&report, threads) {
        Ok(fresh) => {
            print(&json!({ "replayed": path.display().to_string(), "equal": true, "wall_time_ms": fresh.wall_time_ms }))?;
            Ok(OK)
        }
        Err(ReplayError::Divergence { path: at }) => {
            print(&json!({ "replayed": path.display().to_string(), "equal": false, "diverged_at": at }))?;
            Ok(NEGATIVE)
        }
        Err(e) => Err(e.into()),
    }
}
