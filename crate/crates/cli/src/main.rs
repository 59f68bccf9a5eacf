//! `cosine`: ingest signed graphs, pick seeds, simulate campaigns and check
//! the selection against exhaustive search.
//!
//! Exit status is 0 on success, 1 for bad input and 2 when an internal check
//! (such as the exhaustive-search comparison) fails.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cosine_core::{
    brute_force_best, build_transition, cosinemax, degree_seeds, gen_anti_balanced, gen_balanced,
    gen_random_partition, gen_random_signed_with, graph_stats, graph_stats_with_partitions,
    individual_infmax_seeds, parse_edge_list, parse_partitions, random_seeds, simulate_objective,
    trajectory_report, write_edge_list, write_partitions, write_trajectory_csv, CampaignConfig,
    MetricsWriter, PartitionVector, SeedSet, SignedGraph, TransitionMatrix, TwoGroupParams,
    WeightRange,
};

/// The selection matches the exhaustive optimum when within this gap.
const ORACLE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "cosine",
    version,
    about = "Seed selection for two-opinion campaigns on signed networks"
)]
struct Cli {
    /// Cap on worker threads (defaults to all cores).
    #[arg(long, global = true, env = "COSINE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Inputs {
    /// Edge list: `src<TAB>dst<TAB>weight` per line, `#` comments.
    #[arg(long)]
    graph: PathBuf,
    /// Group memberships: `node<TAB>group` with group 1 or 2.
    #[arg(long)]
    partitions: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Cosinemax,
    Random,
    Degree,
    Indinfmax,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Cosinemax => "cosinemax",
            Algo::Random => "random",
            Algo::Degree => "degree",
            Algo::Indinfmax => "indinfmax",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Balanced,
    AntiBalanced,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Print graph statistics as JSON.
    Ingest {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partitions: Option<PathBuf>,
        /// Also write the transition matrix in binary form here.
        #[arg(long)]
        dump_transition: Option<PathBuf>,
    },
    /// Select seeds with one strategy and write them as JSON or CSV.
    Select {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        /// Required by the random strategy.
        #[arg(long)]
        rng_seed: Option<u64>,
        /// Output file; `.csv` selects CSV, anything else JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate a seed set and write per-step metrics as CSV.
    Simulate {
        #[command(flatten)]
        inputs: Inputs,
        /// Seed file written by `select` (`.csv` or JSON).
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        t_max: usize,
        #[arg(long)]
        out: PathBuf,
        /// Label for the algorithm column.
        #[arg(long, default_value = "seeds")]
        label: String,
        /// Also write every node's opinion at every step (`t,node,value`).
        #[arg(long)]
        trajectory_out: Option<PathBuf>,
    },
    /// For every strategy and horizon, time selection and record metrics.
    Benchmark {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t_max: usize,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "cosinemax,random,degree,indinfmax"
        )]
        algos: Vec<Algo>,
        /// Required when the random strategy is included.
        #[arg(long)]
        rng_seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic instance as `<prefix>.edges.tsv` and
    /// `<prefix>.partitions.tsv`.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// First group size (balanced / anti-balanced).
        #[arg(long, default_value_t = 50)]
        n1: usize,
        /// Second group size (balanced / anti-balanced).
        #[arg(long, default_value_t = 50)]
        n2: usize,
        #[arg(long, default_value_t = 0.1)]
        p_intra: f64,
        #[arg(long, default_value_t = 0.05)]
        p_inter: f64,
        /// Skip the cycle that makes two-group instances strongly connected.
        #[arg(long)]
        no_strong: bool,
        /// Node count (random).
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        p_edge: f64,
        #[arg(long, default_value_t = 0.2)]
        p_negative: f64,
        /// Fraction of nodes placed in a group (random).
        #[arg(long, default_value_t = 0.5)]
        target_fraction: f64,
        #[arg(long, default_value_t = 0.0)]
        w_lo: f64,
        #[arg(long, default_value_t = 1.0)]
        w_hi: f64,
        #[arg(long)]
        rng_seed: u64,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Compare the selection with the exhaustive optimum on a small instance.
    Oracle {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
    },
}

/// An internal check failed; reported with exit status 2.
#[derive(Debug)]
struct InvariantViolation(String);

impl std::fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvariantViolation {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are input errors; status 2 is reserved
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<InvariantViolation>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Ingest {
            graph,
            partitions,
            dump_transition,
        } => ingest(&graph, partitions.as_deref(), dump_transition.as_deref()),
        Command::Select {
            inputs,
            algo,
            t,
            k,
            rng_seed,
            out,
        } => select(&inputs, algo, t, k, rng_seed, &out),
        Command::Simulate {
            inputs,
            seeds,
            t_max,
            out,
            label,
            trajectory_out,
        } => simulate(
            &inputs,
            &seeds,
            t_max,
            &out,
            &label,
            trajectory_out.as_deref(),
        ),
        Command::Benchmark {
            inputs,
            k,
            t_max,
            algos,
            rng_seed,
            out,
        } => benchmark(&inputs, k, t_max, &algos, rng_seed, &out),
        Command::Generate {
            kind,
            n1,
            n2,
            p_intra,
            p_inter,
            no_strong,
            n,
            p_edge,
            p_negative,
            target_fraction,
            w_lo,
            w_hi,
            rng_seed,
            out_prefix,
        } => {
            let weights = WeightRange::new(w_lo, w_hi)?;
            let (g, rho) = match kind {
                Kind::Random => {
                    let g = gen_random_signed_with(n, p_edge, p_negative, weights, rng_seed)?;
                    // separate stream so the partition does not echo the edges
                    let rho = gen_random_partition(n, target_fraction, rng_seed.wrapping_add(1))?;
                    (g, rho)
                }
                Kind::Balanced | Kind::AntiBalanced => {
                    let params = TwoGroupParams {
                        weights,
                        ensure_strong: !no_strong,
                        ..TwoGroupParams::new(n1, n2, p_intra, p_inter)
                    };
                    match kind {
                        Kind::Balanced => gen_balanced(&params, rng_seed)?,
                        _ => gen_anti_balanced(&params, rng_seed)?,
                    }
                }
            };
            generate(&g, &rho, &out_prefix)
        }
        Command::Oracle { inputs, t, k } => oracle(&inputs, t, k),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read_graph(path: &Path) -> Result<SignedGraph> {
    parse_edge_list(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn read_partitions(path: &Path, n: usize) -> Result<PartitionVector> {
    parse_partitions(open(path)?, n).with_context(|| format!("reading {}", path.display()))
}

struct Loaded {
    graph: SignedGraph,
    rho: PartitionVector,
    p: TransitionMatrix,
}

fn load(inputs: &Inputs) -> Result<Loaded> {
    let graph = read_graph(&inputs.graph)?;
    let rho = read_partitions(&inputs.partitions, graph.node_count())?;
    let p = build_transition(&graph);
    Ok(Loaded { graph, rho, p })
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn ingest(graph: &Path, partitions: Option<&Path>, dump: Option<&Path>) -> Result<()> {
    let g = read_graph(graph)?;
    let stats = match partitions {
        Some(path) => graph_stats_with_partitions(&g, &read_partitions(path, g.node_count())?)?,
        None => graph_stats(&g),
    };
    if let Some(path) = dump {
        let mut out = create(path)?;
        build_transition(&g).write_binary(&mut out)?;
        out.flush()?;
    }
    print_json(&stats)
}

fn run_algo(
    algo: Algo,
    inst: &Loaded,
    cfg: CampaignConfig,
    rng_seed: Option<u64>,
) -> Result<SeedSet> {
    let seeds = match algo {
        Algo::Cosinemax => cosinemax(&inst.p, &inst.rho, cfg)?,
        Algo::Random => {
            let Some(seed) = rng_seed else {
                bail!("the random strategy needs --rng-seed");
            };
            random_seeds(&inst.rho, cfg, seed)?
        }
        Algo::Degree => degree_seeds(&inst.graph, &inst.rho, cfg)?,
        Algo::Indinfmax => individual_infmax_seeds(&inst.p, &inst.rho, cfg)?,
    };
    Ok(seeds)
}

#[derive(Serialize)]
struct SelectSummary {
    algorithm: &'static str,
    t: usize,
    k: usize,
    seeds: usize,
    /// Sum of `|eps|` over the chosen seeds; cosinemax only.
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_objective: Option<f64>,
    simulated_objective: f64,
}

fn select(
    inputs: &Inputs,
    algo: Algo,
    t: usize,
    k: usize,
    rng_seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    let inst = load(inputs)?;
    let cfg = CampaignConfig::new(t, k)?;
    let seeds = run_algo(algo, &inst, cfg, rng_seed)?;
    let mut w = create(out)?;
    if is_csv(out) {
        seeds.write_csv(&mut w)?;
    } else {
        seeds.write_json(&mut w)?;
        writeln!(w)?;
    }
    w.flush()?;
    print_json(&SelectSummary {
        algorithm: algo.name(),
        t,
        k,
        seeds: seeds.len(),
        predicted_objective: (algo == Algo::Cosinemax).then(|| seeds.total_score()),
        simulated_objective: simulate_objective(&inst.p, &inst.rho, &seeds, t)?,
    })
}

fn read_seeds(path: &Path) -> Result<SeedSet> {
    let r = open(path)?;
    let seeds = if is_csv(path) {
        SeedSet::read_csv(r)
    } else {
        SeedSet::read_json(r)
    };
    seeds.with_context(|| format!("reading {}", path.display()))
}

fn simulate(
    inputs: &Inputs,
    seeds: &Path,
    t_max: usize,
    out: &Path,
    label: &str,
    trajectory: Option<&Path>,
) -> Result<()> {
    let inst = load(inputs)?;
    let seeds = read_seeds(seeds)?;
    let reports = trajectory_report(&inst.p, &inst.rho, &seeds, t_max)?;
    let mut w = MetricsWriter::new(create(out)?)?;
    for r in &reports {
        w.write(label, r, None)?;
    }
    w.finish()?.flush()?;
    if let Some(path) = trajectory {
        let c0 = seeds.seed_vector(inst.graph.node_count())?;
        let mut tw = create(path)?;
        write_trajectory_csv(&inst.p, &c0, t_max, &mut tw)?;
        tw.flush()?;
    }
    Ok(())
}

fn benchmark(
    inputs: &Inputs,
    k: usize,
    t_max: usize,
    algos: &[Algo],
    rng_seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    let inst = load(inputs)?;
    if algos.contains(&Algo::Random) && rng_seed.is_none() {
        bail!("the random strategy needs --rng-seed");
    }
    let mut w = MetricsWriter::new(create(out)?)?;
    for &algo in algos {
        for t in 0..=t_max {
            let cfg = CampaignConfig::new(t, k)?;
            let start = Instant::now();
            let seeds = run_algo(algo, &inst, cfg, rng_seed)?;
            let elapsed = start.elapsed();
            let report = trajectory_report(&inst.p, &inst.rho, &seeds, t)?
                .pop()
                .expect("trajectory covers t");
            w.write(algo.name(), &report, Some(elapsed))?;
        }
    }
    w.finish()?.flush()?;
    Ok(())
}

fn generate(g: &SignedGraph, rho: &PartitionVector, prefix: &Path) -> Result<()> {
    let with_suffix = |suffix: &str| {
        let mut s = prefix.as_os_str().to_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    let mut edges = create(&with_suffix(".edges.tsv"))?;
    write_edge_list(g, &mut edges)?;
    edges.flush()?;
    let mut parts = create(&with_suffix(".partitions.tsv"))?;
    write_partitions(rho, &mut parts)?;
    parts.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OracleReport {
    t: usize,
    k: usize,
    optimum: f64,
    optimal_seeds: Vec<cosine_core::Seed>,
    cosinemax: f64,
    cosinemax_seeds: Vec<cosine_core::Seed>,
    gap: f64,
    matches: bool,
}

fn oracle(inputs: &Inputs, t: usize, k: usize) -> Result<()> {
    let inst = load(inputs)?;
    let cfg = CampaignConfig::new(t, k)?;
    let (optimum, best) = brute_force_best(&inst.p, &inst.rho, cfg)?;
    let chosen = cosinemax(&inst.p, &inst.rho, cfg)?;
    let achieved = simulate_objective(&inst.p, &inst.rho, &chosen, t)?;
    let gap = optimum - achieved;
    let report = OracleReport {
        t,
        k,
        optimum,
        optimal_seeds: best.entries().to_vec(),
        cosinemax: achieved,
        cosinemax_seeds: chosen.entries().to_vec(),
        gap,
        matches: gap.abs() <= ORACLE_TOL,
    };
    print_json(&report)?;
    if !report.matches {
        return Err(InvariantViolation(format!(
            "selection achieves {achieved} but the optimum is {optimum}"
        ))
        .into());
    }
    Ok(())
}
