//! Command-line front end for the simulator and experiment drivers.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use bwr::experiment::{
    export_trace, gap_study, latency_sweep, overlay_toml, simulate, write_json, write_simulation, GapConfig,
    LatencyConfig, SimConfig, TopoSummary,
};
use bwr::{load_topology, ArrivalStop, Error, Policy, Scheme, SizeDist, TrafficConfig};

const SEED_ENV: &str = "BWRSIM_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "bwrsim",
    version,
    about = "Best worst-case routing simulator for long WAN flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare routing schemes under each scheduling policy on shared traces.
    Simulate(SimulateArgs),
    /// Measure the heuristic's optimality gap against the exact search.
    Gap(GapArgs),
    /// Time heuristic routing calls over a load sweep.
    Latency(LatencyArgs),
    /// Summarize a builtin or file topology.
    Topo(TopoArgs),
    /// Export or replay arrival traces.
    #[command(subcommand)]
    Trace(TraceCommand),
}

#[derive(Args, Debug)]
struct ConfigFile {
    /// TOML file with defaults for this command; flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrafficArgs {
    /// Arrival rate per slot.
    #[arg(long)]
    lambda: Option<f64>,
    /// Mean flow size in data units.
    #[arg(long)]
    mu: Option<f64>,
    /// Size distribution: exponential or pareto.
    #[arg(long)]
    dist: Option<SizeDist>,
    /// Largest flow size; sizes are clamped to 1..=max.
    #[arg(long)]
    max_size: Option<u64>,
    /// Generate arrivals for this many slots.
    #[arg(long, conflicts_with = "arrivals")]
    slots: Option<u64>,
    /// Generate exactly this many arrivals.
    #[arg(long)]
    arrivals: Option<usize>,
}

impl TrafficArgs {
    fn stop(&self) -> Option<ArrivalStop> {
        self.slots
            .map(ArrivalStop::Slots)
            .or(self.arrivals.map(ArrivalStop::Arrivals))
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    file: ConfigFile,
    /// Builtin topology (gscale, agis, ans, cogent) or a GML / edge-list file.
    #[arg(long, short)]
    topology: Option<String>,
    /// Comma-separated routing schemes: bwrh, minhop, minmax, random, optimal.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<Scheme>,
    /// Comma-separated scheduling policies: fcfs, srpt, fair.
    #[arg(long, value_delimiter = ',')]
    policy: Vec<Policy>,
    #[command(flatten)]
    traffic: TrafficArgs,
    /// Run until every flow completes after the arrival window.
    #[arg(long, overrides_with = "no_drain")]
    drain: bool,
    /// Stop at the end of the arrival window and report unfinished flows.
    #[arg(long)]
    no_drain: bool,
    /// Independent traffic replicas per scheme and policy.
    #[arg(long)]
    replicas: Option<usize>,
    /// Base seed; replica r uses seed XOR r. Defaults to $BWRSIM_SEED or 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Replay this arrival trace instead of generating traffic.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Directory for flows.csv, report.json and replica traces.
    #[arg(long, short, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[command(flatten)]
    file: ConfigFile,
    /// Comma-separated topologies.
    #[arg(long, short, value_delimiter = ',')]
    topology: Vec<String>,
    /// Comma-separated size distributions.
    #[arg(long, value_delimiter = ',')]
    dist: Vec<SizeDist>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    arrivals: Option<usize>,
    /// Comma-separated seeds; defaults to three seeds from $BWRSIM_SEED or 1.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Scheduling policy under which the network evolves.
    #[arg(long)]
    policy: Option<Policy>,
    /// Per-arrival time budget for the exact search, in seconds.
    #[arg(long)]
    budget_secs: Option<f64>,
    /// Refuse topologies with more simple paths than this between some pair.
    #[arg(long)]
    path_cap: Option<u64>,
    /// Run the exact search even on topologies over the path cap.
    #[arg(long)]
    force: bool,
    /// Use plain enumeration instead of branch and bound.
    #[arg(long)]
    exhaustive: bool,
    /// Write the JSON report here.
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LatencyArgs {
    #[command(flatten)]
    file: ConfigFile,
    /// Comma-separated topologies.
    #[arg(long, short, value_delimiter = ',')]
    topology: Vec<String>,
    /// Comma-separated size distributions.
    #[arg(long, value_delimiter = ',')]
    dist: Vec<SizeDist>,
    /// Comma-separated scheduling policies.
    #[arg(long, value_delimiter = ',')]
    policy: Vec<Policy>,
    /// Comma-separated arrival rates to sweep.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Comma-separated mean flow sizes to sweep.
    #[arg(long, value_delimiter = ',')]
    mu: Vec<f64>,
    /// Arrivals per sweep point.
    #[arg(long)]
    arrivals: Option<usize>,
    /// Defaults to $BWRSIM_SEED or 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here.
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TopoArgs {
    /// Builtin topology name or a GML / edge-list file.
    topology: String,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Also list every directed edge.
    #[arg(long)]
    edges: bool,
}

#[derive(Subcommand, Debug)]
enum TraceCommand {
    /// Generate arrivals and write them as a trace CSV.
    Export(ExportArgs),
    /// Run a trace through the simulator (one replica per scheme and policy).
    Replay(SimulateArgs),
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// Builtin topology or a GML / edge-list file.
    #[arg(long, short)]
    topology: String,
    #[command(flatten)]
    traffic: TrafficArgs,
    /// Defaults to $BWRSIM_SEED or 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Trace CSV to write.
    #[arg(long, short, value_name = "FILE")]
    out: PathBuf,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownTopology { .. } => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn env_seed() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Defaults, then the config file, then command-line flags.
fn layered<T: Serialize + DeserializeOwned>(base: T, file: &ConfigFile) -> CliResult<T> {
    let Some(path) = &file.config else {
        return Ok(base);
    };
    let text = fs::read_to_string(path).map_err(|source| Error::File {
        path: path.clone(),
        source,
    })?;
    overlay_toml(&base, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_vec<T>(slot: &mut Vec<T>, values: Vec<T>) {
    if !values.is_empty() {
        *slot = values;
    }
}

fn sim_config(args: SimulateArgs, replay: bool) -> CliResult<SimConfig> {
    let mut base = SimConfig::default();
    set(&mut base.seed, env_seed()?);
    if replay {
        base.replicas = 1;
    }
    let mut cfg = layered(base, &args.file)?;
    set(&mut cfg.topology, args.topology);
    set_vec(&mut cfg.schemes, args.scheme);
    set_vec(&mut cfg.policies, args.policy);
    set(&mut cfg.lambda, args.traffic.lambda);
    set(&mut cfg.mu, args.traffic.mu);
    set(&mut cfg.dist, args.traffic.dist);
    set(&mut cfg.max_size, args.traffic.max_size);
    set(&mut cfg.stop, args.traffic.stop());
    if args.drain {
        cfg.drain = true;
    }
    if args.no_drain {
        cfg.drain = false;
    }
    set(&mut cfg.replicas, args.replicas);
    set(&mut cfg.seed, args.seed);
    if args.trace.is_some() {
        cfg.trace = args.trace;
    }
    if args.out.is_some() {
        cfg.out_dir = args.out;
    }
    if replay && cfg.trace.is_none() {
        return Err(Failure::Usage("trace replay requires --trace FILE".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.2}"))
}

fn cmd_simulate(args: SimulateArgs, replay: bool) -> CliResult {
    let cfg = sim_config(args, replay)?;
    let sim = simulate(&cfg)?;
    println!(
        "{}: {} nodes, {} links, {} replica(s), {} flows in replica 0",
        sim.topology.name,
        sim.topology.nodes,
        sim.topology.links,
        cfg.replicas,
        sim.traces.first().map_or(0, Vec::len)
    );
    println!(
        "{:<8} {:<7} {:>10} {:>8} {:>10} {:>8} {:>10} {:>7}",
        "policy", "scheme", "mean_fct", "norm", "p99_fct", "norm", "incomplete", "std"
    );
    for a in &sim.aggregates {
        println!(
            "{:<8} {:<7} {:>10} {:>8} {:>10} {:>8} {:>10} {:>7}",
            a.policy.as_str(),
            a.scheme.as_str(),
            opt(a.mean_fct.map(|m| m.mean)),
            opt(a.normalized_mean_fct),
            opt(a.p99_fct.map(|m| m.mean)),
            opt(a.normalized_p99_fct),
            opt(a.incomplete.map(|m| m.mean)),
            opt(a.mean_fct.map(|m| m.std)),
        );
    }
    if let Some(dir) = &cfg.out_dir {
        for path in write_simulation(&sim, dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_gap(args: GapArgs) -> CliResult {
    let mut base = GapConfig::default();
    if let Some(s) = env_seed()? {
        base.seeds = (0..3).map(|i| s.wrapping_add(i)).collect();
    }
    let mut cfg = layered(base, &args.file)?;
    set_vec(&mut cfg.topologies, args.topology);
    set_vec(&mut cfg.dists, args.dist);
    set(&mut cfg.lambda, args.lambda);
    set(&mut cfg.mu, args.mu);
    set(&mut cfg.arrivals, args.arrivals);
    set_vec(&mut cfg.seeds, args.seeds);
    set(&mut cfg.policy, args.policy);
    set(&mut cfg.oracle_budget_secs, args.budget_secs);
    set(&mut cfg.path_cap, args.path_cap);
    cfg.force |= args.force;
    cfg.exhaustive |= args.exhaustive;

    let report = gap_study(&cfg)?;
    println!(
        "{:<10} {:<12} {:>6} {:>9} {:>10} {:>10} {:>9} {:>8} {:>9}",
        "topology", "dist", "flows", "timeouts", "undefined", "gap_mean", "gap_max", "exact", "max_secs"
    );
    for g in &report.groups {
        println!(
            "{:<10} {:<12} {:>6} {:>9} {:>10} {:>10.5} {:>9.3} {:>8.3} {:>9.2}",
            g.topology,
            g.dist.as_str(),
            g.evaluated,
            g.timeouts,
            g.undefined,
            g.gap_mean,
            g.gap_max,
            g.exact_share,
            g.max_cell_secs
        );
    }
    if let Some(out) = &args.out {
        write_json(&report, out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_latency(args: LatencyArgs) -> CliResult {
    let mut base = LatencyConfig::default();
    set(&mut base.seed, env_seed()?);
    let mut cfg = layered(base, &args.file)?;
    set_vec(&mut cfg.topologies, args.topology);
    set_vec(&mut cfg.dists, args.dist);
    set_vec(&mut cfg.policies, args.policy);
    set_vec(&mut cfg.lambdas, args.lambda);
    set_vec(&mut cfg.mus, args.mu);
    set(&mut cfg.arrivals, args.arrivals);
    set(&mut cfg.seed, args.seed);

    let report = latency_sweep(&cfg)?;
    let mut names: Vec<&str> = report.points.iter().map(|p| p.topology.as_str()).collect();
    names.dedup();
    for name in names {
        let pts: Vec<_> = report.points.iter().filter(|p| p.topology == name).collect();
        let max = pts.iter().map(|p| p.max_ms).fold(0.0, f64::max);
        let mean = pts.iter().map(|p| p.mean_ms).sum::<f64>() / pts.len() as f64;
        let k = pts.iter().map(|p| p.max_final_k).max().unwrap_or(0);
        println!(
            "{name:<10} points={:<4} max_ms={max:.3} mean_ms={mean:.4} max_final_k={k}",
            pts.len()
        );
    }
    println!(
        "overall max_ms={:.3} mean_of_max_ms={:.3}",
        report.max_ms, report.mean_of_max_ms
    );
    if let Some(out) = &args.out {
        write_json(&report, out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_topo(args: TopoArgs) -> CliResult {
    let topo = load_topology(&args.topology)?;
    let summary = TopoSummary::of(&topo);
    if args.json {
        let text = serde_json::to_string_pretty(&summary).map_err(Error::from)?;
        println!("{text}");
    } else {
        println!("name: {}", summary.name);
        println!("nodes: {}", summary.nodes);
        println!("links: {}", summary.links);
        println!("directed edges: {}", summary.directed_edges);
        println!("connected: {}", summary.connected);
        println!("duplicate links dropped: {}", summary.duplicate_links);
        println!("self loops dropped: {}", summary.self_loops);
        for (i, c) in summary.components.iter().enumerate() {
            println!("component {i}: {}", c.join(" "));
        }
    }
    if args.edges {
        for e in topo.dir_edges() {
            println!("{} {}", e.from, e.to);
        }
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> CliResult {
    let seed = match (args.seed, env_seed()?) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => 1,
    };
    let defaults = SimConfig::default();
    let cfg = TrafficConfig {
        lambda: args.traffic.lambda.unwrap_or(defaults.lambda),
        mu: args.traffic.mu.unwrap_or(defaults.mu),
        dist: args.traffic.dist.unwrap_or(defaults.dist),
        max_size: args.traffic.max_size.unwrap_or(defaults.max_size),
        seed,
    };
    let stop = args.traffic.stop().unwrap_or(defaults.stop);
    let n = export_trace(&cfg, &args.topology, stop, &args.out)?;
    println!("wrote {n} arrivals to {}", args.out.display());
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a, false),
        Command::Gap(a) => cmd_gap(a),
        Command::Latency(a) => cmd_latency(a),
        Command::Topo(a) => cmd_topo(a),
        Command::Trace(TraceCommand::Export(a)) => cmd_export(a),
        Command::Trace(TraceCommand::Replay(a)) => cmd_simulate(a, true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
