//! Experiment drivers: paired-trace scenario sweeps, the optimality-gap
//! study, the routing-latency sweep and topology summaries.
//!
//! Replicas, cells and sweep points run as independent parallel jobs; each
//! job drives its own single-threaded [`Engine`].

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{summarize, write_flow_csv, FlowOutcome, MeanStd, RunReport, RunTag, REPORT_SCHEMA};
use crate::routing::{optimality_gap, route_optimal_exhaustive, route_optimal_within, Router, Scheme};
use crate::scheduler::{Engine, Policy, StopCondition};
use crate::topology::{load_topology, NodeId, Topology};
use crate::traffic::{
    gen_arrivals, read_trace, write_trace, ArrivalEvent, ArrivalStop, SizeDist, TrafficConfig, DEFAULT_MAX_SIZE,
};

/// Seed for replica `replica` of a run seeded with `seed`: `seed XOR replica`.
pub fn replica_seed(seed: u64, replica: usize) -> u64 {
    seed ^ replica as u64
}

/// Random stream for the random-path baseline, disjoint from the traffic stream.
pub fn router_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn file_err(path: &FsPath) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::File {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &FsPath) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(file_err(dir))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(file_err(path))?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Builtin topology name or a GML / edge-list file.
    pub topology: String,
    pub schemes: Vec<Scheme>,
    pub policies: Vec<Policy>,
    pub lambda: f64,
    pub mu: f64,
    pub dist: SizeDist,
    pub max_size: u64,
    pub stop: ArrivalStop,
    /// Keep simulating after the arrival window until every flow finishes.
    /// When false, flows unfinished at a slot horizon are reported incomplete.
    pub drain: bool,
    pub replicas: usize,
    pub seed: u64,
    /// Replay this arrival trace in every replica instead of generating one.
    pub trace: Option<PathBuf>,
    /// Output location; not part of the scenario, so never echoed.
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            topology: "ans".into(),
            schemes: Scheme::COMPARED.to_vec(),
            policies: Policy::ALL.to_vec(),
            lambda: 1.0,
            mu: 50.0,
            dist: SizeDist::Exponential,
            max_size: DEFAULT_MAX_SIZE,
            stop: ArrivalStop::Slots(500),
            drain: true,
            replicas: 10,
            seed: 1,
            trace: None,
            out_dir: None,
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn traffic(&self, replica: usize) -> TrafficConfig {
        TrafficConfig {
            lambda: self.lambda,
            mu: self.mu,
            dist: self.dist,
            max_size: self.max_size,
            seed: replica_seed(self.seed, replica),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        if self.schemes.is_empty() || self.policies.is_empty() {
            return Err(Error::Config("at least one scheme and one policy are required".into()));
        }
        if matches!(self.stop, ArrivalStop::Slots(0) | ArrivalStop::Arrivals(0)) {
            return Err(Error::Config("stop must be > 0".into()));
        }
        if self.trace.is_none() {
            self.traffic(0).validate()?;
        }
        Ok(())
    }

    fn stop_condition(&self) -> StopCondition {
        match (self.stop, self.drain) {
            (ArrivalStop::Slots(t), false) => StopCondition::Horizon(t),
            _ => StopCondition::AllComplete,
        }
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// Overlays the keys of TOML document `text` onto `base`.
///
/// Keys missing from the document keep the value from `base`; unknown keys
/// are rejected by the target type.
pub fn overlay_toml<T: Serialize + serde::de::DeserializeOwned>(base: &T, text: &str) -> Result<T> {
    let config_err = |e: &dyn std::fmt::Display| Error::Config(e.to_string());
    let mut merged = toml::Table::try_from(base).map_err(|e| config_err(&e))?;
    let file: toml::Table = text.parse().map_err(|e| config_err(&e))?;
    merged.extend(file);
    merged.try_into().map_err(|e| config_err(&e))
}

/// Outcome of one engine run.
#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub flows: Vec<FlowOutcome>,
    pub latencies: Vec<Duration>,
    pub slots: u64,
}

/// Runs `arrivals` through one scheme and policy until `stop`.
pub fn run_scenario(
    topo: &Topology,
    scheme: Scheme,
    policy: Policy,
    arrivals: Vec<ArrivalEvent>,
    stop: StopCondition,
    router_seed: u64,
) -> Result<ScenarioRun> {
    let router = Router::new(scheme, router_rng(router_seed));
    let mut engine = Engine::new(topo, router, policy, arrivals)?;
    engine.run_until(stop)?;
    let latencies = engine.admissions().iter().map(|a| a.route.stats.elapsed).collect();
    Ok(ScenarioRun {
        flows: FlowOutcome::collect(engine.index()),
        latencies,
        slots: engine.slot(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub scheme: Scheme,
    pub policy: Policy,
    pub replica: usize,
    pub seed: u64,
    pub slots: u64,
    pub report: RunReport,
}

/// Cross-replica statistics for one (scheme, policy) pair.
#[derive(Clone, Debug, Serialize)]
pub struct Aggregate {
    pub scheme: Scheme,
    pub policy: Policy,
    pub mean_fct: Option<MeanStd>,
    pub p99_fct: Option<MeanStd>,
    pub max_fct: Option<MeanStd>,
    pub incomplete: Option<MeanStd>,
    /// Cross-replica mean divided by the best scheme's under the same policy.
    pub normalized_mean_fct: Option<f64>,
    pub normalized_p99_fct: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Simulation {
    pub schema: &'static str,
    pub config: SimConfig,
    pub topology: TopoSummary,
    /// Mean arrival size per replica after truncation.
    pub realized_mean_size: Vec<f64>,
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    #[serde(skip)]
    pub traces: Vec<Vec<ArrivalEvent>>,
}

impl Simulation {
    pub fn aggregate(&self, scheme: Scheme, policy: Policy) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.scheme == scheme && a.policy == policy)
    }
}

fn replica_arrivals(cfg: &SimConfig, topo: &Topology, replica: usize) -> Result<Vec<ArrivalEvent>> {
    match &cfg.trace {
        Some(path) => read_trace(File::open(path).map_err(file_err(path))?),
        None => gen_arrivals(&cfg.traffic(replica), topo, cfg.stop),
    }
}

/// Runs every scheme and policy on each replica's shared arrival trace.
pub fn simulate(cfg: &SimConfig) -> Result<Simulation> {
    cfg.validate()?;
    let topo = load_topology(&cfg.topology)?;
    let stop = cfg.stop_condition();
    let echo = cfg.echo();

    let traces = (0..cfg.replicas)
        .map(|r| replica_arrivals(cfg, &topo, r))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, Scheme, Policy)> = (0..cfg.replicas)
        .flat_map(|r| {
            cfg.schemes
                .iter()
                .flat_map(move |&s| cfg.policies.iter().map(move |&p| (r, s, p)))
        })
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(replica, scheme, policy)| {
            let seed = replica_seed(cfg.seed, replica);
            let run = run_scenario(&topo, scheme, policy, traces[replica].clone(), stop, seed)?;
            let mut echo = echo.clone();
            echo["replica"] = replica.into();
            echo["replica_seed"] = seed.into();
            echo["scheme"] = scheme.as_str().into();
            echo["policy"] = policy.as_str().into();
            Ok(RunRecord {
                scheme,
                policy,
                replica,
                seed,
                slots: run.slots,
                report: summarize(run.flows, &[], &run.latencies, echo),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let aggregates = aggregate_runs(&runs, &cfg.schemes, &cfg.policies);
    let realized_mean_size = traces
        .iter()
        .map(|t| {
            let n = t.len().max(1) as f64;
            t.iter().map(|a| a.volume as f64).sum::<f64>() / n
        })
        .collect();
    Ok(Simulation {
        schema: REPORT_SCHEMA,
        config: cfg.clone(),
        topology: TopoSummary::of(&topo),
        realized_mean_size,
        runs,
        aggregates,
        traces,
    })
}

fn aggregate_runs(runs: &[RunRecord], schemes: &[Scheme], policies: &[Policy]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for &policy in policies {
        let mut group = Vec::new();
        for &scheme in schemes {
            let reports: Vec<&RunReport> = runs
                .iter()
                .filter(|r| r.scheme == scheme && r.policy == policy)
                .map(|r| &r.report)
                .collect();
            let stat = |f: &dyn Fn(&RunReport) -> Option<f64>| -> Option<MeanStd> {
                let vals: Vec<f64> = reports.iter().filter_map(|r| f(r)).collect();
                MeanStd::of(&vals)
            };
            group.push(Aggregate {
                scheme,
                policy,
                mean_fct: stat(&|r| r.mean_fct),
                p99_fct: stat(&|r| r.tail_fct_p99.map(|v| v as f64)),
                max_fct: stat(&|r| r.tail_fct_max.map(|v| v as f64)),
                incomplete: stat(&|r| Some(r.incomplete_count as f64)),
                normalized_mean_fct: None,
                normalized_p99_fct: None,
            });
        }
        let best_mean = group.iter().filter_map(|a| a.mean_fct.map(|m| m.mean)).reduce(f64::min);
        let best_p99 = group.iter().filter_map(|a| a.p99_fct.map(|m| m.mean)).reduce(f64::min);
        for a in &mut group {
            a.normalized_mean_fct = a.mean_fct.zip(best_mean).map(|(m, b)| m.mean / b);
            a.normalized_p99_fct = a.p99_fct.zip(best_p99).map(|(m, b)| m.mean / b);
        }
        out.extend(group);
    }
    out
}

/// `# config=<json>` line placed above CSV headers.
fn config_comment(echo: &impl Serialize) -> Result<String> {
    Ok(format!("# config={}\n", serde_json::to_string(echo)?))
}

/// Writes `flows.csv`, `report.json` and `traces/replica_<r>.csv` under `dir`.
pub fn write_simulation(sim: &Simulation, dir: &FsPath) -> Result<Vec<PathBuf>> {
    let comment = config_comment(&sim.config)?;

    let flows_path = dir.join("flows.csv");
    let mut w = create(&flows_path)?;
    w.write_all(comment.as_bytes())?;
    let tags: Vec<(RunTag<'_>, &[FlowOutcome])> = sim
        .runs
        .iter()
        .map(|r| {
            let tag = RunTag {
                scheme: r.scheme.as_str(),
                policy: r.policy.as_str(),
                seed: r.seed,
            };
            (tag, r.report.per_flow.as_slice())
        })
        .collect();
    write_flow_csv(&mut w, tags)?;
    w.flush()?;

    let report_path = dir.join("report.json");
    let mut w = create(&report_path)?;
    serde_json::to_writer_pretty(&mut w, sim)?;
    w.write_all(b"\n")?;
    w.flush()?;

    let mut written = vec![flows_path, report_path];
    for (r, trace) in sim.traces.iter().enumerate() {
        let path = dir.join("traces").join(format!("replica_{r}.csv"));
        let mut w = create(&path)?;
        let mut echo = serde_json::to_value(&sim.config)?;
        echo["replica"] = r.into();
        echo["replica_seed"] = replica_seed(sim.config.seed, r).into();
        w.write_all(config_comment(&echo)?.as_bytes())?;
        write_trace(&mut w, trace)?;
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Generates one arrival trace and writes it with its config comment.
pub fn export_trace(cfg: &TrafficConfig, topology: &str, stop: ArrivalStop, path: &FsPath) -> Result<usize> {
    let topo = load_topology(topology)?;
    let events = gen_arrivals(cfg, &topo, stop)?;
    let mut w = create(path)?;
    let echo = serde_json::json!({ "topology": topo.name(), "traffic": cfg, "stop": stop });
    w.write_all(config_comment(&echo)?.as_bytes())?;
    write_trace(&mut w, &events)?;
    w.flush()?;
    Ok(events.len())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapConfig {
    pub topologies: Vec<String>,
    pub dists: Vec<SizeDist>,
    pub lambda: f64,
    pub mu: f64,
    pub arrivals: usize,
    pub seeds: Vec<u64>,
    /// Scheduling policy under which the network state evolves.
    pub policy: Policy,
    /// Per-arrival wall-clock budget for the exact search, in seconds.
    pub oracle_budget_secs: f64,
    /// Refuse topologies where some pair has more simple paths than this.
    pub path_cap: u64,
    /// Skip the path-count guard.
    pub force: bool,
    /// Use plain enumeration instead of branch and bound for the oracle.
    pub exhaustive: bool,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            topologies: vec!["gscale".into(), "agis".into(), "ans".into()],
            dists: SizeDist::ALL.to_vec(),
            lambda: 10.0,
            mu: 50.0,
            arrivals: 1000,
            seeds: vec![1, 2, 3],
            policy: Policy::Fcfs,
            oracle_budget_secs: 60.0,
            path_cap: 100_000,
            force: false,
            exhaustive: false,
        }
    }
}

/// Counts simple paths from `src` to `dst`, stopping once `cap` is exceeded.
pub fn count_simple_paths(topo: &Topology, src: NodeId, dst: NodeId, cap: u64) -> u64 {
    fn go(topo: &Topology, here: NodeId, dst: NodeId, on: &mut [bool], count: &mut u64, cap: u64) {
        if here == dst {
            *count += 1;
            return;
        }
        for &(next, _) in topo.neighbors(here) {
            if on[next] || *count > cap {
                continue;
            }
            on[next] = true;
            go(topo, next, dst, on, count, cap);
            on[next] = false;
        }
    }
    let mut on = vec![false; topo.node_count()];
    on[src] = true;
    let mut count = 0;
    go(topo, src, dst, &mut on, &mut count, cap);
    count
}

/// Refuses topologies on which the exact search is likely intractable.
///
/// Probes, for every node, the simple-path count to its farthest node.
pub fn oracle_guard(topo: &Topology, cap: u64) -> Result<()> {
    for src in topo.nodes() {
        let dist = topo.hops_to(src);
        let Some(far) = topo
            .nodes()
            .filter(|&v| v != src)
            .max_by_key(|&v| (dist[v], std::cmp::Reverse(v)))
        else {
            continue;
        };
        let count = count_simple_paths(topo, src, far, cap);
        if count > cap {
            return Err(Error::Config(format!(
                "topology {} has more than {cap} simple paths between {src} and {far}; \
                 the exact oracle would be intractable (raise the path cap or force to override)",
                topo.name()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapSample {
    pub flow: usize,
    pub active_flows: usize,
    pub heuristic_weight: u64,
    pub optimal_weight: u64,
    pub heuristic_hops: usize,
    pub optimal_hops: usize,
    /// Infinite when the optimum is 0 and the heuristic's weight is not.
    pub gap: f64,
}

/// `(undefined, finite mean, finite max, exact share)` over gap samples.
fn gap_summary<'a>(samples: impl Iterator<Item = &'a GapSample>) -> (usize, f64, f64, f64) {
    let (mut total, mut undefined, mut exact, mut sum, mut max) = (0, 0, 0, 0.0, 0.0f64);
    for s in samples {
        total += 1;
        if s.gap.is_finite() {
            sum += s.gap;
            max = max.max(s.gap);
            exact += usize::from(s.gap == 0.0);
        } else {
            undefined += 1;
        }
    }
    let finite = (total - undefined).max(1) as f64;
    (undefined, sum / finite, max, exact as f64 / total.max(1) as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct GapCell {
    pub topology: String,
    pub dist: SizeDist,
    pub seed: u64,
    pub arrivals: usize,
    pub evaluated: usize,
    pub timeouts: usize,
    /// Arrivals with a zero optimum but a positive heuristic weight.
    pub undefined: usize,
    /// Mean over arrivals with a finite gap.
    pub gap_mean: f64,
    pub gap_max: f64,
    /// Share of arrivals where the heuristic matched the optimum.
    pub exact_share: f64,
    pub elapsed_secs: f64,
    #[serde(skip)]
    pub samples: Vec<GapSample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub schema: &'static str,
    pub config: GapConfig,
    pub cells: Vec<GapCell>,
    /// Cells pooled over seeds.
    pub groups: Vec<GapGroup>,
    pub undefined: usize,
    pub gap_mean: f64,
    pub gap_max: f64,
}

/// Gap statistics for one topology and distribution, pooled over all seeds.
#[derive(Clone, Debug, Serialize)]
pub struct GapGroup {
    pub topology: String,
    pub dist: SizeDist,
    pub evaluated: usize,
    pub timeouts: usize,
    pub undefined: usize,
    pub gap_mean: f64,
    pub gap_max: f64,
    pub exact_share: f64,
    /// Longest single-seed cell runtime.
    pub max_cell_secs: f64,
}

impl GapGroup {
    fn pool(cells: &[&GapCell]) -> GapGroup {
        let samples = || cells.iter().flat_map(|c| c.samples.iter());
        let (undefined, gap_mean, gap_max, exact_share) = gap_summary(samples());
        GapGroup {
            topology: cells[0].topology.clone(),
            dist: cells[0].dist,
            evaluated: samples().count(),
            timeouts: cells.iter().map(|c| c.timeouts).sum(),
            undefined,
            gap_mean,
            gap_max,
            exact_share,
            max_cell_secs: cells.iter().map(|c| c.elapsed_secs).fold(0.0, f64::max),
        }
    }
}

/// Evaluates the heuristic against the exact optimum on one cell.
///
/// The network evolves with the heuristic's choices; the optimum is computed
/// counterfactually on each arrival's snapshot.
pub fn gap_cell(cfg: &GapConfig, topo: &Topology, dist: SizeDist, seed: u64) -> Result<GapCell> {
    let start = Instant::now();
    let traffic = TrafficConfig::new(cfg.lambda, cfg.mu, dist, seed);
    let arrivals = gen_arrivals(&traffic, topo, ArrivalStop::Arrivals(cfg.arrivals))?;
    let router = Router::new(Scheme::Bwrh, router_rng(seed));
    let mut engine = Engine::new(topo, router, cfg.policy, arrivals)?;
    let budget = Duration::try_from_secs_f64(cfg.oracle_budget_secs)
        .map_err(|e| Error::Config(format!("oracle budget: {e}")))?;

    let mut samples = Vec::with_capacity(cfg.arrivals);
    let mut timeouts = 0;
    let mut failure = None;
    engine.run_until_with(StopCondition::ArrivalsAdmitted, &mut |view| {
        if failure.is_some() {
            return;
        }
        let oracle = if cfg.exhaustive {
            route_optimal_exhaustive(view.topo, view.index, view.request)
        } else {
            route_optimal_within(view.topo, view.index, view.request, Some(budget))
        };
        let optimal = match oracle {
            Ok(r) => r,
            Err(Error::Timeout(_)) => {
                timeouts += 1;
                return;
            }
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let gap = match optimality_gap(view.route.weight, optimal.weight) {
            Ok(gap) => gap,
            Err(Error::UndefinedGap { .. }) => f64::INFINITY,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        samples.push(GapSample {
            flow: view.flow,
            active_flows: view.index.active_count(),
            heuristic_weight: view.route.weight,
            optimal_weight: optimal.weight,
            heuristic_hops: view.route.hops,
            optimal_hops: optimal.hops,
            gap,
        });
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let (undefined, gap_mean, gap_max, exact_share) = gap_summary(samples.iter());
    Ok(GapCell {
        topology: topo.name().to_string(),
        dist,
        seed,
        arrivals: cfg.arrivals,
        evaluated: samples.len(),
        timeouts,
        undefined,
        gap_mean,
        gap_max,
        exact_share,
        elapsed_secs: start.elapsed().as_secs_f64(),
        samples,
    })
}

/// Runs [`gap_cell`] for every topology, distribution and seed.
pub fn gap_study(cfg: &GapConfig) -> Result<GapReport> {
    TrafficConfig::new(cfg.lambda, cfg.mu, SizeDist::Pareto, 0).validate()?;
    let topos = cfg
        .topologies
        .iter()
        .map(|t| load_topology(t))
        .collect::<Result<Vec<_>>>()?;
    if !cfg.force {
        for t in &topos {
            oracle_guard(t, cfg.path_cap)?;
        }
    }
    let jobs: Vec<(&Topology, SizeDist, u64)> = topos
        .iter()
        .flat_map(|t| {
            cfg.dists
                .iter()
                .flat_map(move |&d| cfg.seeds.iter().map(move |&s| (t, d, s)))
        })
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(t, d, s)| gap_cell(cfg, t, d, s))
        .collect::<Result<Vec<_>>>()?;
    let mut groups = Vec::new();
    for t in &topos {
        for &d in &cfg.dists {
            let members: Vec<&GapCell> = cells.iter().filter(|c| c.topology == t.name() && c.dist == d).collect();
            if !members.is_empty() {
                groups.push(GapGroup::pool(&members));
            }
        }
    }
    let gap_mean = cells.iter().map(|c| c.gap_mean).sum::<f64>() / cells.len().max(1) as f64;
    let gap_max = cells.iter().map(|c| c.gap_max).fold(0.0, f64::max);
    let undefined = cells.iter().map(|c| c.undefined).sum();
    Ok(GapReport {
        schema: REPORT_SCHEMA,
        config: cfg.clone(),
        cells,
        groups,
        undefined,
        gap_mean,
        gap_max,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatencyConfig {
    pub topologies: Vec<String>,
    pub dists: Vec<SizeDist>,
    pub policies: Vec<Policy>,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub arrivals: usize,
    pub seed: u64,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        LatencyConfig {
            topologies: vec!["gscale".into(), "agis".into(), "ans".into(), "cogent".into()],
            dists: SizeDist::ALL.to_vec(),
            policies: Policy::ALL.to_vec(),
            lambdas: (1..=10).map(f64::from).collect(),
            mus: vec![5.0, 10.0, 20.0, 30.0, 40.0, 50.0],
            arrivals: 1000,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatencyPoint {
    pub topology: String,
    pub dist: SizeDist,
    pub policy: Policy,
    pub lambda: f64,
    pub mu: f64,
    pub calls: usize,
    pub max_ms: f64,
    pub mean_ms: f64,
    pub max_final_k: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatencyReport {
    pub schema: &'static str,
    pub config: LatencyConfig,
    pub points: Vec<LatencyPoint>,
    pub max_ms: f64,
    pub mean_of_max_ms: f64,
}

/// Times every heuristic routing call for one sweep point.
pub fn latency_point(
    topo: &Topology,
    dist: SizeDist,
    policy: Policy,
    lambda: f64,
    mu: f64,
    arrivals: usize,
    seed: u64,
) -> Result<LatencyPoint> {
    let traffic = TrafficConfig::new(lambda, mu, dist, seed);
    let events = gen_arrivals(&traffic, topo, ArrivalStop::Arrivals(arrivals))?;
    let mut engine = Engine::new(topo, Router::new(Scheme::Bwrh, router_rng(seed)), policy, events)?;
    engine.run_until(StopCondition::ArrivalsAdmitted)?;
    let ms: Vec<f64> = engine
        .admissions()
        .iter()
        .map(|a| a.route.stats.elapsed.as_secs_f64() * 1e3)
        .collect();
    Ok(LatencyPoint {
        topology: topo.name().to_string(),
        dist,
        policy,
        lambda,
        mu,
        calls: ms.len(),
        max_ms: ms.iter().copied().fold(0.0, f64::max),
        mean_ms: ms.iter().sum::<f64>() / ms.len().max(1) as f64,
        max_final_k: engine
            .admissions()
            .iter()
            .map(|a| a.route.stats.final_k)
            .max()
            .unwrap_or(0),
    })
}

pub fn latency_sweep(cfg: &LatencyConfig) -> Result<LatencyReport> {
    let topos = cfg
        .topologies
        .iter()
        .map(|t| load_topology(t))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for t in &topos {
        for &d in &cfg.dists {
            for &p in &cfg.policies {
                for &l in &cfg.lambdas {
                    for &m in &cfg.mus {
                        jobs.push((t, d, p, l, m));
                    }
                }
            }
        }
    }
    let points = jobs
        .par_iter()
        .map(|&(t, d, p, l, m)| latency_point(t, d, p, l, m, cfg.arrivals, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let max_ms = points.iter().map(|p| p.max_ms).fold(0.0, f64::max);
    let mean_of_max_ms = points.iter().map(|p| p.max_ms).sum::<f64>() / points.len().max(1) as f64;
    Ok(LatencyReport {
        schema: REPORT_SCHEMA,
        config: cfg.clone(),
        points,
        max_ms,
        mean_of_max_ms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopoSummary {
    pub name: String,
    pub nodes: usize,
    pub links: usize,
    pub directed_edges: usize,
    pub connected: bool,
    /// Components as label lists, only when the graph is disconnected.
    pub components: Vec<Vec<String>>,
    pub duplicate_links: usize,
    pub self_loops: usize,
}

impl TopoSummary {
    pub fn of(topo: &Topology) -> Self {
        let comps = topo.components();
        let connected = comps.len() <= 1;
        let components = if connected {
            Vec::new()
        } else {
            comps
                .iter()
                .map(|c| c.iter().map(|&v| topo.label(v).unwrap_or("?").to_string()).collect())
                .collect()
        };
        let dedup = topo.dedup_stats();
        TopoSummary {
            name: topo.name().to_string(),
            nodes: topo.node_count(),
            links: topo.link_count(),
            directed_edges: topo.edge_count(),
            connected,
            components,
            duplicate_links: dedup.duplicate_links,
            self_loops: dedup.self_loops,
        }
    }
}

/// Writes any serializable report as pretty JSON.
pub fn write_json(value: &impl Serialize, path: &FsPath) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::builtin_topology;

    #[test]
    fn replica_seeds_are_distinct() {
        let seeds: std::collections::BTreeSet<_> = (0..10).map(|r| replica_seed(7, r)).collect();
        assert_eq!(seeds.len(), 10);
        assert_eq!(replica_seed(7, 0), 7);
    }

    #[test]
    fn toml_overlay_keeps_unset_keys() {
        let base = SimConfig {
            seed: 99,
            ..SimConfig::default()
        };
        let cfg = overlay_toml(&base, "topology = \"agis\"\nstop = { arrivals = 40 }\n").unwrap();
        assert_eq!(cfg.topology, "agis");
        assert_eq!(cfg.stop, ArrivalStop::Arrivals(40));
        assert_eq!(cfg.seed, 99);
        assert!(overlay_toml(&base, "horizon = 3\n").is_err());

        let gap: GapConfig = overlay_toml(&GapConfig::default(), "seeds = [4]\nforce = true\n").unwrap();
        assert_eq!((gap.seeds, gap.force, gap.arrivals), (vec![4], true, 1000));
    }

    #[test]
    fn guard_accepts_small_refuses_cogent() {
        for name in ["gscale", "agis", "ans"] {
            oracle_guard(&builtin_topology(name).unwrap(), 100_000).unwrap();
        }
        assert!(oracle_guard(&builtin_topology("cogent").unwrap(), 100_000).is_err());
    }

    #[test]
    fn simple_path_counts() {
        let t = crate::topology::tests::graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(count_simple_paths(&t, 0, 2, 10), 2);
        let full = crate::topology::tests::graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(count_simple_paths(&full, 0, 3, 100), 5);
    }

    #[test]
    fn first_gap_sample_is_zero() {
        let cfg = GapConfig {
            arrivals: 30,
            ..GapConfig::default()
        };
        let t = builtin_topology("gscale").unwrap();
        let cell = gap_cell(&cfg, &t, SizeDist::Exponential, 1).unwrap();
        assert_eq!(cell.evaluated, 30);
        assert_eq!(cell.samples[0].gap, 0.0);
        assert_eq!(cell.samples[0].optimal_weight, 0);
    }

    #[test]
    fn config_file_and_validation() {
        let cfg = SimConfig::from_toml(
            r#"
            topology = "gscale"
            schemes = ["bwrh", "minhop"]
            policies = ["srpt"]
            lambda = 2.0
            stop = { arrivals = 40 }
            replicas = 2
            "#,
        )
        .unwrap();
        assert_eq!(cfg.schemes, vec![Scheme::Bwrh, Scheme::MinHop]);
        assert_eq!(cfg.stop, ArrivalStop::Arrivals(40));
        assert_eq!(cfg.mu, 50.0);
        assert!(SimConfig::from_toml("bogus = 1").is_err());
        let bad = SimConfig {
            replicas: 0,
            ..SimConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn small_simulation_pairs_traces() {
        let cfg = SimConfig {
            topology: "gscale".into(),
            stop: ArrivalStop::Slots(40),
            replicas: 2,
            ..SimConfig::default()
        };
        let sim = simulate(&cfg).unwrap();
        assert_eq!(sim.runs.len(), 2 * 4 * 3);
        assert_eq!(sim.aggregates.len(), 4 * 3);
        for a in &sim.aggregates {
            if let Some(n) = a.normalized_mean_fct {
                assert!(n >= 1.0);
            }
        }
        for policy in Policy::ALL {
            let ones = sim
                .aggregates
                .iter()
                .filter(|a| a.policy == policy && a.normalized_mean_fct == Some(1.0))
                .count();
            assert!(ones >= 1);
        }
        // Every run of a replica saw the same arrivals.
        for r in &sim.runs {
            assert_eq!(r.report.flows, sim.traces[r.replica].len());
        }
    }
}
