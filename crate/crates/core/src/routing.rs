//! Path selection for a newly arriving flow.
//!
//! The weight of a candidate path is the total number of remaining data
//! units over the distinct ongoing flows that share at least one directed
//! edge with it. A flow crossing the path on several edges counts once.
//! In the worst case every one of those competing units is sent before the
//! new flow's last unit, so `weight + volume` bounds the new flow's
//! completion time whatever the scheduling policy.
//!
//! [`route_bwrh`] is the iterative-deepening heuristic, [`route_optimal`]
//! the exact branch-and-bound search, and the remaining routers are the
//! comparison baselines.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowstate::FlowIndex;
use crate::topology::{EdgeId, NodeId, Path, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RouteRequest {
    pub src: NodeId,
    pub dst: NodeId,
    pub volume: u64,
}

impl RouteRequest {
    pub fn new(src: NodeId, dst: NodeId, volume: u64) -> Result<Self> {
        if src == dst {
            return Err(Error::SameEndpoints(src));
        }
        if volume == 0 {
            return Err(Error::Config("route request volume must be >= 1".into()));
        }
        Ok(RouteRequest { src, dst, volume })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Complete candidate paths whose weight was evaluated.
    pub paths_examined: u64,
    /// Final hop bound reached by the heuristic's deepening loop.
    pub final_k: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteResult {
    pub path: Path,
    pub weight: u64,
    pub hops: usize,
    pub stats: SearchStats,
}

impl RouteResult {
    fn new(path: Path, weight: u64, stats: SearchStats) -> Self {
        let hops = path.hops();
        RouteResult {
            path,
            weight,
            hops,
            stats,
        }
    }
}

/// Sum of remaining data units over distinct active flows sharing an edge with `path`.
pub fn path_weight(index: &FlowIndex, path: &Path) -> u64 {
    let mut seen = BTreeSet::new();
    let mut weight = 0;
    for &e in path.edge_ids() {
        for &id in index.flows_on(e) {
            if seen.insert(id) {
                weight += index.get(id).map_or(0, |f| f.remaining());
            }
        }
    }
    weight
}

/// Completion time of a `volume`-unit flow on `path` when every competing
/// data unit goes first.
pub fn worst_case_completion(index: &FlowIndex, path: &Path, volume: u64) -> u64 {
    path_weight(index, path) + volume
}

/// `(heuristic - optimal) / optimal`, defined as 0 when both are 0.
///
/// A positive heuristic weight against a zero optimum has no finite gap and
/// yields [`Error::UndefinedGap`].
pub fn optimality_gap(heuristic_weight: u64, optimal_weight: u64) -> Result<f64> {
    if heuristic_weight < optimal_weight {
        return Err(Error::GapInversion {
            heuristic: heuristic_weight,
            optimal: optimal_weight,
        });
    }
    if optimal_weight == 0 {
        if heuristic_weight > 0 {
            return Err(Error::UndefinedGap {
                heuristic: heuristic_weight,
            });
        }
        return Ok(0.0);
    }
    Ok((heuristic_weight - optimal_weight) as f64 / optimal_weight as f64)
}

/// Per-edge competing flows, flattened to dense local flow indices.
struct EdgeLoads {
    per_edge: Vec<Vec<(u32, u64)>>,
    flows: usize,
}

impl EdgeLoads {
    fn new(index: &FlowIndex) -> Self {
        let local: HashMap<_, u32> = index
            .active_ids()
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as u32))
            .collect();
        let per_edge = (0..index.edge_slots())
            .map(|e| {
                index
                    .flows_on(EdgeId(e))
                    .iter()
                    .map(|id| (local[id], index.get(*id).map_or(0, |f| f.remaining())))
                    .collect()
            })
            .collect();
        EdgeLoads {
            per_edge,
            flows: local.len(),
        }
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    weight: u64,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
}

impl Candidate {
    fn hops(&self) -> usize {
        self.edges.len()
    }

    fn into_result(self, stats: SearchStats) -> RouteResult {
        RouteResult::new(Path::from_parts(self.nodes, self.edges), self.weight, stats)
    }
}

/// Depth-first search for the minimum-weight simple path under a hop bound.
///
/// Candidates are ranked by (weight, hops), then by discovery order, which
/// is lexicographic in the node sequence. With `prune` set, a partial path
/// is abandoned once its weight (which can only grow as edges are added)
/// and a hop lower bound show it cannot beat the incumbent.
struct WeightSearch<'a> {
    topo: &'a Topology,
    loads: &'a EdgeLoads,
    dist: &'a [Option<u32>],
    dst: NodeId,
    max_hops: usize,
    prune: bool,
    deadline: Option<(Instant, Duration)>,

    hits: Vec<u32>,
    weight: u64,
    on_path: Vec<bool>,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,

    best: Option<Candidate>,
    examined: u64,
    expansions: u64,
    timed_out: bool,
}

impl<'a> WeightSearch<'a> {
    fn new(
        topo: &'a Topology,
        loads: &'a EdgeLoads,
        dist: &'a [Option<u32>],
        req: &RouteRequest,
        max_hops: usize,
    ) -> Self {
        let mut on_path = vec![false; topo.node_count()];
        on_path[req.src] = true;
        WeightSearch {
            topo,
            loads,
            dist,
            dst: req.dst,
            max_hops,
            prune: true,
            deadline: None,
            hits: vec![0; loads.flows],
            weight: 0,
            on_path,
            nodes: vec![req.src],
            edges: Vec::new(),
            best: None,
            examined: 0,
            expansions: 0,
            timed_out: false,
        }
    }

    fn push(&mut self, next: NodeId, edge: EdgeId) {
        for &(f, remaining) in &self.loads.per_edge[edge.0] {
            let h = &mut self.hits[f as usize];
            if *h == 0 {
                self.weight += remaining;
            }
            *h += 1;
        }
        self.on_path[next] = true;
        self.nodes.push(next);
        self.edges.push(edge);
    }

    fn pop(&mut self) {
        let edge = self.edges.pop().unwrap();
        let node = self.nodes.pop().unwrap();
        self.on_path[node] = false;
        for &(f, remaining) in &self.loads.per_edge[edge.0] {
            let h = &mut self.hits[f as usize];
            *h -= 1;
            if *h == 0 {
                self.weight -= remaining;
            }
        }
    }

    fn hopeless(&self, hops_lower_bound: usize) -> bool {
        match &self.best {
            Some(b) if self.prune => {
                self.weight > b.weight || (self.weight == b.weight && hops_lower_bound >= b.hops())
            }
            _ => false,
        }
    }

    fn run(&mut self) {
        self.expansions += 1;
        if let Some((deadline, _)) = self.deadline {
            if self.expansions % 1024 == 1 && Instant::now() >= deadline {
                self.timed_out = true;
            }
        }
        if self.timed_out {
            return;
        }
        let here = *self.nodes.last().unwrap();
        if here == self.dst {
            self.examined += 1;
            let better = match &self.best {
                None => true,
                Some(b) => (self.weight, self.edges.len()) < (b.weight, b.hops()),
            };
            if better {
                self.best = Some(Candidate {
                    weight: self.weight,
                    nodes: self.nodes.clone(),
                    edges: self.edges.clone(),
                });
            }
            return;
        }
        let budget = self.max_hops - self.edges.len();
        let topo = self.topo;
        for &(next, edge) in topo.neighbors(here) {
            if self.on_path[next] {
                continue;
            }
            let to_go = match self.dist[next] {
                Some(d) if (d as usize) < budget => d as usize,
                _ => continue,
            };
            self.push(next, edge);
            if !self.hopeless(self.edges.len() + to_go) {
                self.run();
            }
            self.pop();
            if self.timed_out {
                return;
            }
        }
    }
}

struct Prepared {
    loads: EdgeLoads,
    dist: Vec<Option<u32>>,
    min_hops: usize,
}

fn prepare(topo: &Topology, index: &FlowIndex, req: &RouteRequest) -> Result<Prepared> {
    let min_hops = topo.min_hop_distance(req.src, req.dst)? as usize;
    Ok(Prepared {
        loads: EdgeLoads::new(index),
        dist: topo.hops_to(req.dst),
        min_hops,
    })
}

fn search_bounded(
    topo: &Topology,
    prep: &Prepared,
    req: &RouteRequest,
    max_hops: usize,
    incumbent: Option<Candidate>,
    examined: &mut u64,
) -> Candidate {
    let mut search = WeightSearch::new(topo, &prep.loads, &prep.dist, req, max_hops);
    search.best = incumbent;
    search.run();
    *examined += search.examined;
    search.best.expect("a path within the minimum hop count exists")
}

/// Best worst-case routing heuristic.
///
/// Starting from the minimum hop count K, finds the minimum weight over all
/// simple paths with at most K hops, then keeps raising K while that
/// minimum strictly drops. Returns the minimum-weight path with at most
/// K - 1 hops for the final K, preferring fewer hops on equal weight.
pub fn route_bwrh(topo: &Topology, index: &FlowIndex, req: &RouteRequest) -> Result<RouteResult> {
    let start = Instant::now();
    let prep = prepare(topo, index, req)?;
    let mut examined = 0;
    let mut k = prep.min_hops;
    let mut best = search_bounded(topo, &prep, req, k, None, &mut examined);
    loop {
        k += 1;
        // Paths with fewer hops are a subset, so the previous best seeds the bound.
        let next = search_bounded(topo, &prep, req, k, Some(best.clone()), &mut examined);
        if next.weight >= best.weight {
            break;
        }
        best = next;
    }
    let stats = SearchStats {
        paths_examined: examined,
        final_k: k,
        elapsed: start.elapsed(),
    };
    Ok(best.into_result(stats))
}

/// Exact minimum-weight simple path via branch and bound.
pub fn route_optimal(topo: &Topology, index: &FlowIndex, req: &RouteRequest) -> Result<RouteResult> {
    route_optimal_within(topo, index, req, None)
}

/// [`route_optimal`] with an optional wall-clock budget.
pub fn route_optimal_within(
    topo: &Topology,
    index: &FlowIndex,
    req: &RouteRequest,
    budget: Option<Duration>,
) -> Result<RouteResult> {
    let start = Instant::now();
    let prep = prepare(topo, index, req)?;
    let mut examined = 0;
    let seed = search_bounded(topo, &prep, req, prep.min_hops, None, &mut examined);
    let mut search = WeightSearch::new(topo, &prep.loads, &prep.dist, req, topo.node_count() - 1);
    search.best = Some(seed);
    search.deadline = budget.map(|b| (start + b, b));
    search.run();
    if let (true, Some(b)) = (search.timed_out, budget) {
        return Err(Error::Timeout(b));
    }
    let stats = SearchStats {
        paths_examined: examined + search.examined,
        final_k: topo.node_count() - 1,
        elapsed: start.elapsed(),
    };
    Ok(search.best.unwrap().into_result(stats))
}

/// Exact minimum-weight simple path by evaluating every simple path.
pub fn route_optimal_exhaustive(topo: &Topology, index: &FlowIndex, req: &RouteRequest) -> Result<RouteResult> {
    let start = Instant::now();
    let prep = prepare(topo, index, req)?;
    let mut search = WeightSearch::new(topo, &prep.loads, &prep.dist, req, topo.node_count() - 1);
    search.prune = false;
    search.run();
    let stats = SearchStats {
        paths_examined: search.examined,
        final_k: topo.node_count() - 1,
        elapsed: start.elapsed(),
    };
    Ok(search.best.unwrap().into_result(stats))
}

/// Follows strictly decreasing `dist` from `src`, taking the smallest
/// qualifying neighbor each step: the first shortest path in enumeration order.
fn first_shortest_path(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    dist: &[Option<u32>],
    allowed: impl Fn(EdgeId) -> bool,
) -> Option<Path> {
    let mut here = src;
    let mut d = dist[src]?;
    let mut nodes = vec![src];
    let mut edges = Vec::new();
    while here != dst {
        let &(next, e) = topo
            .neighbors(here)
            .iter()
            .find(|&&(v, e)| allowed(e) && dist[v] == Some(d - 1))?;
        nodes.push(next);
        edges.push(e);
        here = next;
        d -= 1;
    }
    Some(Path::from_parts(nodes, edges))
}

/// Fixed shortest-hop path, independent of current load.
pub fn route_min_hop(topo: &Topology, index: &FlowIndex, req: &RouteRequest) -> Result<RouteResult> {
    let start = Instant::now();
    let k = topo.min_hop_distance(req.src, req.dst)? as usize;
    let dist = topo.hops_to(req.dst);
    let path = first_shortest_path(topo, req.src, req.dst, &dist, |_| true).ok_or(Error::NoPath {
        src: req.src,
        dst: req.dst,
    })?;
    let weight = path_weight(index, &path);
    let stats = SearchStats {
        paths_examined: 1,
        final_k: k,
        elapsed: start.elapsed(),
    };
    Ok(RouteResult::new(path, weight, stats))
}

/// Remaining data units carried by each directed edge.
pub fn edge_utilization(index: &FlowIndex) -> Vec<u64> {
    (0..index.edge_slots())
        .map(|e| {
            index
                .flows_on(EdgeId(e))
                .iter()
                .map(|id| index.get(*id).map_or(0, |f| f.remaining()))
                .sum()
        })
        .collect()
}

/// Largest edge utilization along `path`.
pub fn bottleneck(utilization: &[u64], path: &Path) -> u64 {
    path.edge_ids().iter().map(|e| utilization[e.0]).max().unwrap_or(0)
}

/// Hop distance to `dst` using only edges with utilization at most `threshold`.
fn thresholded_hops_to(topo: &Topology, util: &[u64], dst: NodeId, threshold: u64) -> Vec<Option<u32>> {
    let mut dist = vec![None; topo.node_count()];
    dist[dst] = Some(0);
    let mut queue = std::collections::VecDeque::from([dst]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        // Links are bidirectional: the in-neighbors of v are its out-neighbors.
        for &(u, _) in topo.neighbors(v) {
            let Some(e) = topo.edge_id(u, v) else { continue };
            if util[e.0] <= threshold && dist[u].is_none() {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Path minimizing the maximum edge utilization, then hop count.
///
/// Binary-searches the smallest utilization threshold at which the
/// destination stays reachable over edges at or below it.
pub fn route_min_max_util(topo: &Topology, index: &FlowIndex, req: &RouteRequest) -> Result<RouteResult> {
    let start = Instant::now();
    topo.min_hop_distance(req.src, req.dst)?;
    let util = edge_utilization(index);
    let mut levels: Vec<u64> = util.clone();
    levels.sort_unstable();
    levels.dedup();

    let reachable = |theta: u64| thresholded_hops_to(topo, &util, req.dst, theta)[req.src].is_some();
    let (mut lo, mut hi) = (0, levels.len() - 1);
    let mut probes = 0;
    while lo < hi {
        let mid = (lo + hi) / 2;
        probes += 1;
        if reachable(levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let theta = levels[lo];
    let dist = thresholded_hops_to(topo, &util, req.dst, theta);
    let path = first_shortest_path(topo, req.src, req.dst, &dist, |e| util[e.0] <= theta).ok_or(Error::NoPath {
        src: req.src,
        dst: req.dst,
    })?;
    let weight = path_weight(index, &path);
    let stats = SearchStats {
        paths_examined: probes + 1,
        final_k: path.hops(),
        elapsed: start.elapsed(),
    };
    Ok(RouteResult::new(path, weight, stats))
}

/// Uniform draw among simple paths at most one hop longer than the shortest.
pub fn route_random_uniform(
    topo: &Topology,
    index: &FlowIndex,
    req: &RouteRequest,
    rng: &mut impl Rng,
) -> Result<RouteResult> {
    let start = Instant::now();
    let k = topo.min_hop_distance(req.src, req.dst)? as usize;
    let mut candidates = topo.enumerate_paths(req.src, req.dst, k + 1);
    let examined = candidates.len() as u64;
    let pick = rng.gen_range(0..candidates.len());
    let path = candidates.swap_remove(pick);
    let weight = path_weight(index, &path);
    let stats = SearchStats {
        paths_examined: examined,
        final_k: k + 1,
        elapsed: start.elapsed(),
    };
    Ok(RouteResult::new(path, weight, stats))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Bwrh,
    #[serde(rename = "minhop")]
    MinHop,
    #[serde(rename = "minmax")]
    MinMax,
    Random,
    Optimal,
}

impl Scheme {
    pub const BASELINES: [Scheme; 3] = [Scheme::MinHop, Scheme::MinMax, Scheme::Random];
    pub const COMPARED: [Scheme; 4] = [Scheme::Bwrh, Scheme::MinHop, Scheme::MinMax, Scheme::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Bwrh => "bwrh",
            Scheme::MinHop => "minhop",
            Scheme::MinMax => "minmax",
            Scheme::Random => "random",
            Scheme::Optimal => "optimal",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bwrh" => Ok(Scheme::Bwrh),
            "minhop" | "min-hop" => Ok(Scheme::MinHop),
            "minmax" | "min-max" => Ok(Scheme::MinMax),
            "random" => Ok(Scheme::Random),
            "optimal" => Ok(Scheme::Optimal),
            _ => Err(Error::Config(format!(
                "unknown scheme `{s}` (valid: bwrh, minhop, minmax, random, optimal)"
            ))),
        }
    }
}

/// A routing scheme bound to its own random stream.
pub struct Router {
    scheme: Scheme,
    rng: ChaCha8Rng,
}

impl Router {
    pub fn new(scheme: Scheme, rng: ChaCha8Rng) -> Self {
        Router { scheme, rng }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn route(&mut self, topo: &Topology, index: &FlowIndex, req: &RouteRequest) -> Result<RouteResult> {
        match self.scheme {
            Scheme::Bwrh => route_bwrh(topo, index, req),
            Scheme::MinHop => route_min_hop(topo, index, req),
            Scheme::MinMax => route_min_max_util(topo, index, req),
            Scheme::Random => route_random_uniform(topo, index, req, &mut self.rng),
            Scheme::Optimal => route_optimal(topo, index, req),
        }
    }
}
