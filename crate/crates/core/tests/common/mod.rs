//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls the library's search, weight or enumeration code; only
//! plain node/edge lists and remaining sizes flow in.

#![allow(dead_code)]

use std::collections::BTreeSet;

use bwr::{Flow, FlowIndex, Path, Topology};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Arc = (usize, usize);

/// Undirected graph as adjacency sets, built from a link list.
pub struct Graph {
    pub n: usize,
    pub adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize, links: &[(usize, usize)]) -> Graph {
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in links {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        Graph { n, adj }
    }

    /// Every simple path from `s` to `t`, by plain recursion.
    pub fn all_simple_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        fn go(g: &Graph, path: &mut Vec<usize>, t: usize, out: &mut Vec<Vec<usize>>) {
            let here = *path.last().unwrap();
            if here == t {
                out.push(path.clone());
                return;
            }
            for &next in &g.adj[here] {
                if !path.contains(&next) {
                    path.push(next);
                    go(g, path, t, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut vec![s], t, &mut out);
        out
    }
}

pub fn arcs(nodes: &[usize]) -> BTreeSet<Arc> {
    nodes.windows(2).map(|w| (w[0], w[1])).collect()
}

/// An ongoing flow as the oracle sees it.
#[derive(Clone, Debug)]
pub struct RefFlow {
    pub nodes: Vec<usize>,
    pub remaining: u64,
}

/// Sum of remaining sizes over distinct flows sharing a directed edge with `nodes`.
pub fn ref_weight(flows: &[RefFlow], nodes: &[usize]) -> u64 {
    let mine = arcs(nodes);
    flows
        .iter()
        .filter(|f| f.remaining > 0 && !arcs(&f.nodes).is_disjoint(&mine))
        .map(|f| f.remaining)
        .sum()
}

/// `(weight, hops, nodes)` ordering used for all reference minima.
fn key(flows: &[RefFlow], p: &[usize]) -> (u64, usize, Vec<usize>) {
    (ref_weight(flows, p), p.len() - 1, p.to_vec())
}

/// Minimum-weight path over all simple paths, ties broken by hops then node sequence.
pub fn ref_optimal(g: &Graph, flows: &[RefFlow], s: usize, t: usize) -> Option<(u64, Vec<usize>)> {
    g.all_simple_paths(s, t)
        .into_iter()
        .map(|p| key(flows, &p))
        .min()
        .map(|(w, _, p)| (w, p))
}

/// The deepening heuristic evaluated literally: for K = min hops, min hops + 1, ...
/// compute the best weight over paths of at most K hops, stop once it no
/// longer decreases, and return the best path of at most K - 1 hops.
pub fn ref_bwrh(g: &Graph, flows: &[RefFlow], s: usize, t: usize) -> Option<(u64, Vec<usize>)> {
    let paths = g.all_simple_paths(s, t);
    let min_hops = paths.iter().map(|p| p.len() - 1).min()?;
    let best_within = |k: usize| {
        paths
            .iter()
            .filter(|p| p.len() - 1 <= k)
            .map(|p| key(flows, p))
            .min()
            .expect("at least the min-hop paths qualify")
    };
    let mut k = min_hops;
    let mut prev = best_within(k);
    loop {
        k += 1;
        let cur = best_within(k);
        if cur.0 >= prev.0 {
            return Some((prev.0, prev.2));
        }
        prev = cur;
    }
}

/// A small random instance: topology, flow index and the oracle's view of it.
pub struct Instance {
    pub graph: Graph,
    pub topo: Topology,
    pub index: FlowIndex,
    pub flows: Vec<RefFlow>,
    pub src: usize,
    pub dst: usize,
}

/// Random connected-ish graph with up to `max_nodes` nodes and up to
/// `max_flows` partially served flows on random simple paths.
pub fn random_instance(rng: &mut impl Rng, max_nodes: usize, max_flows: usize) -> Instance {
    loop {
        let n = rng.gen_range(3..=max_nodes);
        let mut links = Vec::new();
        // Random spanning tree, then extra chords.
        for v in 1..n {
            links.push((rng.gen_range(0..v), v));
        }
        for _ in 0..rng.gen_range(0..=n * 2) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                links.push((a, b));
            }
        }
        let graph = Graph::new(n, &links);
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        let topo = Topology::from_links("random", labels, links).expect("valid random graph");

        let mut index = FlowIndex::new(&topo);
        let mut flows = Vec::new();
        for id in 0..rng.gen_range(0..=max_flows) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            let options = graph.all_simple_paths(a, b);
            let nodes = options.choose(rng).expect("tree keeps graph connected").clone();
            let volume = rng.gen_range(1..=40);
            let path = Path::from_nodes(&topo, &nodes).expect("oracle path is valid");
            index
                .admit(Flow::new(id, a, b, 0, volume), path)
                .expect("fresh flow id");
            let served = rng.gen_range(0..volume);
            for _ in 0..served {
                index.deliver_one(id, 0).expect("flow still active");
            }
            flows.push(RefFlow {
                nodes,
                remaining: volume - served,
            });
        }
        let src = rng.gen_range(0..n);
        let dst = rng.gen_range(0..n);
        if src != dst {
            return Instance {
                graph,
                topo,
                index,
                flows,
                src,
                dst,
            };
        }
    }
}

/// Priority key of a flow under the named policy, lower first.
pub fn ref_priority(policy: bwr::Policy, f: &Flow, remaining: u64, delivered: u64) -> (u64, u64, usize) {
    match policy {
        bwr::Policy::Fcfs => (f.arrival_slot(), 0, f.id()),
        bwr::Policy::Srpt => (remaining, f.arrival_slot(), f.id()),
        bwr::Policy::Fair => (delivered, f.arrival_slot(), f.id()),
    }
}

/// Mean of `clamp(round(X), 1, max)` for `X ~ Exp(mean mu)`, summed exactly
/// over the rounding bins.
pub fn truncated_exp_mean(mu: f64, max: u64) -> f64 {
    let cdf = |x: f64| 1.0 - (-x / mu).exp();
    let mut mean = 1.0 * cdf(1.5);
    for k in 2..max {
        let k = k as f64;
        mean += k * (cdf(k + 0.5) - cdf(k - 0.5));
    }
    mean + max as f64 * (1.0 - cdf(max as f64 - 0.5))
}
