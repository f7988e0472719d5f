//! Network graphs with unit-capacity directed edges.
//!
//! Every undirected link of an input topology becomes two independent
//! directed edges, so flows travelling in opposite directions over the same
//! link never compete. Capacity is implicit: one data unit per edge per slot.

mod builtin;
mod gml;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::path::Path as FsPath;

use serde::Serialize;

use crate::error::{Error, Result};

pub use builtin::{builtin_topology, load_topology, parse_edge_list, BUILTIN_NAMES};
pub use gml::parse_gml;

pub type NodeId = usize;

/// Dense index of a directed edge inside its [`Topology`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DirEdge {
    pub from: NodeId,
    pub to: NodeId,
}

impl fmt::Display for DirEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.to)
    }
}

/// Counters for input links that did not become edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DedupStats {
    pub duplicate_links: usize,
    pub self_loops: usize,
}

#[derive(Clone, Debug)]
pub struct Topology {
    name: String,
    labels: Vec<String>,
    edges: Vec<DirEdge>,
    edge_ids: HashMap<DirEdge, EdgeId>,
    /// Outgoing `(neighbor, edge)` pairs per node, ascending by neighbor.
    out_adj: Vec<Vec<(NodeId, EdgeId)>>,
    in_adj: Vec<Vec<NodeId>>,
    dedup: DedupStats,
}

impl Topology {
    /// Builds a topology from undirected links over nodes `0..labels.len()`.
    ///
    /// Self-loops and repeated links are dropped and counted.
    pub fn from_links(
        name: impl Into<String>,
        labels: Vec<String>,
        links: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let name = name.into();
        let n = labels.len();
        let mut dedup = DedupStats::default();
        let mut seen = std::collections::HashSet::new();
        let mut undirected = Vec::new();
        for (a, b) in links {
            for node in [a, b] {
                if node >= n {
                    return Err(Error::UnknownNode { node, topology: name });
                }
            }
            if a == b {
                dedup.self_loops += 1;
                continue;
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                dedup.duplicate_links += 1;
                continue;
            }
            undirected.push(key);
        }

        let mut edges: Vec<DirEdge> = undirected
            .iter()
            .flat_map(|&(a, b)| [DirEdge { from: a, to: b }, DirEdge { from: b, to: a }])
            .collect();
        edges.sort();

        let edge_ids: HashMap<DirEdge, EdgeId> = edges.iter().enumerate().map(|(i, &e)| (e, EdgeId(i))).collect();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        // `edges` is sorted by (from, to), so adjacency lists come out ascending.
        for (i, e) in edges.iter().enumerate() {
            out_adj[e.from].push((e.to, EdgeId(i)));
            in_adj[e.to].push(e.from);
        }

        Ok(Topology {
            name,
            labels,
            edges,
            edge_ids,
            out_adj,
            in_adj,
            dedup,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.labels.len()
    }

    pub fn label(&self, node: NodeId) -> Option<&str> {
        self.labels.get(node).map(String::as_str)
    }

    /// Number of directed edges (twice the number of links).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn link_count(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn dir_edges(&self) -> &[DirEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> DirEdge {
        self.edges[id.0]
    }

    pub fn edge_id(&self, from: NodeId, to: NodeId) -> Option<EdgeId> {
        self.edge_ids.get(&DirEdge { from, to }).copied()
    }

    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        &self.out_adj[node]
    }

    pub fn dedup_stats(&self) -> DedupStats {
        self.dedup
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node < self.labels.len()
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::UnknownNode {
                node,
                topology: self.name.clone(),
            })
        }
    }

    /// Hop distance from every node to `target`, `None` where unreachable.
    pub fn hops_to(&self, target: NodeId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count()];
        if !self.contains(target) {
            return dist;
        }
        dist[target] = Some(0);
        let mut queue = VecDeque::from([target]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &u in &self.in_adj[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Breadth-first hop count of the shortest path from `src` to `dst`.
    pub fn min_hop_distance(&self, src: NodeId, dst: NodeId) -> Result<u32> {
        self.check_node(src)?;
        self.check_node(dst)?;
        if src == dst {
            return Err(Error::SameEndpoints(src));
        }
        self.hops_to(dst)[src].ok_or(Error::NoPath { src, dst })
    }

    /// All simple paths from `src` to `dst` with at most `max_hops` edges.
    ///
    /// Paths come out in depth-first order with neighbors visited in
    /// ascending node id, which is lexicographic order of node sequences.
    pub fn enumerate_paths(&self, src: NodeId, dst: NodeId, max_hops: usize) -> Vec<Path> {
        let mut out = Vec::new();
        if !self.contains(src) || !self.contains(dst) || src == dst || max_hops == 0 {
            return out;
        }
        let dist = self.hops_to(dst);
        let mut walker = SimplePathWalker::new(self, src, dst, &dist);
        walker.walk(max_hops, &mut |nodes, edges| {
            out.push(Path {
                nodes: nodes.to_vec(),
                edges: edges.to_vec(),
            });
        });
        out
    }

    /// Weakly connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut comp = vec![usize::MAX; self.node_count()];
        let mut out: Vec<Vec<NodeId>> = Vec::new();
        for start in self.nodes() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let next = self.out_adj[v]
                    .iter()
                    .map(|&(u, _)| u)
                    .chain(self.in_adj[v].iter().copied());
                for u in next {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                        queue.push_back(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn from_file(path: impl AsRef<FsPath>) -> Result<Self> {
        builtin::load_file(path.as_ref())
    }
}

/// Depth-first walker over simple paths with a hop bound.
///
/// Branches that cannot reach the destination within the remaining hop
/// budget are skipped; this never changes the set or order of paths found.
pub(crate) struct SimplePathWalker<'a> {
    topo: &'a Topology,
    dst: NodeId,
    dist: &'a [Option<u32>],
    on_path: Vec<bool>,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
}

impl<'a> SimplePathWalker<'a> {
    pub(crate) fn new(topo: &'a Topology, src: NodeId, dst: NodeId, dist: &'a [Option<u32>]) -> Self {
        let mut on_path = vec![false; topo.node_count()];
        on_path[src] = true;
        SimplePathWalker {
            topo,
            dst,
            dist,
            on_path,
            nodes: vec![src],
            edges: Vec::new(),
        }
    }

    pub(crate) fn walk(&mut self, max_hops: usize, visit: &mut dyn FnMut(&[NodeId], &[EdgeId])) {
        let here = *self.nodes.last().unwrap();
        if here == self.dst {
            visit(&self.nodes, &self.edges);
            return;
        }
        let budget = max_hops - self.edges.len();
        let topo = self.topo;
        for &(next, edge) in topo.neighbors(here) {
            if self.on_path[next] {
                continue;
            }
            match self.dist[next] {
                Some(d) if (d as usize) < budget => {}
                _ => continue,
            }
            self.on_path[next] = true;
            self.nodes.push(next);
            self.edges.push(edge);
            self.walk(max_hops, visit);
            self.edges.pop();
            self.nodes.pop();
            self.on_path[next] = false;
        }
    }
}

/// A loop-free sequence of directed edges between two distinct nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
}

impl Path {
    /// Builds a path from its node sequence, validating every hop.
    pub fn from_nodes(topo: &Topology, nodes: &[NodeId]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two nodes".into()));
        }
        let mut seen = vec![false; topo.node_count()];
        for &v in nodes {
            topo.check_node(v)?;
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPath(format!("node {v} repeats")));
            }
        }
        let edges = nodes
            .windows(2)
            .map(|w| {
                topo.edge_id(w[0], w[1])
                    .ok_or_else(|| Error::InvalidPath(format!("no edge ({},{})", w[0], w[1])))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Path {
            nodes: nodes.to_vec(),
            edges,
        })
    }

    pub fn src(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn dst(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn hops(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn dir_edges<'a>(&'a self, topo: &'a Topology) -> impl Iterator<Item = DirEdge> + 'a {
        self.edges.iter().map(|&e| topo.edge(e))
    }

    pub(crate) fn from_parts(nodes: Vec<NodeId>, edges: Vec<EdgeId>) -> Self {
        Path { nodes, edges }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn graph(n: usize, links: &[(NodeId, NodeId)]) -> Topology {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Topology::from_links("test", labels, links.iter().copied()).unwrap()
    }

    fn nodes_of(paths: &[Path]) -> Vec<Vec<NodeId>> {
        paths.iter().map(|p| p.nodes().to_vec()).collect()
    }

    #[test]
    fn links_become_two_directed_edges() {
        let t = graph(2, &[(0, 1)]);
        assert_eq!(t.dir_edges(), &[DirEdge { from: 0, to: 1 }, DirEdge { from: 1, to: 0 }]);
    }

    #[test]
    fn duplicates_and_self_loops_are_counted() {
        let t = graph(3, &[(0, 1), (1, 0), (2, 2), (1, 2)]);
        assert_eq!(t.edge_count(), 4);
        assert_eq!(
            t.dedup_stats(),
            DedupStats {
                duplicate_links: 1,
                self_loops: 1
            }
        );
    }

    #[test]
    fn min_hop_on_line() {
        let t = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(t.min_hop_distance(0, 2).unwrap(), 2);
        assert!(matches!(t.min_hop_distance(1, 1), Err(Error::SameEndpoints(1))));
    }

    #[test]
    fn min_hop_unreachable() {
        let t = graph(4, &[(0, 1), (2, 3)]);
        assert!(matches!(t.min_hop_distance(0, 3), Err(Error::NoPath { .. })));
    }

    #[test]
    fn enumerate_line() {
        let t = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(nodes_of(&t.enumerate_paths(0, 2, 2)), vec![vec![0, 1, 2]]);
        assert!(t.enumerate_paths(0, 2, 1).is_empty());
    }

    #[test]
    fn enumerate_triangle() {
        let t = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(nodes_of(&t.enumerate_paths(0, 1, 2)), vec![vec![0, 1], vec![0, 2, 1]]);
    }

    #[test]
    fn enumerate_four_cycle_too_short() {
        let t = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(t.enumerate_paths(0, 2, 1).is_empty());
        assert_eq!(
            nodes_of(&t.enumerate_paths(0, 2, 2)),
            vec![vec![0, 1, 2], vec![0, 3, 2]]
        );
    }

    #[test]
    fn path_validation() {
        let t = graph(3, &[(0, 1), (1, 2)]);
        assert!(Path::from_nodes(&t, &[0, 2]).is_err());
        assert!(Path::from_nodes(&t, &[0, 1, 0]).is_err());
        assert!(Path::from_nodes(&t, &[0]).is_err());
        let p = Path::from_nodes(&t, &[0, 1, 2]).unwrap();
        assert_eq!((p.src(), p.dst(), p.hops()), (0, 2, 2));
        assert_eq!(p.to_string(), "0-1-2");
    }

    #[test]
    fn components_of_split_graph() {
        let t = graph(5, &[(0, 1), (3, 4)]);
        assert_eq!(t.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
    }
}
