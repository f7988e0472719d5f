mod common;

use std::collections::BTreeSet;

use bwr::experiment::router_rng;
use bwr::traffic::{read_trace, write_trace};
use bwr::{optimality_gap, path_weight, ArrivalEvent, EdgeId, Flow, FlowIndex, Path, RouteRequest, Router, Scheme};
use common::{random_instance, ref_weight, Graph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn enumeration_matches_recursive_oracle(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 8, 0);
        let n = inst.topo.node_count();
        let mine: BTreeSet<Vec<usize>> =
            inst.topo.enumerate_paths(inst.src, inst.dst, n - 1).iter().map(|p| p.nodes().to_vec()).collect();
        let reference: BTreeSet<Vec<usize>> = inst.graph.all_simple_paths(inst.src, inst.dst).into_iter().collect();
        prop_assert_eq!(&mine, &reference);
        for p in &mine {
            let distinct: BTreeSet<_> = p.iter().collect();
            prop_assert_eq!(distinct.len(), p.len());
        }
        for k in 1..n {
            let bounded = inst.topo.enumerate_paths(inst.src, inst.dst, k).len();
            prop_assert_eq!(bounded, reference.iter().filter(|p| p.len() - 1 <= k).count());
        }
    }

    #[test]
    fn min_hop_is_shortest_enumerated(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 8, 0);
        let shortest = inst.graph.all_simple_paths(inst.src, inst.dst).iter().map(|p| p.len() - 1).min().unwrap();
        prop_assert_eq!(inst.topo.min_hop_distance(inst.src, inst.dst).unwrap() as usize, shortest);
    }

    #[test]
    fn path_weight_matches_reference(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 8, 12);
        for nodes in inst.graph.all_simple_paths(inst.src, inst.dst) {
            let path = Path::from_nodes(&inst.topo, &nodes).unwrap();
            prop_assert_eq!(path_weight(&inst.index, &path), ref_weight(&inst.flows, &nodes));
        }
    }

    #[test]
    fn weight_grows_along_a_path(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 8, 12);
        let total: u64 = inst.flows.iter().map(|f| f.remaining).sum();
        for nodes in inst.graph.all_simple_paths(inst.src, inst.dst) {
            let mut last = 0;
            for end in 2..=nodes.len() {
                let w = path_weight(&inst.index, &Path::from_nodes(&inst.topo, &nodes[..end]).unwrap());
                prop_assert!(w >= last);
                last = w;
            }
            prop_assert!(last <= total);
        }
    }

    #[test]
    fn every_scheme_returns_a_valid_route(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 8, 12);
        let req = RouteRequest::new(inst.src, inst.dst, 5).unwrap();
        for scheme in [Scheme::Bwrh, Scheme::Optimal, Scheme::MinHop, Scheme::MinMax, Scheme::Random] {
            let r = Router::new(scheme, router_rng(seed)).route(&inst.topo, &inst.index, &req).unwrap();
            let nodes = r.path.nodes();
            prop_assert_eq!((nodes[0], *nodes.last().unwrap()), (inst.src, inst.dst));
            prop_assert!(inst.graph.all_simple_paths(inst.src, inst.dst).iter().any(|p| p == nodes));
            prop_assert_eq!(r.weight, ref_weight(&inst.flows, nodes));
            prop_assert_eq!(r.hops, nodes.len() - 1);
        }
    }

    #[test]
    fn index_stays_consistent(seed in any::<u64>(), ops in 1usize..200) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 8, 0);
        let topo = &inst.topo;
        let n = topo.node_count();
        let mut index = FlowIndex::new(topo);
        let mut next_id = 0;
        for step in 0..ops {
            let active: Vec<usize> = index.active_ids().iter().copied().collect();
            if active.is_empty() || r.gen_bool(0.4) {
                let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
                if a == b {
                    continue;
                }
                let paths = inst.graph.all_simple_paths(a, b);
                let nodes = &paths[r.gen_range(0..paths.len())];
                let volume = r.gen_range(1..6);
                index.admit(Flow::new(next_id, a, b, step as u64, volume), Path::from_nodes(topo, nodes).unwrap()).unwrap();
                next_id += 1;
            } else {
                let id = active[r.gen_range(0..active.len())];
                index.deliver_one(id, step as u64).unwrap();
            }
            prop_assert!(index.is_consistent());
            for e in 0..topo.edge_count() {
                let d = topo.edge(EdgeId(e));
                let expected: BTreeSet<usize> = index
                    .active_flows()
                    .filter(|f| f.path().unwrap().nodes().windows(2).any(|w| (w[0], w[1]) == (d.from, d.to)))
                    .map(|f| f.id())
                    .collect();
                prop_assert_eq!(index.flows_on(EdgeId(e)), &expected);
            }
        }
        prop_assert_eq!(index.len(), next_id);
        for f in index.flows() {
            prop_assert_eq!(f.remaining() + f.delivered(), f.volume());
            prop_assert_eq!(f.is_active(), f.remaining() > 0);
            prop_assert_eq!(f.finish_slot().is_some(), f.remaining() == 0);
        }
    }

    #[test]
    fn gap_is_relative_excess(opt in 1u64..10_000, extra in 0u64..10_000) {
        let gap = optimality_gap(opt + extra, opt).unwrap();
        prop_assert!((gap - extra as f64 / opt as f64).abs() < 1e-12);
        prop_assert!(gap >= 0.0);
        if extra > 0 {
            prop_assert!(optimality_gap(opt, opt + extra).is_err());
        }
        prop_assert_eq!(optimality_gap(extra, 0).is_err(), extra > 0);
    }

    #[test]
    fn traces_round_trip(events in proptest::collection::vec((0u64..1000, 0usize..50, 1usize..50, 1u64..500), 0..60)) {
        let mut events: Vec<ArrivalEvent> = events
            .into_iter()
            .map(|(slot, src, d, volume)| ArrivalEvent { arrival_slot: slot, src, dst: (src + d) % 50, volume })
            .filter(|e| e.src != e.dst)
            .collect();
        events.sort_by_key(|e| e.arrival_slot);
        let mut buf = Vec::new();
        write_trace(&mut buf, &events).unwrap();
        prop_assert_eq!(read_trace(buf.as_slice()).unwrap(), events);
    }
}

#[test]
fn reference_graph_sanity() {
    let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    assert_eq!(g.all_simple_paths(0, 2), vec![vec![0, 1, 2], vec![0, 3, 2]]);
}
