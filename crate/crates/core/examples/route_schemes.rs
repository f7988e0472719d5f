//! Loads a network with background flows and routes one request with every scheme.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --example route_schemes
//! ```

use bwr::experiment::router_rng;
use bwr::routing::{bottleneck, edge_utilization};
use bwr::{
    builtin_topology, gen_arrivals, route_bwrh, route_min_hop, ArrivalStop, Engine, Policy, RouteRequest, Router,
    Scheme, SizeDist, StopCondition, TrafficConfig,
};

fn main() -> bwr::Result<()> {
    let topo = builtin_topology("agis")?;
    let traffic = TrafficConfig::new(5.0, 50.0, SizeDist::Exponential, 11);
    let arrivals = gen_arrivals(&traffic, &topo, ArrivalStop::Arrivals(60))?;
    let mut engine = Engine::new(&topo, Router::new(Scheme::Bwrh, router_rng(11)), Policy::Fcfs, arrivals)?;
    engine.run_until(StopCondition::ArrivalsAdmitted)?;
    let index = engine.index();
    println!("{} active flows after slot {}", index.active_count(), engine.slot());

    // First request where the heuristic beats the shortest path.
    let mut req = RouteRequest::new(0, 1, 50)?;
    'search: for src in topo.nodes() {
        for dst in topo.nodes().filter(|&d| d != src) {
            let r = RouteRequest::new(src, dst, 50)?;
            if route_bwrh(&topo, index, &r)?.weight < route_min_hop(&topo, index, &r)?.weight {
                req = r;
                break 'search;
            }
        }
    }
    println!("request {} -> {}", req.src, req.dst);
    let util = edge_utilization(index);
    let mut rng_seed = 0;
    for scheme in [
        Scheme::Bwrh,
        Scheme::Optimal,
        Scheme::MinHop,
        Scheme::MinMax,
        Scheme::Random,
    ] {
        rng_seed += 1;
        let r = Router::new(scheme, router_rng(rng_seed)).route(&topo, index, &req)?;
        println!(
            "{:<8} weight {:>5} hops {:>2} bottleneck {:>4} examined {:>5}  {}",
            scheme.as_str(),
            r.weight,
            r.hops,
            bottleneck(&util, &r.path),
            r.stats.paths_examined,
            r.path
        );
    }
    Ok(())
}
