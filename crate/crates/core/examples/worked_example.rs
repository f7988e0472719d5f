//! Routes a new flow on the small two-path instance and schedules it.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --example worked_example
//! ```

use bwr::experiment::router_rng;
use bwr::fixtures::fig1;
use bwr::{path_weight, route_bwrh, worst_case_completion, Engine, Policy, Router, Scheme, StopCondition};

fn main() -> bwr::Result<()> {
    let f = fig1();
    for (name, path) in [("path 1", &f.path1), ("path 2", &f.path2)] {
        println!(
            "{name} {path}: weight {} worst-case completion {}",
            path_weight(&f.index, path),
            worst_case_completion(&f.index, path, f.request.volume)
        );
    }

    let chosen = route_bwrh(&f.topo, &f.index, &f.request)?;
    println!(
        "heuristic picks {} (weight {}, searched up to {} hops, {} paths examined)",
        chosen.path, chosen.weight, chosen.stats.final_k, chosen.stats.paths_examined
    );

    for policy in Policy::ALL {
        let router = Router::new(Scheme::Bwrh, router_rng(0));
        let mut engine = Engine::new(&f.topo, router, policy, f.arrivals.clone())?;
        engine.run_until(StopCondition::AllComplete)?;
        let new_flow = engine.index().get(3).expect("fourth arrival admitted");
        println!(
            "{policy}: new flow finishes in slot {}, completion time {}",
            new_flow.finish_slot().unwrap_or_default(),
            new_flow.completion_time()?
        );
    }
    Ok(())
}
