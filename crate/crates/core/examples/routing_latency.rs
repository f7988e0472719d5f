//! Times heuristic routing calls on the largest bundled topology.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --release --example routing_latency [lambda] [mu]
//! ```

use bwr::experiment::latency_point;
use bwr::{builtin_topology, Policy, SizeDist};

fn main() -> bwr::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().ok());
    let lambda = args.next().flatten().unwrap_or(10.0);
    let mu = args.next().flatten().unwrap_or(50.0);
    let topo = builtin_topology("cogent")?;
    for dist in SizeDist::ALL {
        let p = latency_point(&topo, dist, Policy::Fcfs, lambda, mu, 1000, 1)?;
        println!(
            "{} {:<6} λ={lambda} μ={mu}: {} calls, max {:.2} ms, mean {:.3} ms, deepest hop bound {}",
            p.topology,
            dist.as_str(),
            p.calls,
            p.max_ms,
            p.mean_ms,
            p.max_final_k
        );
    }
    Ok(())
}
