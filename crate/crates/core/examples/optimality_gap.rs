//! Audits the heuristic against the exact search on one topology.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --release --example optimality_gap [topology] [arrivals]
//! ```

use bwr::experiment::{gap_study, GapConfig};
use bwr::SizeDist;

fn main() -> bwr::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = GapConfig {
        topologies: vec![args.next().unwrap_or_else(|| "gscale".into())],
        arrivals: args.next().and_then(|a| a.parse().ok()).unwrap_or(300),
        seeds: vec![1, 2],
        ..GapConfig::default()
    };
    let report = gap_study(&cfg)?;
    for g in &report.groups {
        println!(
            "{} {:<6} arrivals {:>5}  unbounded {}  mean gap {:.4}  max gap {:.3}  optimal in {:.1}% of arrivals",
            g.topology,
            g.dist.as_str(),
            g.evaluated,
            g.undefined,
            g.gap_mean,
            g.gap_max,
            100.0 * g.exact_share
        );
    }
    let worst = report
        .cells
        .iter()
        .filter(|c| c.dist == SizeDist::Pareto)
        .flat_map(|c| &c.samples)
        .filter(|s| s.gap.is_finite())
        .max_by(|a, b| a.gap.total_cmp(&b.gap));
    if let Some(s) = worst {
        println!(
            "largest finite pareto gap: flow {} with {} active flows, heuristic {} over {} hops vs optimum {} over {} hops",
            s.flow, s.active_flows, s.heuristic_weight, s.heuristic_hops, s.optimal_weight, s.optimal_hops
        );
    }
    Ok(())
}
