//! Compares completion times of all schemes under every scheduling policy.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --release --example fct_comparison [topology] [replicas]
//! ```

use bwr::experiment::{simulate, SimConfig};

fn main() -> bwr::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = SimConfig {
        topology: args.next().unwrap_or_else(|| "ans".into()),
        replicas: args.next().and_then(|a| a.parse().ok()).unwrap_or(3),
        ..SimConfig::default()
    };
    let sim = simulate(&cfg)?;
    println!(
        "{}, {} replicas, normalized to the best scheme per policy",
        sim.topology.name, cfg.replicas
    );
    for a in &sim.aggregates {
        let (Some(mean), Some(p99)) = (a.mean_fct, a.p99_fct) else {
            continue;
        };
        println!(
            "{:<5} {:<7} mean {:>8.1} ± {:>6.1} ({:.2}x)   p99 {:>7.1} ({:.2}x)",
            a.policy.as_str(),
            a.scheme.as_str(),
            mean.mean,
            mean.std,
            a.normalized_mean_fct.unwrap_or(f64::NAN),
            p99.mean,
            a.normalized_p99_fct.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
