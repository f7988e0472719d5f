//! Steps the slot engine by hand and watches admissions and transmissions.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --example slot_engine
//! ```

use bwr::experiment::router_rng;
use bwr::{builtin_topology, ArrivalEvent, Engine, Policy, Router, Scheme};

fn main() -> bwr::Result<()> {
    let topo = builtin_topology("gscale")?;
    let arrivals = vec![
        ArrivalEvent {
            arrival_slot: 0,
            src: 0,
            dst: 11,
            volume: 4,
        },
        ArrivalEvent {
            arrival_slot: 0,
            src: 1,
            dst: 11,
            volume: 2,
        },
        ArrivalEvent {
            arrival_slot: 1,
            src: 0,
            dst: 9,
            volume: 3,
        },
        ArrivalEvent {
            arrival_slot: 2,
            src: 2,
            dst: 7,
            volume: 1,
        },
    ];
    for policy in Policy::ALL {
        println!("== {policy}");
        let mut engine = Engine::new(
            &topo,
            Router::new(Scheme::Bwrh, router_rng(0)),
            policy,
            arrivals.clone(),
        )?;
        while engine.pending_arrivals() > 0 || engine.index().active_count() > 0 {
            let out = engine.step(&mut |view| {
                println!(
                    "  slot {}: flow {} routed on {} (weight {})",
                    view.slot, view.flow, view.route.path, view.route.weight
                );
            })?;
            println!(
                "  slot {}: sent {:?}, finished {:?}",
                out.slot, out.transmitted, out.completed
            );
        }
        for f in engine.index().flows() {
            println!("  flow {} fct {}", f.id(), f.completion_time()?);
        }
    }
    Ok(())
}
