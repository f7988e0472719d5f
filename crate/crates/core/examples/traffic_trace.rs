//! Generates a workload, checks its statistics, and round-trips it through a trace file.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --example traffic_trace
//! ```

use bwr::traffic::{read_trace, write_trace};
use bwr::{builtin_topology, gen_arrivals, ArrivalStop, SizeDist, TrafficConfig};

fn main() -> bwr::Result<()> {
    let topo = builtin_topology("ans")?;
    for dist in SizeDist::ALL {
        let cfg = TrafficConfig::new(2.0, 50.0, dist, 3);
        let events = gen_arrivals(&cfg, &topo, ArrivalStop::Slots(5_000))?;
        let sizes: Vec<u64> = events.iter().map(|e| e.volume).collect();
        let mean = sizes.iter().sum::<u64>() as f64 / sizes.len() as f64;
        println!(
            "{:<6} {} arrivals ({:.3}/slot) sizes {}..={} mean {:.2}",
            dist.as_str(),
            events.len(),
            events.len() as f64 / 5_000.0,
            sizes.iter().min().unwrap_or(&0),
            sizes.iter().max().unwrap_or(&0),
            mean
        );
    }

    let cfg = TrafficConfig::new(1.0, 50.0, SizeDist::Exponential, 3);
    let events = gen_arrivals(&cfg, &topo, ArrivalStop::Arrivals(5))?;
    let mut buf = Vec::new();
    write_trace(&mut buf, &events)?;
    print!("\n{}", String::from_utf8_lossy(&buf));
    assert_eq!(read_trace(buf.as_slice())?, events);
    println!("trace round-trip ok");
    Ok(())
}
