//! Loads the bundled topologies and a GML snippet, and explores paths.
//!
//! Run with:
//!
//! ```not_rust
//! cargo run --example topology_inspect
//! ```

use bwr::experiment::{count_simple_paths, TopoSummary};
use bwr::topology::BUILTIN_NAMES;
use bwr::{builtin_topology, parse_gml};

const RING: &str = r#"
graph [
  label "ring"
  node [ id 10 label "a" ]
  node [ id 20 label "b" ]
  node [ id 30 label "c" ]
  node [ id 40 label "d" ]
  edge [ source 10 target 20 ]
  edge [ source 20 target 30 ]
  edge [ source 30 target 40 ]
  edge [ source 40 target 10 ]
  edge [ source 40 target 10 ]
]
"#;

fn main() -> bwr::Result<()> {
    for name in BUILTIN_NAMES {
        let topo = builtin_topology(name)?;
        let s = TopoSummary::of(&topo);
        println!(
            "{:<8} nodes {:>3} links {:>3} connected {} duplicates dropped {}",
            s.name, s.nodes, s.links, s.connected, s.duplicate_links
        );
    }

    let ring = parse_gml(RING)?;
    println!(
        "\n{}: {} nodes, {} links",
        ring.name(),
        ring.node_count(),
        ring.link_count()
    );
    let (a, c) = (0, 2);
    println!("min hops a->c: {}", ring.min_hop_distance(a, c)?);
    for path in ring.enumerate_paths(a, c, 3) {
        let labels: Vec<_> = path.nodes().iter().map(|&v| ring.label(v).unwrap_or("?")).collect();
        println!("  {}", labels.join(" -> "));
    }

    let gscale = builtin_topology("gscale")?;
    let far = gscale.hops_to(0);
    let dst = gscale.nodes().max_by_key(|&v| far[v]).unwrap_or(0);
    println!(
        "\nGScale {} -> {}: {} hops, {} simple paths, {} with at most 6 hops",
        gscale.label(0).unwrap_or("?"),
        gscale.label(dst).unwrap_or("?"),
        gscale.min_hop_distance(0, dst)?,
        count_simple_paths(&gscale, 0, dst, u64::MAX),
        gscale.enumerate_paths(0, dst, 6).len()
    );
    Ok(())
}
