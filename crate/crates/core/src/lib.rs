//! Best worst-case routing for long flows on a slotted, unit-capacity network.
//!
//! A new flow is routed on the path that minimizes the total remaining data
//! of ongoing flows it would share an edge with. The crate contains:
//!
//! - [`topology`]: GML / edge-list loading, bundled WAN topologies, hop
//!   distances and simple-path enumeration.
//! - [`flowstate`]: ongoing flows and the per-edge flow index.
//! - [`routing`]: path weights, the deepening heuristic, the exact
//!   branch-and-bound search and the min-hop, min-max-utilization and
//!   random baselines.
//! - [`scheduler`]: FCFS / SRPT / fair slot scheduling and the slot engine.
//! - [`traffic`]: Poisson arrivals with exponential or Pareto sizes, and
//!   trace files.
//! - [`metrics`]: FCT, gap and latency aggregation and report formats.
//! - [`experiment`]: the scenario, gap and latency experiment drivers.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod flowstate;
pub mod metrics;
pub mod routing;
pub mod scheduler;
pub mod topology;
pub mod traffic;

pub use error::{Error, Result};
pub use flowstate::{Flow, FlowId, FlowIndex, Slot};
pub use routing::{
    optimality_gap, path_weight, route_bwrh, route_min_hop, route_min_max_util, route_optimal,
    route_optimal_exhaustive, route_random_uniform, worst_case_completion, RouteRequest, RouteResult, Router, Scheme,
};
pub use scheduler::{schedule_slot, Engine, Policy, SlotOutcome, StopCondition};
pub use topology::{builtin_topology, load_topology, parse_gml, DirEdge, EdgeId, NodeId, Path, Topology};
pub use traffic::{gen_arrivals, ArrivalEvent, ArrivalStop, SizeDist, TrafficConfig};
