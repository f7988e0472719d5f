//! A small worked instance: a new 3-unit flow choosing between two routes.
//!
//! ```text
//!        1 ---- 2                 path 1: 0-1-2-3      (shares 1->2 with F1)
//!       /        \                path 2: 0-4-5-6-3    (shares 3 edges with F2,
//!      0          3                                     2 edges with F3)
//!       \        /
//!        4 - 5 - 6
//! ```
//!
//! F1 (4 units) runs 1->2, F2 (3 units) runs 0->4->5->6 and F3 (3 units)
//! runs 5->6->3. Path 1 competes with 4 data units and path 2 with 6, so the
//! new flow's worst-case completion time is 7 on path 1 and 9 on path 2.

use crate::flowstate::{Flow, FlowIndex, Slot};
use crate::routing::RouteRequest;
use crate::topology::{Path, Topology};
use crate::traffic::ArrivalEvent;

pub struct Fig1 {
    pub topo: Topology,
    /// F1..F3 admitted as ids 0..2, nothing transmitted yet.
    pub index: FlowIndex,
    pub request: RouteRequest,
    pub path1: Path,
    pub path2: Path,
    /// F1..F4 in arrival order, all in [`FIG1_ARRIVAL_SLOT`].
    pub arrivals: Vec<ArrivalEvent>,
}

pub const FIG1_ARRIVAL_SLOT: Slot = 5;

pub fn fig1() -> Fig1 {
    let labels = (0..7).map(|i| format!("n{i}")).collect();
    let links = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (6, 3)];
    let topo = Topology::from_links("fig1", labels, links).expect("valid fixture");
    let path = |nodes: &[usize]| Path::from_nodes(&topo, nodes).expect("valid fixture path");

    let ongoing = [(path(&[1, 2]), 4), (path(&[0, 4, 5, 6]), 3), (path(&[5, 6, 3]), 3)];
    let mut index = FlowIndex::new(&topo);
    let mut arrivals = Vec::new();
    for (id, (p, volume)) in ongoing.iter().enumerate() {
        let flow = Flow::new(id, p.src(), p.dst(), FIG1_ARRIVAL_SLOT, *volume);
        index.admit(flow, p.clone()).expect("valid fixture flow");
        arrivals.push(ArrivalEvent {
            arrival_slot: FIG1_ARRIVAL_SLOT,
            src: p.src(),
            dst: p.dst(),
            volume: *volume,
        });
    }
    arrivals.push(ArrivalEvent {
        arrival_slot: FIG1_ARRIVAL_SLOT,
        src: 0,
        dst: 3,
        volume: 3,
    });

    Fig1 {
        request: RouteRequest::new(0, 3, 3).expect("valid fixture request"),
        path1: path(&[0, 1, 2, 3]),
        path2: path(&[0, 4, 5, 6, 3]),
        topo,
        index,
        arrivals,
    }
}
