//! Ongoing flows and the per-edge index of flows that still have data to send.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::topology::{EdgeId, NodeId, Path, Topology};

pub type FlowId = usize;
pub type Slot = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    id: FlowId,
    src: NodeId,
    dst: NodeId,
    arrival_slot: Slot,
    volume: u64,
    remaining: u64,
    delivered: u64,
    path: Option<Path>,
    finish_slot: Option<Slot>,
}

impl Flow {
    pub fn new(id: FlowId, src: NodeId, dst: NodeId, arrival_slot: Slot, volume: u64) -> Self {
        Flow {
            id,
            src,
            dst,
            arrival_slot,
            volume,
            remaining: volume,
            delivered: 0,
            path: None,
            finish_slot: None,
        }
    }

    pub fn id(&self) -> FlowId {
        self.id
    }

    pub fn src(&self) -> NodeId {
        self.src
    }

    pub fn dst(&self) -> NodeId {
        self.dst
    }

    pub fn arrival_slot(&self) -> Slot {
        self.arrival_slot
    }

    pub fn volume(&self) -> u64 {
        self.volume
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_ref()
    }

    pub fn finish_slot(&self) -> Option<Slot> {
        self.finish_slot
    }

    pub fn is_active(&self) -> bool {
        self.remaining > 0
    }

    /// Slots from arrival through the slot carrying the last data unit,
    /// both inclusive, so an uncontended one-unit flow takes 1.
    pub fn completion_time(&self) -> Result<u64> {
        self.finish_slot
            .map(|f| f - self.arrival_slot + 1)
            .ok_or(Error::FlowNotFinished(self.id))
    }
}

/// All admitted flows plus, per directed edge, the active flows crossing it.
#[derive(Clone, Debug, Default)]
pub struct FlowIndex {
    flows: BTreeMap<FlowId, Flow>,
    by_edge: Vec<BTreeSet<FlowId>>,
    active: BTreeSet<FlowId>,
}

impl FlowIndex {
    pub fn new(topo: &Topology) -> Self {
        FlowIndex {
            flows: BTreeMap::new(),
            by_edge: vec![BTreeSet::new(); topo.edge_count()],
            active: BTreeSet::new(),
        }
    }

    /// Stores `flow` on `path` and indexes it on every edge of the path.
    pub fn admit(&mut self, mut flow: Flow, path: Path) -> Result<()> {
        if self.flows.contains_key(&flow.id) {
            return Err(Error::DuplicateFlow(flow.id));
        }
        if path.src() != flow.src || path.dst() != flow.dst {
            return Err(Error::PathMismatch {
                id: flow.id,
                src: flow.src,
                dst: flow.dst,
                path_src: path.src(),
                path_dst: path.dst(),
            });
        }
        if flow.volume == 0 || flow.remaining != flow.volume || flow.path.is_some() {
            return Err(Error::InvalidVolume { id: flow.id });
        }
        if let Some(&EdgeId(e)) = path.edge_ids().iter().find(|e| e.0 >= self.by_edge.len()) {
            return Err(Error::InvalidPath(format!("edge index {e} outside this index")));
        }
        for e in path.edge_ids() {
            self.by_edge[e.0].insert(flow.id);
        }
        self.active.insert(flow.id);
        flow.path = Some(path);
        self.flows.insert(flow.id, flow);
        Ok(())
    }

    /// Sends one data unit of flow `id` in `slot`. Returns true when this
    /// was the flow's last unit.
    pub fn deliver_one(&mut self, id: FlowId, slot: Slot) -> Result<bool> {
        let flow = self.flows.get_mut(&id).ok_or(Error::UnknownFlow(id))?;
        if flow.remaining == 0 {
            return Err(Error::FlowFinished(id));
        }
        flow.remaining -= 1;
        flow.delivered += 1;
        if flow.remaining > 0 {
            return Ok(false);
        }
        flow.finish_slot = Some(slot);
        if let Some(path) = &flow.path {
            for e in path.edge_ids() {
                self.by_edge[e.0].remove(&id);
            }
        }
        self.active.remove(&id);
        Ok(true)
    }

    pub fn get(&self, id: FlowId) -> Option<&Flow> {
        self.flows.get(&id)
    }

    /// Every admitted flow, finished or not, ascending by id.
    pub fn flows(&self) -> impl Iterator<Item = &Flow> {
        self.flows.values()
    }

    pub fn active_ids(&self) -> &BTreeSet<FlowId> {
        &self.active
    }

    pub fn active_flows(&self) -> impl Iterator<Item = &Flow> {
        self.active.iter().map(|id| &self.flows[id])
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    /// Active flows whose path contains `edge`.
    pub fn flows_on(&self, edge: EdgeId) -> &BTreeSet<FlowId> {
        &self.by_edge[edge.0]
    }

    pub fn edge_slots(&self) -> usize {
        self.by_edge.len()
    }

    /// Rebuilds the per-edge index from the flow table and compares.
    pub fn is_consistent(&self) -> bool {
        let mut rebuilt = vec![BTreeSet::new(); self.by_edge.len()];
        let mut active = BTreeSet::new();
        for f in self.flows.values() {
            if f.remaining + f.delivered != f.volume {
                return false;
            }
            if f.remaining == 0 {
                if f.finish_slot.is_none() {
                    return false;
                }
                continue;
            }
            if f.finish_slot.is_some() {
                return false;
            }
            active.insert(f.id);
            if let Some(p) = &f.path {
                for e in p.edge_ids() {
                    rebuilt[e.0].insert(f.id);
                }
            }
        }
        rebuilt == self.by_edge && active == self.active
    }
}
