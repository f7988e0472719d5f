//! Slotted transmission: in each slot every directed edge carries at most
//! one data unit, and a flow sends one unit along its whole path or nothing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowstate::{Flow, FlowId, FlowIndex, Slot};
use crate::routing::{RouteRequest, RouteResult, Router};
use crate::topology::{EdgeId, Topology};
use crate::traffic::ArrivalEvent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Earliest arrival first.
    Fcfs,
    /// Fewest remaining data units first.
    Srpt,
    /// Least-served first: fewest delivered data units, then earliest arrival.
    /// At unit granularity this equalizes service among contending flows.
    Fair,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Fcfs, Policy::Srpt, Policy::Fair];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Fcfs => "fcfs",
            Policy::Srpt => "srpt",
            Policy::Fair => "fair",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fcfs" => Ok(Policy::Fcfs),
            "srpt" => Ok(Policy::Srpt),
            "fair" => Ok(Policy::Fair),
            _ => Err(Error::Config(format!("unknown policy `{s}` (valid: fcfs, srpt, fair)"))),
        }
    }
}

/// Total transmission order over `flows` under `policy`; ids break all ties.
pub fn priority_order<'a>(policy: Policy, flows: impl IntoIterator<Item = &'a Flow>) -> Vec<FlowId> {
    let mut keyed: Vec<((u64, u64), FlowId)> = flows
        .into_iter()
        .map(|f| {
            let key = match policy {
                Policy::Fcfs => (f.arrival_slot(), 0),
                Policy::Srpt => (f.remaining(), f.arrival_slot()),
                Policy::Fair => (f.delivered(), f.arrival_slot()),
            };
            (key, f.id())
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, id)| id).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlotOutcome {
    pub slot: Slot,
    /// Flows that sent a unit, in priority order.
    pub transmitted: Vec<FlowId>,
    pub completed: Vec<FlowId>,
    pub edges_used: Vec<EdgeId>,
}

/// Greedily grants each active flow, in priority order, every edge of its
/// path unless one of them is already claimed this slot, then delivers one
/// unit for each granted flow.
pub fn schedule_slot(topo: &Topology, index: &mut FlowIndex, policy: Policy, slot: Slot) -> Result<SlotOutcome> {
    let order = priority_order(policy, index.active_flows());
    let mut claimed = vec![false; topo.edge_count()];
    let mut outcome = SlotOutcome {
        slot,
        ..SlotOutcome::default()
    };
    for id in order {
        let Some(path) = index.get(id).and_then(Flow::path) else {
            continue;
        };
        if path.edge_ids().iter().any(|e| claimed[e.0]) {
            continue;
        }
        for &e in path.edge_ids() {
            claimed[e.0] = true;
            outcome.edges_used.push(e);
        }
        outcome.transmitted.push(id);
    }
    for &id in &outcome.transmitted {
        if index.deliver_one(id, slot)? {
            outcome.completed.push(id);
        }
    }
    Ok(outcome)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopCondition {
    /// Run slots `0..horizon`; flows still active afterwards stay incomplete.
    Horizon(Slot),
    /// Run until every arrival is admitted and every flow has finished.
    AllComplete,
    /// Run until the slot in which the last arrival is admitted.
    ArrivalsAdmitted,
}

/// How one flow was routed at its arrival.
#[derive(Clone, Debug)]
pub struct Admission {
    pub flow: FlowId,
    pub slot: Slot,
    pub route: RouteResult,
}

/// The state a routing decision saw, handed to engine observers.
pub struct AdmissionView<'a> {
    pub topo: &'a Topology,
    /// Snapshot taken before the new flow was admitted.
    pub index: &'a FlowIndex,
    pub flow: FlowId,
    pub slot: Slot,
    pub request: &'a RouteRequest,
    pub route: &'a RouteResult,
}

/// Single-threaded slot loop: admit arrivals, schedule, advance.
pub struct Engine<'t> {
    topo: &'t Topology,
    index: FlowIndex,
    router: Router,
    policy: Policy,
    arrivals: Vec<ArrivalEvent>,
    next_arrival: usize,
    slot: Slot,
    admissions: Vec<Admission>,
}

impl<'t> Engine<'t> {
    /// `arrivals` must be sorted by slot; flow ids follow their order.
    pub fn new(topo: &'t Topology, router: Router, policy: Policy, arrivals: Vec<ArrivalEvent>) -> Result<Self> {
        if arrivals.windows(2).any(|w| w[0].arrival_slot > w[1].arrival_slot) {
            return Err(Error::Config("arrivals must be sorted by slot".into()));
        }
        if let Some(a) = arrivals
            .iter()
            .find(|a| !topo.contains(a.src) || !topo.contains(a.dst) || a.src == a.dst || a.volume == 0)
        {
            return Err(Error::Config(format!(
                "invalid arrival {a:?} for topology {}",
                topo.name()
            )));
        }
        Ok(Engine {
            topo,
            index: FlowIndex::new(topo),
            router,
            policy,
            arrivals,
            next_arrival: 0,
            slot: 0,
            admissions: Vec::new(),
        })
    }

    pub fn topology(&self) -> &Topology {
        self.topo
    }

    pub fn index(&self) -> &FlowIndex {
        &self.index
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    /// The next slot to be simulated.
    pub fn slot(&self) -> Slot {
        self.slot
    }

    pub fn admissions(&self) -> &[Admission] {
        &self.admissions
    }

    pub fn pending_arrivals(&self) -> usize {
        self.arrivals.len() - self.next_arrival
    }

    /// Simulates one slot, reporting each routing decision to `observer`.
    pub fn step(&mut self, observer: &mut dyn FnMut(&AdmissionView<'_>)) -> Result<SlotOutcome> {
        let slot = self.slot;
        while let Some(a) = self.arrivals.get(self.next_arrival) {
            if a.arrival_slot > slot {
                break;
            }
            let flow = self.next_arrival;
            let wrap = |source: Error| Error::Admission {
                flow,
                src: a.src,
                dst: a.dst,
                slot: a.arrival_slot,
                source: Box::new(source),
            };
            let request = RouteRequest::new(a.src, a.dst, a.volume).map_err(wrap)?;
            let route = self.router.route(self.topo, &self.index, &request).map_err(wrap)?;
            observer(&AdmissionView {
                topo: self.topo,
                index: &self.index,
                flow,
                slot,
                request: &request,
                route: &route,
            });
            // Late arrivals (slot already passed) are admitted now.
            let arrival_slot = a.arrival_slot.max(slot);
            self.index.admit(
                Flow::new(flow, a.src, a.dst, arrival_slot, a.volume),
                route.path.clone(),
            )?;
            self.admissions.push(Admission { flow, slot, route });
            self.next_arrival += 1;
        }
        let outcome = schedule_slot(self.topo, &mut self.index, self.policy, slot)?;
        self.slot += 1;
        Ok(outcome)
    }

    fn done(&self, stop: StopCondition) -> bool {
        match stop {
            StopCondition::Horizon(h) => self.slot >= h,
            StopCondition::AllComplete => self.pending_arrivals() == 0 && self.index.active_count() == 0,
            StopCondition::ArrivalsAdmitted => self.pending_arrivals() == 0,
        }
    }

    pub fn run_until(&mut self, stop: StopCondition) -> Result<Vec<SlotOutcome>> {
        self.run_until_with(stop, &mut |_| {})
    }

    pub fn run_until_with(
        &mut self,
        stop: StopCondition,
        observer: &mut dyn FnMut(&AdmissionView<'_>),
    ) -> Result<Vec<SlotOutcome>> {
        let mut out = Vec::new();
        while !self.done(stop) {
            out.push(self.step(observer)?);
        }
        Ok(out)
    }

    pub fn into_index(self) -> FlowIndex {
        self.index
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1, FIG1_ARRIVAL_SLOT};
    use crate::routing::Scheme;
    use crate::topology::tests::graph;
    use crate::topology::Path;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flow(id: FlowId, arrival: Slot, volume: u64) -> Flow {
        Flow::new(id, 0, 1, arrival, volume)
    }

    fn router(scheme: Scheme) -> Router {
        Router::new(scheme, ChaCha8Rng::seed_from_u64(0))
    }

    fn event(slot: Slot, src: usize, dst: usize, volume: u64) -> ArrivalEvent {
        ArrivalEvent {
            arrival_slot: slot,
            src,
            dst,
            volume,
        }
    }

    #[test]
    fn orders() {
        let fcfs = [flow(0, 3, 1), flow(1, 1, 1)];
        assert_eq!(priority_order(Policy::Fcfs, &fcfs), vec![1, 0]);
        let srpt = [flow(0, 0, 5), flow(1, 0, 2)];
        assert_eq!(priority_order(Policy::Srpt, &srpt), vec![1, 0]);

        let t = graph(2, &[(0, 1)]);
        let mut idx = FlowIndex::new(&t);
        let p = Path::from_nodes(&t, &[0, 1]).unwrap();
        idx.admit(flow(0, 0, 9), p.clone()).unwrap();
        idx.admit(flow(1, 0, 9), p).unwrap();
        for s in 0..4 {
            idx.deliver_one(0, s).unwrap();
        }
        let flows: Vec<_> = idx.flows().cloned().collect();
        assert_eq!(priority_order(Policy::Fair, &flows), vec![1, 0]);
    }

    #[test]
    fn disjoint_paths_share_a_slot() {
        let t = graph(4, &[(0, 1), (2, 3)]);
        let mut idx = FlowIndex::new(&t);
        idx.admit(Flow::new(0, 0, 1, 0, 2), Path::from_nodes(&t, &[0, 1]).unwrap())
            .unwrap();
        idx.admit(Flow::new(1, 2, 3, 0, 2), Path::from_nodes(&t, &[2, 3]).unwrap())
            .unwrap();
        let out = schedule_slot(&t, &mut idx, Policy::Fcfs, 0).unwrap();
        assert_eq!(out.transmitted, vec![0, 1]);
        assert_eq!(out.edges_used.len(), 2);
    }

    #[test]
    fn shared_edge_serializes() {
        let t = graph(3, &[(0, 1), (1, 2)]);
        let mut idx = FlowIndex::new(&t);
        idx.admit(Flow::new(0, 1, 2, 1, 2), Path::from_nodes(&t, &[1, 2]).unwrap())
            .unwrap();
        idx.admit(Flow::new(1, 0, 2, 0, 2), Path::from_nodes(&t, &[0, 1, 2]).unwrap())
            .unwrap();
        let out = schedule_slot(&t, &mut idx, Policy::Fcfs, 1).unwrap();
        assert_eq!(out.transmitted, vec![1]);
        // Opposite direction does not compete.
        let mut idx2 = FlowIndex::new(&t);
        idx2.admit(Flow::new(0, 2, 1, 0, 2), Path::from_nodes(&t, &[2, 1]).unwrap())
            .unwrap();
        idx2.admit(Flow::new(1, 1, 2, 0, 2), Path::from_nodes(&t, &[1, 2]).unwrap())
            .unwrap();
        assert_eq!(
            schedule_slot(&t, &mut idx2, Policy::Fcfs, 0).unwrap().transmitted,
            vec![0, 1]
        );
    }

    #[test]
    fn single_flow_runs_volume_slots() {
        let t = graph(3, &[(0, 1), (1, 2)]);
        let mut e = Engine::new(&t, router(Scheme::Bwrh), Policy::Fcfs, vec![event(0, 0, 2, 3)]).unwrap();
        let outs = e.run_until(StopCondition::AllComplete).unwrap();
        assert_eq!(outs.len(), 3);
        assert_eq!(e.index().get(0).unwrap().completion_time().unwrap(), 3);
    }

    #[test]
    fn no_arrivals() {
        let t = graph(3, &[(0, 1), (1, 2)]);
        let mut e = Engine::new(&t, router(Scheme::Bwrh), Policy::Srpt, vec![]).unwrap();
        assert!(e.run_until(StopCondition::AllComplete).unwrap().is_empty());
        let outs = e.run_until(StopCondition::Horizon(4)).unwrap();
        assert_eq!(outs.len(), 4);
        assert!(outs.iter().all(|o| o.transmitted.is_empty()));
    }

    #[test]
    fn fig1_fcfs_reaches_worst_case() {
        let f = fig1();
        let mut e = Engine::new(&f.topo, router(Scheme::Bwrh), Policy::Fcfs, f.arrivals.clone()).unwrap();
        e.run_until(StopCondition::AllComplete).unwrap();
        let f4 = e.index().get(3).unwrap();
        assert_eq!(f4.path(), Some(&f.path1));
        assert_eq!(f4.arrival_slot(), FIG1_ARRIVAL_SLOT);
        assert_eq!(f4.finish_slot(), Some(11));
        assert_eq!(f4.completion_time().unwrap(), 7);
        for id in 0..3 {
            assert_eq!(e.index().get(id).unwrap().path(), f.index.get(id).unwrap().path());
        }
    }

    #[test]
    fn unreachable_arrival_aborts_with_context() {
        let t = graph(4, &[(0, 1), (2, 3)]);
        let mut e = Engine::new(&t, router(Scheme::MinHop), Policy::Fcfs, vec![event(2, 0, 3, 1)]).unwrap();
        match e.run_until(StopCondition::AllComplete) {
            Err(Error::Admission { flow: 0, slot: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unsorted_or_invalid_arrivals() {
        let t = graph(3, &[(0, 1), (1, 2)]);
        assert!(Engine::new(
            &t,
            router(Scheme::Bwrh),
            Policy::Fcfs,
            vec![event(2, 0, 1, 1), event(1, 0, 1, 1)]
        )
        .is_err());
        assert!(Engine::new(&t, router(Scheme::Bwrh), Policy::Fcfs, vec![event(0, 0, 0, 1)]).is_err());
        assert!(Engine::new(&t, router(Scheme::Bwrh), Policy::Fcfs, vec![event(0, 0, 9, 1)]).is_err());
    }
}
