//! Aggregation of per-flow outcomes into completion-time, optimality-gap and
//! routing-latency statistics, plus the per-flow CSV and JSON report formats.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowstate::{FlowId, FlowIndex, Slot};
use crate::topology::NodeId;

/// Version tag written into every aggregate JSON document.
pub const REPORT_SCHEMA: &str = "bwr-report/1";

pub const FLOW_CSV_HEADER: [&str; 11] = [
    "flow_id",
    "src",
    "dst",
    "arrival_slot",
    "volume",
    "hops",
    "finish_slot",
    "fct",
    "scheme",
    "policy",
    "seed",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowOutcome {
    pub flow_id: FlowId,
    pub src: NodeId,
    pub dst: NodeId,
    pub arrival_slot: Slot,
    pub volume: u64,
    pub hops: usize,
    /// `None` while the flow was still in progress at the end of the run.
    pub finish_slot: Option<Slot>,
    pub fct: Option<u64>,
}

impl FlowOutcome {
    /// One row per admitted flow in `index`, ascending by id.
    pub fn collect(index: &FlowIndex) -> Vec<FlowOutcome> {
        index
            .flows()
            .map(|f| FlowOutcome {
                flow_id: f.id(),
                src: f.src(),
                dst: f.dst(),
                arrival_slot: f.arrival_slot(),
                volume: f.volume(),
                hops: f.path().map_or(0, |p| p.hops()),
                finish_slot: f.finish_slot(),
                fct: f.completion_time().ok(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(skip)]
    pub per_flow: Vec<FlowOutcome>,
    pub flows: usize,
    pub completed: usize,
    pub incomplete_count: usize,
    pub mean_fct: Option<f64>,
    pub tail_fct_p99: Option<u64>,
    pub tail_fct_max: Option<u64>,
    pub gap_mean: Option<f64>,
    pub gap_max: Option<f64>,
    pub route_latency_mean_ms: Option<f64>,
    pub route_latency_max_ms: Option<f64>,
    pub config_echo: serde_json::Value,
}

/// Nearest-rank percentile of an ascending slice: the value at rank
/// `ceil(p/100 * n)`.
pub fn nearest_rank(sorted: &[u64], p: f64) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> Option<f64> {
    let n = values.len();
    (n > 0).then(|| values.sum::<f64>() / n as f64)
}

fn ms(d: &Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Builds a [`RunReport`]. Only completed flows enter FCT statistics.
pub fn summarize(
    per_flow: Vec<FlowOutcome>,
    gaps: &[f64],
    latencies: &[Duration],
    config_echo: serde_json::Value,
) -> RunReport {
    let mut fcts: Vec<u64> = per_flow.iter().filter_map(|f| f.fct).collect();
    fcts.sort_unstable();
    let completed = fcts.len();
    RunReport {
        flows: per_flow.len(),
        completed,
        incomplete_count: per_flow.len() - completed,
        mean_fct: mean(fcts.iter().map(|&v| v as f64)),
        tail_fct_p99: nearest_rank(&fcts, 99.0),
        tail_fct_max: fcts.last().copied(),
        gap_mean: mean(gaps.iter().copied()),
        gap_max: gaps.iter().copied().reduce(f64::max),
        route_latency_mean_ms: mean(latencies.iter().map(ms)),
        route_latency_max_ms: latencies.iter().map(ms).reduce(f64::max),
        per_flow,
        config_echo,
    }
}

/// Divides every value by the group minimum.
pub fn normalize_group(values: &[f64]) -> Result<Vec<f64>> {
    let min = values
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or_else(|| Error::Config("empty group".into()))?;
    if min <= 0.0 {
        return Err(Error::Config(format!("cannot normalize by non-positive minimum {min}")));
    }
    Ok(values.iter().map(|v| v / min).collect())
}

/// [`normalize_group`] applied to each group independently.
pub fn normalize_groups<K: Ord + Clone, L: Clone>(
    groups: &BTreeMap<K, Vec<(L, f64)>>,
) -> Result<BTreeMap<K, Vec<(L, f64)>>> {
    groups
        .iter()
        .map(|(k, entries)| {
            let values: Vec<f64> = entries.iter().map(|(_, v)| *v).collect();
            let norm = normalize_group(&values)?;
            let labelled = entries.iter().zip(norm).map(|((l, _), v)| (l.clone(), v)).collect();
            Ok((k.clone(), labelled))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<MeanStd> {
        let n = values.len();
        let mean = mean(values.iter().copied())?;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Some(MeanStd {
            mean,
            std: var.sqrt(),
            n,
        })
    }
}

/// Run identity attached to each per-flow CSV row.
#[derive(Clone, Copy, Debug)]
pub struct RunTag<'a> {
    pub scheme: &'a str,
    pub policy: &'a str,
    pub seed: u64,
}

/// Writes the per-flow CSV. Incomplete flows leave `finish_slot` and `fct` empty.
pub fn write_flow_csv<'a>(
    writer: impl Write,
    runs: impl IntoIterator<Item = (RunTag<'a>, &'a [FlowOutcome])>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(FLOW_CSV_HEADER)?;
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    for (tag, rows) in runs {
        for r in rows {
            w.write_record([
                r.flow_id.to_string(),
                r.src.to_string(),
                r.dst.to_string(),
                r.arrival_slot.to_string(),
                r.volume.to_string(),
                r.hops.to_string(),
                opt(r.finish_slot),
                opt(r.fct),
                tag.scheme.to_string(),
                tag.policy.to_string(),
                tag.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
