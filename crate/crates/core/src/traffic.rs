//! Seeded workloads: Poisson arrivals per slot, uniform endpoint pairs and
//! exponential or Pareto flow sizes truncated to whole data units.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Pareto, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowstate::Slot;
use crate::topology::{NodeId, Topology};

pub const DEFAULT_MAX_SIZE: u64 = 500;
/// Pareto scale, which is also the smallest heavy-tailed flow.
pub const PARETO_SCALE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeDist {
    #[serde(alias = "exp")]
    Exponential,
    Pareto,
}

impl SizeDist {
    pub const ALL: [SizeDist; 2] = [SizeDist::Exponential, SizeDist::Pareto];

    pub fn as_str(self) -> &'static str {
        match self {
            SizeDist::Exponential => "exp",
            SizeDist::Pareto => "pareto",
        }
    }

    pub fn min_size(self) -> u64 {
        match self {
            SizeDist::Exponential => 1,
            SizeDist::Pareto => PARETO_SCALE as u64,
        }
    }
}

impl fmt::Display for SizeDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SizeDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exp" | "exponential" | "light" => Ok(SizeDist::Exponential),
            "pareto" | "heavy" => Ok(SizeDist::Pareto),
            _ => Err(Error::Config(format!(
                "unknown size distribution `{s}` (valid: exp, pareto)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficConfig {
    /// Mean arrivals per slot.
    pub lambda: f64,
    /// Mean flow size in data units before truncation.
    pub mu: f64,
    pub dist: SizeDist,
    pub max_size: u64,
    pub seed: u64,
}

impl TrafficConfig {
    pub fn new(lambda: f64, mu: f64, dist: SizeDist, seed: u64) -> Self {
        TrafficConfig {
            lambda,
            mu,
            dist,
            max_size: DEFAULT_MAX_SIZE,
            seed,
        }
    }

    pub fn min_size(&self) -> u64 {
        self.dist.min_size()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be > 0 (got {})", self.lambda)));
        }
        let (lo, hi) = (self.min_size() as f64, self.max_size as f64);
        if !(self.mu >= lo && self.mu <= hi) {
            return Err(Error::Config(format!(
                "mu must lie in [{lo}, {hi}] for {} sizes (got {})",
                self.dist, self.mu
            )));
        }
        if self.dist == SizeDist::Pareto && self.mu <= PARETO_SCALE {
            return Err(Error::Config(format!(
                "Pareto sizes need mu > {PARETO_SCALE} (got {})",
                self.mu
            )));
        }
        Ok(())
    }

    /// Pareto shape giving an untruncated mean of `mu`: `mu / (mu - scale)`.
    pub fn pareto_shape(&self) -> f64 {
        self.mu / (self.mu - PARETO_SCALE)
    }
}

/// Draws whole-unit flow sizes clamped to `[min_size, max_size]`.
#[derive(Clone, Debug)]
pub struct SizeSampler {
    dist: SizeKind,
    min: u64,
    max: u64,
}

#[derive(Clone, Debug)]
enum SizeKind {
    Exp(Exp<f64>),
    Pareto(Pareto<f64>),
}

impl SizeSampler {
    pub fn new(cfg: &TrafficConfig) -> Result<Self> {
        cfg.validate()?;
        let dist = match cfg.dist {
            SizeDist::Exponential => {
                SizeKind::Exp(Exp::new(1.0 / cfg.mu).map_err(|e| Error::Config(format!("exponential sizes: {e}")))?)
            }
            SizeDist::Pareto => SizeKind::Pareto(
                Pareto::new(PARETO_SCALE, cfg.pareto_shape())
                    .map_err(|e| Error::Config(format!("Pareto sizes: {e}")))?,
            ),
        };
        Ok(SizeSampler {
            dist,
            min: cfg.min_size(),
            max: cfg.max_size,
        })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> u64 {
        let x = match &self.dist {
            SizeKind::Exp(d) => d.sample(rng),
            SizeKind::Pareto(d) => d.sample(rng),
        };
        let rounded = x.round();
        if rounded >= self.max as f64 {
            self.max
        } else {
            (rounded as u64).max(self.min)
        }
    }
}

/// One size draw; see [`SizeSampler`] for repeated draws.
pub fn sample_size(cfg: &TrafficConfig, rng: &mut impl Rng) -> Result<u64> {
    Ok(SizeSampler::new(cfg)?.sample(rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalEvent {
    pub arrival_slot: Slot,
    pub src: NodeId,
    pub dst: NodeId,
    pub volume: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalStop {
    /// Stop after this many arrivals.
    Arrivals(usize),
    /// Generate arrivals in slots `0..n`.
    Slots(Slot),
}

/// Uniform draw over ordered pairs of distinct nodes.
fn endpoint_pair(n: usize, rng: &mut impl Rng) -> (NodeId, NodeId) {
    let src = rng.gen_range(0..n);
    let mut dst = rng.gen_range(0..n - 1);
    if dst >= src {
        dst += 1;
    }
    (src, dst)
}

/// Generates a deterministic arrival sequence for `cfg.seed`.
pub fn gen_arrivals(cfg: &TrafficConfig, topo: &Topology, stop: ArrivalStop) -> Result<Vec<ArrivalEvent>> {
    let n = topo.node_count();
    if n < 2 {
        return Err(Error::Config(format!(
            "topology {} needs at least 2 nodes",
            topo.name()
        )));
    }
    match stop {
        ArrivalStop::Arrivals(0) | ArrivalStop::Slots(0) => {
            return Err(Error::Config("arrival stop must be > 0".into()))
        }
        _ => {}
    }
    let sizes = SizeSampler::new(cfg)?;
    let per_slot = Poisson::new(cfg.lambda).map_err(|e| Error::Config(format!("Poisson arrivals: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut out = Vec::new();
    for slot in 0.. {
        match stop {
            ArrivalStop::Slots(end) if slot >= end => break,
            ArrivalStop::Arrivals(count) if out.len() >= count => break,
            _ => {}
        }
        let k: f64 = per_slot.sample(&mut rng);
        for _ in 0..k as u64 {
            if let ArrivalStop::Arrivals(count) = stop {
                if out.len() >= count {
                    break;
                }
            }
            let (src, dst) = endpoint_pair(n, &mut rng);
            out.push(ArrivalEvent {
                arrival_slot: slot,
                src,
                dst,
                volume: sizes.sample(&mut rng),
            });
        }
    }
    Ok(out)
}

/// Writes `slot,src,dst,volume` rows with a header.
pub fn write_trace(writer: impl Write, events: &[ArrivalEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["slot", "src", "dst", "volume"])?;
    for e in events {
        w.write_record([
            e.arrival_slot.to_string(),
            e.src.to_string(),
            e.dst.to_string(),
            e.volume.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace`]; the header row is optional.
pub fn read_trace(reader: impl Read) -> Result<Vec<ArrivalEvent>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if i == 0 && rec.get(0) == Some("slot") {
            continue;
        }
        let field = |k: usize, name: &str| -> Result<u64> {
            rec.get(k)
                .ok_or_else(|| Error::Trace {
                    line,
                    message: format!("missing `{name}`"),
                })?
                .parse()
                .map_err(|e| Error::Trace {
                    line,
                    message: format!("bad `{name}`: {e}"),
                })
        };
        if rec.len() != 4 {
            return Err(Error::Trace {
                line,
                message: format!("expected 4 fields, got {}", rec.len()),
            });
        }
        let event = ArrivalEvent {
            arrival_slot: field(0, "slot")?,
            src: field(1, "src")? as NodeId,
            dst: field(2, "dst")? as NodeId,
            volume: field(3, "volume")?,
        };
        if event.src == event.dst || event.volume == 0 {
            return Err(Error::Trace {
                line,
                message: "src must differ from dst and volume must be >= 1".into(),
            });
        }
        if out
            .last()
            .is_some_and(|p: &ArrivalEvent| p.arrival_slot > event.arrival_slot)
        {
            return Err(Error::Trace {
                line,
                message: "slots must be non-decreasing".into(),
            });
        }
        out.push(event);
    }
    Ok(out)
}
