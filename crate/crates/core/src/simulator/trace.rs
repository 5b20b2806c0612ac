//! Event log of a short run, for debugging and plotting the sawtooth.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::simulator::engine::{Observer, Packet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Generate,
    /// A departure that leaves the age unchanged.
    Depart,
    Preempt,
    /// A departure of an informative packet.
    AgeDrop,
}

impl TraceEvent {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceEvent::Generate => "generate",
            TraceEvent::Depart => "depart",
            TraceEvent::Preempt => "preempt",
            TraceEvent::AgeDrop => "age_drop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub time: f64,
    pub event: TraceEvent,
    pub id: u64,
    pub age_before: f64,
    pub age_after: f64,
}

pub(crate) struct Tracer {
    pub records: Vec<TraceRecord>,
    limit: usize,
}

impl Tracer {
    pub fn new(limit: usize) -> Self {
        Tracer {
            records: Vec::with_capacity(limit.min(1 << 16)),
            limit,
        }
    }

    fn push(&mut self, time: f64, event: TraceEvent, id: u64, before: f64, after: f64) {
        if self.records.len() < self.limit {
            self.records.push(TraceRecord {
                time,
                event,
                id,
                age_before: before,
                age_after: after,
            });
        }
    }
}

impl Observer for Tracer {
    fn open(&mut self, _t: f64, _freshest: f64) {}

    fn generate(&mut self, t: f64, id: u64, freshest: f64) {
        self.push(t, TraceEvent::Generate, id, t - freshest, t - freshest);
    }

    fn depart(&mut self, t: f64, p: &Packet, freshest: f64, informative: bool) {
        if informative {
            self.push(t, TraceEvent::AgeDrop, p.id, t - freshest, t - p.generated);
        } else {
            self.push(t, TraceEvent::Depart, p.id, t - freshest, t - freshest);
        }
    }

    fn preempt(&mut self, t: f64, p: &Packet, freshest: f64) {
        self.push(t, TraceEvent::Preempt, p.id, t - freshest, t - freshest);
    }

    fn close(&mut self, _t: f64, _freshest: f64) {}

    fn done(&self) -> bool {
        self.records.len() >= self.limit
    }
}

/// Writes one JSON object per line.
pub fn write_trace<W: Write>(records: &[TraceRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)
            .map_err(|e| crate::error::AoiError::Io(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
