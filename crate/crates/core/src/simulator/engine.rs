//! Event loop shared by the three disciplines.
//!
//! The engine owns the age state (generation time `U` of the freshest
//! delivered packet) and reports every event to an [`Observer`]. When a
//! generation and a departure fall on the same instant the generation is
//! handled first, so under LCFSp a packet whose service equals the next gap
//! is preempted.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use crate::analytic::{Discipline, QueueSpec};
use crate::simulator::source::PacketSource;
use crate::simulator::StopRule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet {
    pub id: u64,
    pub generated: f64,
    pub departs: f64,
}

impl Eq for Packet {}

impl PartialOrd for Packet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Packet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.departs
            .total_cmp(&other.departs)
            .then(self.id.cmp(&other.id))
    }
}

/// Receives events in time order. `freshest` is `U` before the event.
pub trait Observer {
    /// The measurement window starts at `t`.
    fn open(&mut self, t: f64, freshest: f64);
    fn generate(&mut self, t: f64, id: u64, freshest: f64);
    fn depart(&mut self, t: f64, p: &Packet, freshest: f64, informative: bool);
    fn preempt(&mut self, t: f64, p: &Packet, freshest: f64);
    /// The run ends at `t`.
    fn close(&mut self, t: f64, freshest: f64);
    /// Lets an observer stop the run early.
    fn done(&self) -> bool {
        false
    }
}

trait Server {
    fn next_departure(&self) -> Option<f64>;
    /// Takes a new packet; returns a packet it displaced, if any.
    fn admit(&mut self, id: u64, now: f64, service: f64) -> Option<Packet>;
    fn depart(&mut self) -> Packet;
}

#[derive(Default)]
struct Fcfs {
    queue: VecDeque<Packet>,
}

impl Server for Fcfs {
    fn next_departure(&self) -> Option<f64> {
        self.queue.front().map(|p| p.departs)
    }

    fn admit(&mut self, id: u64, now: f64, service: f64) -> Option<Packet> {
        let start = self.queue.back().map_or(now, |p| p.departs.max(now));
        self.queue.push_back(Packet {
            id,
            generated: now,
            departs: start + service,
        });
        None
    }

    fn depart(&mut self) -> Packet {
        self.queue
            .pop_front()
            .expect("departure from an empty queue")
    }
}

#[derive(Default)]
struct Lcfs {
    current: Option<Packet>,
}

impl Server for Lcfs {
    fn next_departure(&self) -> Option<f64> {
        self.current.map(|p| p.departs)
    }

    fn admit(&mut self, id: u64, now: f64, service: f64) -> Option<Packet> {
        self.current.replace(Packet {
            id,
            generated: now,
            departs: now + service,
        })
    }

    fn depart(&mut self) -> Packet {
        self.current.take().expect("departure from an idle server")
    }
}

#[derive(Default)]
struct Infinite {
    busy: BinaryHeap<Reverse<Packet>>,
}

impl Server for Infinite {
    fn next_departure(&self) -> Option<f64> {
        self.busy.peek().map(|p| p.0.departs)
    }

    fn admit(&mut self, id: u64, now: f64, service: f64) -> Option<Packet> {
        self.busy.push(Reverse(Packet {
            id,
            generated: now,
            departs: now + service,
        }));
        None
    }

    fn depart(&mut self) -> Packet {
        self.busy
            .pop()
            .expect("departure with no packet in service")
            .0
    }
}

/// Runs the queue until the stop rule fires or the source runs dry.
///
/// With a horizon `T` the window is `[warmup·T, T]`. With a budget of `n`
/// packets the window runs from the generation of packet `⌊warmup·n⌋`
/// (time 0 when that is 0) to the generation of packet `n`. Events at the
/// window edges are inside it.
pub fn drive<S, O>(spec: &QueueSpec, stop: StopRule, warmup: f64, source: &mut S, obs: &mut O)
where
    S: PacketSource + ?Sized,
    O: Observer + ?Sized,
{
    match spec.discipline {
        Discipline::Fcfs => run(Fcfs::default(), stop, warmup, source, obs),
        Discipline::LcfsPreemptive => run(Lcfs::default(), stop, warmup, source, obs),
        Discipline::InfiniteServer => run(Infinite::default(), stop, warmup, source, obs),
    }
}

fn run<Q, S, O>(mut server: Q, stop: StopRule, warmup: f64, source: &mut S, obs: &mut O)
where
    Q: Server,
    S: PacketSource + ?Sized,
    O: Observer + ?Sized,
{
    let (mut end, budget, window_start, window_packet) = match stop {
        StopRule::Horizon(t) => (t, u64::MAX, Some(warmup * t), None),
        StopRule::Packets(n) => {
            let w = (warmup * n as f64).floor() as u64;
            (
                f64::INFINITY,
                n,
                if w == 0 { Some(0.0) } else { None },
                Some(w),
            )
        }
    };
    let mut open = false;
    let mut freshest = 0.0;
    let mut generated = 0u64;
    let mut pending = source.next_draw().map(|d| (d.gap, d.service));
    if pending.is_none() {
        end = 0.0;
    }

    while !obs.done() {
        let gen_at = pending.map(|p| p.0);
        let dep_at = server.next_departure();
        let (t, is_gen) = match (gen_at, dep_at) {
            (Some(g), Some(d)) if g <= d => (g, true),
            (Some(g), None) => (g, true),
            (_, Some(d)) => (d, false),
            (None, None) => break,
        };
        if t > end {
            break;
        }
        if !open {
            if let Some(ws) = window_start.filter(|&ws| t >= ws) {
                obs.open(ws, freshest);
                open = true;
            }
        }
        if is_gen {
            let (_, service) = pending.take().expect("pending generation");
            generated += 1;
            if !open && window_packet == Some(generated) {
                obs.open(t, freshest);
                open = true;
            }
            if let Some(old) = server.admit(generated, t, service) {
                obs.preempt(t, &old, freshest);
            }
            obs.generate(t, generated, freshest);
            if generated < budget {
                pending = source.next_draw().map(|d| (t + d.gap, d.service));
            }
            if pending.is_none() {
                end = end.min(t);
            }
        } else {
            let p = server.depart();
            let informative = p.generated > freshest;
            obs.depart(t, &p, freshest, informative);
            if informative {
                freshest = p.generated;
            }
        }
    }
    if !open {
        obs.open(window_start.unwrap_or(end).min(end), freshest);
    }
    obs.close(end, freshest);
}
