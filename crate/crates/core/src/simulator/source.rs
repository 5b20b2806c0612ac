//! Packet streams feeding the engine.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytic::QueueSpec;
use crate::distributions::Distribution;

/// One packet: time since the previous generation (or since 0 for the
/// first packet) and the packet's service requirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub gap: f64,
    pub service: f64,
}

pub trait PacketSource {
    /// Next packet, or `None` once the stream is exhausted.
    fn next_draw(&mut self) -> Option<Draw>;
}

/// Stream roles; each gets its own ChaCha stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Arrival = 0,
    Service = 1,
}

/// Generator for `(seed, replication, role)`. Streams never overlap, so
/// replications can run in any order or in parallel.
pub fn stream(seed: u64, replication: u64, role: Role) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication * 2 + role as u64);
    rng
}

/// Independent draws from the queue's two laws.
pub struct RandomSource {
    arrival: Distribution,
    service: Distribution,
    arrivals: ChaCha8Rng,
    services: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(spec: &QueueSpec, seed: u64, replication: u64) -> Self {
        RandomSource {
            arrival: spec.arrival,
            service: spec.service,
            arrivals: stream(seed, replication, Role::Arrival),
            services: stream(seed, replication, Role::Service),
        }
    }
}

impl PacketSource for RandomSource {
    fn next_draw(&mut self) -> Option<Draw> {
        Some(Draw {
            gap: self.arrival.sample(&mut self.arrivals),
            service: self.service.sample(&mut self.services),
        })
    }
}

/// Replays a fixed list of draws.
pub struct ReplaySource<'a> {
    draws: &'a [Draw],
    next: usize,
}

impl<'a> ReplaySource<'a> {
    pub fn new(draws: &'a [Draw]) -> Self {
        ReplaySource { draws, next: 0 }
    }
}

impl PacketSource for ReplaySource<'_> {
    fn next_draw(&mut self) -> Option<Draw> {
        let d = self.draws.get(self.next).copied();
        self.next += 1;
        d
    }
}

/// The first `n` draws a replication would see.
pub fn draws(spec: &QueueSpec, seed: u64, replication: u64, n: usize) -> Vec<Draw> {
    let mut src = RandomSource::new(spec, seed, replication);
    (0..n).filter_map(|_| src.next_draw()).collect()
}
