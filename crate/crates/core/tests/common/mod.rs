//! Reference computations that share nothing with the event engine.
#![allow(dead_code)]

use aoi_lab::simulator::Draw;
use aoi_lab::{Discipline, Distribution, QueueSpec};

pub fn spec(d: Discipline, arrival: &str, lambda: f64, service: &str, mu: f64) -> QueueSpec {
    QueueSpec::new(
        d,
        Distribution::parse(arrival, lambda).unwrap(),
        Distribution::parse(service, mu).unwrap(),
    )
    .unwrap()
}

/// Sums over `[0, g_n]` recomputed from the sawtooth definition.
#[derive(Debug, Clone)]
pub struct Naive {
    pub end: f64,
    pub area: f64,
    pub peak_sum: f64,
    pub informative: u64,
    pub departures: u64,
    pub delays: Vec<f64>,
}

/// Generation times as the running sum of gaps.
pub fn generation_times(draws: &[Draw]) -> Vec<f64> {
    let mut t = 0.0;
    draws
        .iter()
        .map(|d| {
            t += d.gap;
            t
        })
        .collect()
}

/// Departure time of every packet, `None` when it is preempted.
pub fn departure_times(discipline: Discipline, draws: &[Draw]) -> Vec<Option<f64>> {
    let g = generation_times(draws);
    let n = draws.len();
    match discipline {
        Discipline::Fcfs => {
            let mut last = 0.0f64;
            (0..n)
                .map(|i| {
                    last = last.max(g[i]) + draws[i].service;
                    Some(last)
                })
                .collect()
        }
        Discipline::LcfsPreemptive => (0..n)
            .map(|i| {
                let done = g[i] + draws[i].service;
                // A generation at the same instant wins the tie.
                match g.get(i + 1) {
                    Some(&next) if done >= next => None,
                    _ => Some(done),
                }
            })
            .collect(),
        Discipline::InfiniteServer => (0..n).map(|i| Some(g[i] + draws[i].service)).collect(),
    }
}

/// O(n²) recomputation of A(t) = t − U(t) with U(t) the newest generation
/// time among packets departed by t.
pub fn naive(discipline: Discipline, draws: &[Draw]) -> Naive {
    let g = generation_times(draws);
    let dep = departure_times(discipline, draws);
    let end = *g.last().unwrap();
    let freshest_before = |t: f64, strict: bool| {
        let mut u = 0.0f64;
        for (j, d) in dep.iter().enumerate() {
            if let Some(d) = *d {
                if d < t || (!strict && d == t) {
                    u = u.max(g[j]);
                }
            }
        }
        u
    };

    let mut times: Vec<f64> = dep
        .iter()
        .flatten()
        .copied()
        .filter(|&d| d <= end)
        .collect();
    times.push(0.0);
    times.push(end);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut area = 0.0;
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        let u = freshest_before(a, false);
        area += 0.5 * ((b - u) * (b - u) - (a - u) * (a - u));
    }

    let mut out = Naive {
        end,
        area,
        peak_sum: 0.0,
        informative: 0,
        departures: 0,
        delays: Vec::new(),
    };
    for (i, d) in dep.iter().enumerate() {
        let Some(d) = *d else { continue };
        if d > end {
            continue;
        }
        out.departures += 1;
        out.delays.push(d - g[i]);
        let u = freshest_before(d, true);
        if g[i] > u {
            out.informative += 1;
            out.peak_sum += d - u;
        }
    }
    out
}

/// An age drop seen by the coupled recursion: completion time and the
/// age just before it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drop {
    pub time: f64,
    pub peak: f64,
}

/// Preemptive LCFS via B_{i+1} = X_i + B_i·(1 − 1{S_i < X_i}), where B_i is
/// the age when packet i is generated and X_i the gap to the next packet.
/// The last packet has no successor and is left out.
pub fn b_recursion(draws: &[Draw]) -> Vec<Drop> {
    let g = generation_times(draws);
    let mut b = g[0];
    let mut drops = Vec::new();
    for i in 0..draws.len() - 1 {
        let x = draws[i + 1].gap;
        let s = draws[i].service;
        if s < x {
            drops.push(Drop {
                time: g[i] + s,
                peak: b + s,
            });
            b = x;
        } else {
            b += x;
        }
    }
    drops
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
