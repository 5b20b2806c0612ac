//! Per-replication accumulators.

use serde::Serialize;

use crate::simulator::engine::{Observer, Packet};

/// Count, mean and centred second moment, mergeable across runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = (self.count + other.count) as f64;
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean - self.mean;
        Moments {
            count: self.count + other.count,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }

    /// Sample variance; NaN with fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn mean_or_nan(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }
}

/// Raw sums from one replication's measurement window.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Replication {
    pub window_start: f64,
    pub window_end: f64,
    /// Area under A(t) over the window.
    pub area: f64,
    /// Sum of A(t⁻) over informative departures in the window.
    pub peak_sum: f64,
    pub informative: u64,
    /// All departures in the window, informative or not.
    pub departures: u64,
    pub preempted: u64,
    pub generated: u64,
    pub delay: Moments,
    /// Time-average age over consecutive equal-length batches.
    pub batch_average: Vec<f64>,
    /// Mean peak over the same batches (batches without a peak are skipped).
    pub batch_peak: Vec<f64>,
}

impl Replication {
    pub fn average_age(&self) -> f64 {
        self.area / (self.window_end - self.window_start)
    }

    /// Ratio of the summed peaks to their count.
    pub fn peak_age(&self) -> f64 {
        if self.informative == 0 {
            f64::NAN
        } else {
            self.peak_sum / self.informative as f64
        }
    }

    pub fn informative_fraction(&self) -> f64 {
        let resolved = self.departures + self.preempted;
        if resolved == 0 {
            f64::NAN
        } else {
            self.informative as f64 / resolved as f64
        }
    }
}

const MAX_BATCHES: usize = 64;

#[derive(Debug, Clone, Copy, Default)]
struct Batch {
    area: f64,
    peak_sum: f64,
    peaks: u64,
}

/// Observer accumulating a [`Replication`].
pub struct Stats {
    rep: Replication,
    open: bool,
    last: f64,
    width: f64,
    batches: Vec<Batch>,
}

fn trapezoid(a: f64, b: f64, freshest: f64) -> f64 {
    0.5 * (b - a) * ((a - freshest) + (b - freshest))
}

impl Stats {
    /// `batch_width` is the initial batch length; it doubles as needed to
    /// keep at most 64 batches.
    pub fn new(batch_width: f64) -> Self {
        Stats {
            rep: Replication::default(),
            open: false,
            last: 0.0,
            width: batch_width,
            batches: Vec::new(),
        }
    }

    fn batch_index(&mut self, t: f64) -> usize {
        let mut idx = ((t - self.rep.window_start) / self.width).floor().max(0.0) as usize;
        while idx >= MAX_BATCHES {
            let merged: Vec<Batch> = self
                .batches
                .chunks(2)
                .map(|c| {
                    c.iter().fold(Batch::default(), |acc, b| Batch {
                        area: acc.area + b.area,
                        peak_sum: acc.peak_sum + b.peak_sum,
                        peaks: acc.peaks + b.peaks,
                    })
                })
                .collect();
            self.batches = merged;
            self.width *= 2.0;
            idx = ((t - self.rep.window_start) / self.width).floor().max(0.0) as usize;
        }
        if idx >= self.batches.len() {
            self.batches.resize(idx + 1, Batch::default());
        }
        idx
    }

    fn batch_end(&self, idx: usize) -> f64 {
        self.rep.window_start + (idx + 1) as f64 * self.width
    }

    fn add_area(&mut self, a: f64, b: f64, freshest: f64) {
        self.rep.area += trapezoid(a, b, freshest);
        let mut lo = a;
        while lo < b {
            let idx = self.batch_index(lo);
            let mut hi = b.min(self.batch_end(idx));
            if hi <= lo {
                // Rounding put `lo` on the edge; the remainder stays here.
                hi = b;
            }
            self.batches[idx].area += trapezoid(lo, hi, freshest);
            lo = hi;
        }
    }

    pub fn finish(self) -> Replication {
        self.rep
    }
}

impl Observer for Stats {
    fn open(&mut self, t: f64, _freshest: f64) {
        self.open = true;
        self.rep.window_start = t;
        self.last = t;
    }

    fn generate(&mut self, _t: f64, _id: u64, _freshest: f64) {
        if self.open {
            self.rep.generated += 1;
        }
    }

    fn depart(&mut self, t: f64, p: &Packet, freshest: f64, informative: bool) {
        if !self.open {
            return;
        }
        self.rep.departures += 1;
        self.rep.delay.push(t - p.generated);
        if informative {
            self.add_area(self.last, t, freshest);
            self.last = t;
            let peak = t - freshest;
            self.rep.informative += 1;
            self.rep.peak_sum += peak;
            let idx = self.batch_index(t);
            self.batches[idx].peak_sum += peak;
            self.batches[idx].peaks += 1;
        }
    }

    fn preempt(&mut self, _t: f64, _p: &Packet, _freshest: f64) {
        if self.open {
            self.rep.preempted += 1;
        }
    }

    fn close(&mut self, t: f64, freshest: f64) {
        if self.open && t > self.last {
            self.add_area(self.last, t, freshest);
        }
        self.rep.window_end = t;
        // Only batches that ended inside the window enter the batch means.
        let full = self
            .batches
            .iter()
            .enumerate()
            .filter(|(i, _)| self.batch_end(*i) <= t)
            .map(|(_, b)| *b)
            .collect::<Vec<_>>();
        self.rep.batch_average = full.iter().map(|b| b.area / self.width).collect();
        self.rep.batch_peak = full
            .iter()
            .filter(|b| b.peaks > 0)
            .map(|b| b.peak_sum / b.peaks as f64)
            .collect();
    }
}
