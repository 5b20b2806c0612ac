//! Seeded event-driven simulation of the age process.
//!
//! Average age is the exact area under the sawtooth over the measurement
//! window divided by its length; peak age is the ratio of summed peaks to
//! the number of informative departures. Preempted LCFS packets are
//! discarded: they count in `preemption_count` but not in delay.

pub mod engine;
pub mod source;
pub mod stats;
pub mod trace;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::analytic::QueueSpec;
use crate::error::{AoiError, Result};
use crate::parallel;

pub use engine::{drive, Observer, Packet};
pub use source::{draws, Draw, PacketSource, RandomSource, ReplaySource, Role};
pub use stats::{Moments, Replication, Stats};
pub use trace::{write_trace, TraceEvent, TraceRecord};

pub const DEFAULT_WARMUP: f64 = 0.1;

/// When a replication stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Simulated time.
    Horizon(f64),
    /// Number of generated packets.
    Packets(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub spec: QueueSpec,
    pub stop: StopRule,
    /// Leading share of the run excluded from every statistic.
    pub warmup_fraction: f64,
    pub seed: u64,
    pub replications: u32,
}

impl SimConfig {
    pub fn new(spec: QueueSpec, stop: StopRule) -> Self {
        SimConfig {
            spec,
            stop,
            warmup_fraction: DEFAULT_WARMUP,
            seed: 1,
            replications: 1,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn replications(mut self, n: u32) -> Self {
        self.replications = n;
        self
    }

    pub fn warmup(mut self, fraction: f64) -> Self {
        self.warmup_fraction = fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.warmup_fraction;
        if !(0.0..0.5).contains(&f) {
            return Err(AoiError::Config(format!(
                "warmup fraction must lie in [0, 0.5), got {f}"
            )));
        }
        if self.replications == 0 {
            return Err(AoiError::Config("replications must be at least 1".into()));
        }
        match self.stop {
            StopRule::Horizon(t) => {
                if !(t.is_finite() && t > 0.0) {
                    return Err(AoiError::Config(format!(
                        "horizon must be positive and finite, got {t}"
                    )));
                }
                let window = t * (1.0 - f);
                if window * self.spec.lambda() < 2.0 {
                    return Err(AoiError::Config(format!(
                        "horizon {t} too small for warmup: the measurement window of {window} \
                         holds fewer than two mean inter-generation times"
                    )));
                }
            }
            StopRule::Packets(n) => {
                let w = (f * n as f64).floor() as u64;
                if n < w + 2 {
                    return Err(AoiError::Config(format!(
                        "packet budget {n} too small for warmup: fewer than two packets \
                         remain after the first {w}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Aggregated estimates over all replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub average_age: f64,
    pub peak_age: f64,
    pub delay_mean: f64,
    pub delay_variance: f64,
    pub informative_fraction: f64,
    pub preemption_count: u64,
    /// 95% half-width; across replications, or from batch means for one.
    pub ci_halfwidth_average: f64,
    pub ci_halfwidth_peak: f64,
    pub seed: u64,
    pub replications: u32,
    pub departures: u64,
}

/// Student-t 95% half-width of the mean of `values`.
pub fn t_halfwidth(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 2 {
        return f64::NAN;
    }
    let n = k as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    t * (var / n).sqrt()
}

/// Runs replication `index` with its own random streams.
pub fn replicate(config: &SimConfig, index: u64) -> Replication {
    let mut source = RandomSource::new(&config.spec, config.seed, index);
    let mut stats = Stats::new(1.0 / config.spec.lambda());
    drive(
        &config.spec,
        config.stop,
        config.warmup_fraction,
        &mut source,
        &mut stats,
    );
    stats.finish()
}

/// Runs the queue on a fixed list of draws.
pub fn replay(spec: &QueueSpec, draws: &[Draw], stop: StopRule, warmup: f64) -> Replication {
    let mut source = ReplaySource::new(draws);
    let mut stats = Stats::new(1.0 / spec.lambda());
    drive(spec, stop, warmup, &mut source, &mut stats);
    stats.finish()
}

/// Simulates every replication (in parallel) and aggregates them.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let reps: Vec<Replication> = parallel::install(|| {
        (0..config.replications as u64)
            .into_par_iter()
            .map(|r| replicate(config, r))
            .collect()
    });
    aggregate(config, &reps)
}

/// Combines replications in index order.
pub fn aggregate(config: &SimConfig, reps: &[Replication]) -> Result<SimResult> {
    let averages: Vec<f64> = reps.iter().map(Replication::average_age).collect();
    let peaks: Vec<f64> = reps
        .iter()
        .map(Replication::peak_age)
        .filter(|p| p.is_finite())
        .collect();
    let (average_age, peak_age, ci_avg, ci_peak) = if reps.len() == 1 {
        let r = &reps[0];
        (
            averages[0],
            r.peak_age(),
            t_halfwidth(&r.batch_average),
            t_halfwidth(&r.batch_peak),
        )
    } else {
        let mean = |v: &[f64]| {
            if v.is_empty() {
                f64::NAN
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        (
            mean(&averages),
            mean(&peaks),
            t_halfwidth(&averages),
            t_halfwidth(&peaks),
        )
    };
    if !(average_age.is_finite() && average_age > 0.0) {
        return Err(AoiError::Degenerate(average_age));
    }
    let delay = reps
        .iter()
        .fold(Moments::default(), |acc, r| acc.merge(&r.delay));
    let informative: u64 = reps.iter().map(|r| r.informative).sum();
    let departures: u64 = reps.iter().map(|r| r.departures).sum();
    let preempted: u64 = reps.iter().map(|r| r.preempted).sum();
    let resolved = departures + preempted;
    Ok(SimResult {
        average_age,
        peak_age,
        delay_mean: delay.mean_or_nan(),
        delay_variance: delay.variance(),
        informative_fraction: if resolved == 0 {
            f64::NAN
        } else {
            informative as f64 / resolved as f64
        },
        preemption_count: preempted,
        ci_halfwidth_average: ci_avg,
        ci_halfwidth_peak: ci_peak,
        seed: config.seed,
        replications: config.replications,
        departures,
    })
}

/// Event log of replication 0 from time 0, at most `max_events` records.
pub fn trace(config: &SimConfig, max_events: usize) -> Result<Vec<TraceRecord>> {
    config.validate()?;
    let mut source = RandomSource::new(&config.spec, config.seed, 0);
    let mut tracer = trace::Tracer::new(max_events);
    drive(&config.spec, config.stop, 0.0, &mut source, &mut tracer);
    Ok(tracer.records)
}

/// Event log for a fixed list of draws.
pub fn trace_replay(spec: &QueueSpec, draws: &[Draw], max_events: usize) -> Vec<TraceRecord> {
    let mut source = ReplaySource::new(draws);
    let mut tracer = trace::Tracer::new(max_events);
    drive(
        spec,
        StopRule::Packets(draws.len() as u64),
        0.0,
        &mut source,
        &mut tracer,
    );
    tracer.records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Discipline;
    use crate::distributions::Distribution;

    fn spec(d: Discipline, a: &str, lambda: f64, s: &str, mu: f64) -> QueueSpec {
        QueueSpec::new(
            d,
            Distribution::parse(a, lambda).unwrap(),
            Distribution::parse(s, mu).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn deterministic_fcfs_is_exact() {
        let q = spec(Discipline::Fcfs, "det", 0.5, "det", 1.0);
        let r = run(&SimConfig::new(q, StopRule::Horizon(1e4)).seed(7)).unwrap();
        assert_eq!(r.peak_age, 3.0);
        assert_eq!(r.average_age, 2.0);
        assert_eq!(r.delay_mean, 1.0);
        assert_eq!(r.delay_variance, 0.0);
        assert_eq!(r.informative_fraction, 1.0);
        assert_eq!(r.ci_halfwidth_average, 0.0);
    }

    #[test]
    fn trace_of_periodic_queue() {
        let q = spec(Discipline::Fcfs, "det", 0.5, "det", 1.0);
        let t = trace(&SimConfig::new(q, StopRule::Horizon(100.0)), 6).unwrap();
        assert_eq!(t.len(), 6);
        let drops: Vec<_> = t
            .iter()
            .filter(|r| r.event == TraceEvent::AgeDrop)
            .collect();
        assert_eq!(drops.len(), 3);
        for w in drops.windows(2) {
            assert_eq!(w[1].time - w[0].time, 2.0);
        }
        assert!(drops
            .iter()
            .all(|r| r.age_after == 1.0 && r.age_before == 3.0));
    }

    #[test]
    fn preempt_precedes_generate() {
        let q = spec(Discipline::LcfsPreemptive, "exp", 1.0, "exp", 1.0);
        let d = [
            Draw {
                gap: 1.0,
                service: 5.0,
            },
            Draw {
                gap: 1.0,
                service: 0.5,
            },
        ];
        let t = trace_replay(&q, &d, 10);
        let kinds: Vec<_> = t.iter().map(|r| (r.event, r.id)).collect();
        assert_eq!(
            kinds,
            vec![
                (TraceEvent::Generate, 1),
                (TraceEvent::Preempt, 1),
                (TraceEvent::Generate, 2),
            ]
        );
    }

    #[test]
    fn overtaking_in_infinite_server() {
        // Packet 2 is slow, packet 3 overtakes it.
        let q = spec(Discipline::InfiniteServer, "exp", 1.0, "exp", 1.0);
        let d = [
            Draw {
                gap: 1.0,
                service: 0.5,
            },
            Draw {
                gap: 1.0,
                service: 3.0,
            },
            Draw {
                gap: 0.5,
                service: 0.5,
            },
            Draw {
                gap: 10.0,
                service: 0.1,
            },
        ];
        let t = trace_replay(&q, &d, 100);
        let dep: Vec<_> = t
            .iter()
            .filter(|r| matches!(r.event, TraceEvent::Depart | TraceEvent::AgeDrop))
            .map(|r| (r.id, r.event))
            .collect();
        assert_eq!(
            dep,
            vec![
                (1, TraceEvent::AgeDrop),
                (3, TraceEvent::AgeDrop),
                (2, TraceEvent::Depart)
            ]
        );
    }

    #[test]
    fn config_validation() {
        let q = spec(Discipline::Fcfs, "exp", 0.5, "exp", 1.0);
        let base = SimConfig::new(q, StopRule::Packets(100));
        assert!(base.validate().is_ok());
        assert!(base.warmup(0.5).validate().is_err());
        assert!(base.warmup(-0.1).validate().is_err());
        assert!(base.replications(0).validate().is_err());
        let tiny = SimConfig::new(q, StopRule::Packets(1)).warmup(0.4);
        assert!(matches!(tiny.validate(), Err(AoiError::Config(_))));
        let short = SimConfig::new(q, StopRule::Horizon(3.0));
        assert!(short
            .validate()
            .unwrap_err()
            .to_string()
            .contains("too small for warmup"));
    }

    #[test]
    fn replications_are_reproducible_and_order_free() {
        let q = spec(Discipline::LcfsPreemptive, "exp", 0.7, "lognorm:1", 1.0);
        let c = SimConfig::new(q, StopRule::Packets(20_000))
            .seed(3)
            .replications(4);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a, b);
        let mut reps: Vec<_> = (0..4).map(|i| replicate(&c, i)).collect();
        assert_eq!(aggregate(&c, &reps).unwrap(), a);
        reps.reverse();
        let r = aggregate(&c, &reps).unwrap();
        assert!((r.average_age - a.average_age).abs() < 1e-12);
        assert!((r.delay_mean - a.delay_mean).abs() < 1e-12);
    }

    #[test]
    fn fcfs_departs_in_order_and_every_departure_informs() {
        let q = spec(Discipline::Fcfs, "exp", 0.8, "weibull:0.5", 1.0);
        let c = SimConfig::new(q, StopRule::Packets(5000)).seed(2);
        let t = trace(&c, 20_000).unwrap();
        let ids: Vec<u64> = t
            .iter()
            .filter(|r| matches!(r.event, TraceEvent::Depart | TraceEvent::AgeDrop))
            .map(|r| r.id)
            .collect();
        assert!(ids.windows(2).all(|w| w[1] == w[0] + 1));
        assert!(t
            .iter()
            .all(|r| r.event != TraceEvent::Depart && r.event != TraceEvent::Preempt));
        assert!(t.iter().all(|r| r.age_after >= 0.0));
    }
}
