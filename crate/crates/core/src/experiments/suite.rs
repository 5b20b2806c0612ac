//! Ordering checks on the standard grid and analytic-versus-simulation
//! agreement checks.

use rayon::prelude::*;

use crate::analytic::{
    delay_fcfs_mg1, delay_lcfsp_mg1, evaluate, fcfs_dd1, fcfs_gm1, fcfs_mg1_peak,
    lcfsp_cross_terms, lcfsp_gg1, lcfsp_gm1, lcfsp_mg1, AnalyticAge, Discipline, QueueSpec,
};
use crate::distributions::Distribution;
use crate::error::Result;
use crate::experiments::{lambda_grid, point_seed, CheckRow};
use crate::parallel;
use crate::simulator::{self, SimConfig, SimResult, StopRule, DEFAULT_WARMUP};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub lambdas: Vec<f64>,
    pub mu: f64,
    pub seed: u64,
    pub samples: u64,
    /// Packets per replication for the simulation checks.
    pub packets: u64,
    pub replications: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            lambdas: lambda_grid(0.1, 0.9, 0.1),
            mu: 1.0,
            seed: 1,
            samples: crate::analytic::DEFAULT_GGINF_SAMPLES,
            packets: 1_000_000,
            replications: 4,
        }
    }
}

const ALTERNATIVES: [&str; 4] = ["exp", "pareto:1.5", "lognorm:1", "weibull:0.5"];
const LIGHT_ALTERNATIVES: [&str; 4] = ["exp", "weibull:2", "weibull:0.5", "lognorm:1"];
const PARETO_LADDER: [&str; 4] = ["pareto:1.5", "pareto:1.1", "pareto:1.01", "pareto:1.001"];
const LOGNORMAL_LADDER: [&str; 4] = ["lognorm:1", "lognorm:2", "lognorm:4", "lognorm:50"];

fn law(lit: &str, rate: f64) -> Result<Distribution> {
    Distribution::parse(lit, rate)
}

fn at(l: f64, mu: f64, what: &str) -> String {
    format!("lambda={l} mu={mu} {what}")
}

fn both(a: &AnalyticAge) -> (f64, f64) {
    (a.peak.unwrap_or(f64::NAN), a.average.unwrap_or(f64::NAN))
}

fn sim(spec: QueueSpec, opts: &SuiteOptions, seed: u64) -> Result<SimResult> {
    simulator::run(
        &SimConfig::new(spec, StopRule::Packets(opts.packets))
            .seed(seed)
            .replications(opts.replications)
            .warmup(DEFAULT_WARMUP),
    )
}

fn queue(d: Discipline, a: &str, lambda: f64, s: &str, mu: f64) -> Result<QueueSpec> {
    QueueSpec::new(d, law(a, lambda)?, law(s, mu)?)
}

/// Every ordering property on the grid, one row per comparison.
pub fn theorem_suite(opts: &SuiteOptions) -> Vec<CheckRow> {
    let mu = opts.mu;
    let mut rows = Vec::new();
    for &l in &opts.lambdas {
        fcfs_checks(&mut rows, l, mu);
        lcfsp_checks(&mut rows, l, mu);
    }
    fcfs_simulated(&mut rows, opts);
    gginf_checks(&mut rows, opts);
    inversion_checks(&mut rows, 0.5, mu, opts);
    rows
}

fn fcfs_checks(rows: &mut Vec<CheckRow>, l: f64, mu: f64) {
    let bound = match fcfs_dd1(l, mu) {
        Ok(b) => both(&b),
        Err(e) => {
            rows.push(CheckRow::error("fcfs-periodic-optimal", at(l, mu, ""), &e));
            return;
        }
    };
    // Periodic generation with constant service is a lower bound for any pair.
    let pairs: [(&str, &str); 6] = [
        ("exp", "exp"),
        ("exp", "det"),
        ("det", "exp"),
        ("exp", "lognorm:1"),
        ("exp", "weibull:0.5"),
        ("weibull:2", "exp"),
    ];
    for (a, s) in pairs {
        let r = queue(Discipline::Fcfs, a, l, s, mu).and_then(|q| evaluate(&q, 0, 0));
        let point = at(l, mu, &format!("{a}/{s}"));
        match r {
            Ok(v) => {
                let (p, avg) = both(&v);
                rows.push(CheckRow::le(
                    "fcfs-periodic-optimal",
                    format!("{point} peak"),
                    bound.0,
                    p,
                ));
                rows.push(CheckRow::le(
                    "fcfs-periodic-optimal",
                    format!("{point} average"),
                    bound.1,
                    avg,
                ));
            }
            Err(e) => rows.push(CheckRow::error("fcfs-periodic-optimal", point, &e)),
        }
    }

    let det_arrival = law("det", l).and_then(|x| fcfs_gm1(&x, mu));
    for alt in LIGHT_ALTERNATIVES {
        let other = law(alt, l).and_then(|x| fcfs_gm1(&x, mu));
        let point = at(l, mu, &format!("det vs {alt} arrivals"));
        match (&det_arrival, &other) {
            (Ok(d), Ok(o)) => {
                rows.push(CheckRow::le(
                    "gm1-periodic-arrival-optimal",
                    format!("{point} peak"),
                    both(d).0,
                    both(o).0,
                ));
                rows.push(CheckRow::le(
                    "gm1-periodic-arrival-optimal",
                    format!("{point} average"),
                    both(d).1,
                    both(o).1,
                ));
            }
            (Err(e), _) | (_, Err(e)) => {
                rows.push(CheckRow::error("gm1-periodic-arrival-optimal", point, e))
            }
        }
    }

    let det_peak = law("det", mu).and_then(|s| fcfs_mg1_peak(l, &s));
    for alt in ["exp", "weibull:2", "weibull:0.5", "lognorm:1", "pareto:2.5"] {
        let point = at(l, mu, &format!("det vs {alt} service peak"));
        let other = law(alt, mu).and_then(|s| fcfs_mg1_peak(l, &s));
        match (&det_peak, &other) {
            (Ok(d), Ok(o)) => {
                rows.push(CheckRow::le("mg1-det-service-peak-optimal", point, *d, *o))
            }
            (Err(e), _) | (_, Err(e)) => {
                rows.push(CheckRow::error("mg1-det-service-peak-optimal", point, e))
            }
        }
    }
}

fn lcfsp_checks(rows: &mut Vec<CheckRow>, l: f64, mu: f64) {
    let bound = 1.0 / l;
    let mut all: Vec<&str> = vec!["det", "exp", "weibull:0.5", "weibull:2"];
    all.extend(PARETO_LADDER);
    all.extend(LOGNORMAL_LADDER);
    for s in all {
        let point = at(l, mu, &format!("M/{s}"));
        match law(s, mu).and_then(|d| lcfsp_mg1(l, &d)) {
            Ok(a) => {
                rows.push(CheckRow::le(
                    "lcfsp-lower-bound",
                    format!("{point} peak"),
                    bound,
                    both(&a).0,
                ));
                rows.push(CheckRow::le(
                    "lcfsp-lower-bound",
                    format!("{point} average"),
                    bound,
                    both(&a).1,
                ));
            }
            Err(e) => rows.push(CheckRow::error("lcfsp-lower-bound", point, &e)),
        }
    }
    // General arrivals through the cross-expectation route.
    for (a, s) in [
        ("weibull:2", "lognorm:1"),
        ("lognorm:1", "weibull:0.5"),
        ("det", "pareto:1.5"),
    ] {
        let point = at(l, mu, &format!("{a}/{s}"));
        let r = queue(Discipline::LcfsPreemptive, a, l, s, mu).and_then(|q| {
            let v = lcfsp_gg1(&q)?;
            Ok((
                v,
                q.arrival.mean(),
                0.5 * q.arrival.second_moment() / q.arrival.mean(),
            ))
        });
        match r {
            Ok((v, m1, half)) => {
                rows.push(CheckRow::le(
                    "lcfsp-lower-bound",
                    format!("{point} peak"),
                    m1,
                    both(&v).0,
                ));
                rows.push(CheckRow::le(
                    "lcfsp-lower-bound",
                    format!("{point} average"),
                    half,
                    both(&v).1,
                ));
            }
            Err(e) => rows.push(CheckRow::error("lcfsp-lower-bound", point, &e)),
        }
    }

    for ladder in [PARETO_LADDER, LOGNORMAL_LADDER] {
        let values: Result<Vec<AnalyticAge>> =
            ladder.iter().map(|s| lcfsp_mg1(l, &law(s, mu)?)).collect();
        let values = match values {
            Ok(v) => v,
            Err(e) => {
                rows.push(CheckRow::error(
                    "lcfsp-heavy-tail-ladder",
                    at(l, mu, ladder[0]),
                    &e,
                ));
                continue;
            }
        };
        for k in 1..ladder.len() {
            let point = at(l, mu, &format!("{} after {}", ladder[k], ladder[k - 1]));
            let (prev, next) = (both(&values[k - 1]), both(&values[k]));
            rows.push(CheckRow::le(
                "lcfsp-heavy-tail-ladder",
                format!("{point} peak"),
                next.0,
                prev.0,
            ));
            rows.push(CheckRow::le(
                "lcfsp-heavy-tail-ladder",
                format!("{point} average"),
                next.1,
                prev.1,
            ));
        }
        let last = both(&values[ladder.len() - 1]).1;
        rows.push(CheckRow::le(
            "lcfsp-heavy-tail-gap",
            at(
                l,
                mu,
                &format!("{} average within 1% of 1/lambda", ladder[ladder.len() - 1]),
            ),
            last,
            1.01 * bound,
        ));
    }

    let det = law("det", mu).and_then(|d| lcfsp_mg1(l, &d));
    for alt in ALTERNATIVES {
        let point = at(l, mu, &format!("det vs {alt} service"));
        let other = law(alt, mu).and_then(|d| lcfsp_mg1(l, &d));
        match (&det, &other) {
            (Ok(d), Ok(o)) => {
                rows.push(CheckRow::le(
                    "lcfsp-mg1-det-worst",
                    format!("{point} peak"),
                    both(o).0,
                    both(d).0,
                ));
                rows.push(CheckRow::le(
                    "lcfsp-mg1-det-worst",
                    format!("{point} average"),
                    both(o).1,
                    both(d).1,
                ));
            }
            (Err(e), _) | (_, Err(e)) => {
                rows.push(CheckRow::error("lcfsp-mg1-det-worst", point, e))
            }
        }
    }

    let periodic = law("det", l).and_then(|x| lcfsp_gm1(&x, mu));
    if let Ok(p) = &periodic {
        rows.push(CheckRow::le(
            "lcfsp-dm1-optimal",
            at(l, mu, "det arrivals peak vs 1/lambda + 1/mu"),
            1.0 / l + 1.0 / mu,
            both(p).0 + 1e-12,
        ));
    }
    for alt in LIGHT_ALTERNATIVES {
        let point = at(l, mu, &format!("det vs {alt} arrivals"));
        let other = law(alt, l).and_then(|x| lcfsp_gm1(&x, mu));
        match (&periodic, &other) {
            (Ok(d), Ok(o)) => {
                rows.push(CheckRow::le(
                    "lcfsp-dm1-optimal",
                    format!("{point} peak"),
                    both(d).0,
                    both(o).0,
                ));
                rows.push(CheckRow::le(
                    "lcfsp-dm1-optimal",
                    format!("{point} average"),
                    both(d).1,
                    both(o).1,
                ));
            }
            (Err(e), _) | (_, Err(e)) => rows.push(CheckRow::error("lcfsp-dm1-optimal", point, e)),
        }
    }
}

fn fcfs_simulated(rows: &mut Vec<CheckRow>, opts: &SuiteOptions) {
    let mu = opts.mu;
    let cases: Vec<(f64, &str, &str)> = [0.5, 0.9]
        .into_iter()
        .flat_map(|l| [(l, "exp", "exp"), (l, "exp", "det"), (l, "det", "exp")])
        .collect();
    let results: Vec<Result<(f64, f64, SimResult)>> = parallel::install(|| {
        cases
            .par_iter()
            .enumerate()
            .map(|(i, &(l, a, s))| {
                let b = both(&fcfs_dd1(l, mu)?);
                let r = sim(
                    queue(Discipline::Fcfs, a, l, s, mu)?,
                    opts,
                    point_seed(opts.seed, 1000 + i),
                )?;
                Ok((b.0, b.1, r))
            })
            .collect()
    });
    for (&(l, a, s), r) in cases.iter().zip(results) {
        let point = at(l, mu, &format!("{a}/{s} simulated"));
        match r {
            Ok((bp, ba, r)) => {
                rows.push(CheckRow::le(
                    "fcfs-periodic-optimal",
                    format!("{point} peak + ci"),
                    bp,
                    r.peak_age + r.ci_halfwidth_peak,
                ));
                rows.push(CheckRow::le(
                    "fcfs-periodic-optimal",
                    format!("{point} average + ci"),
                    ba,
                    r.average_age + r.ci_halfwidth_average,
                ));
            }
            Err(e) => rows.push(CheckRow::error("fcfs-periodic-optimal", point, &e)),
        }
    }
}

fn gginf_checks(rows: &mut Vec<CheckRow>, opts: &SuiteOptions) {
    let mu = opts.mu;
    let mut services = vec!["det"];
    services.extend(ALTERNATIVES);
    let points: Vec<(usize, f64, &str)> = opts
        .lambdas
        .iter()
        .flat_map(|&l| services.iter().map(move |&s| (l, s)))
        .enumerate()
        .map(|(i, (l, s))| (i, l, s))
        .collect();
    let values: Vec<Result<AnalyticAge>> = parallel::install(|| {
        points
            .par_iter()
            .map(|&(i, l, s)| {
                let q = queue(Discipline::InfiniteServer, "exp", l, s, mu)?;
                evaluate(&q, opts.samples, point_seed(opts.seed, 2000 + i))
            })
            .collect()
    });
    for (chunk, vals) in points
        .chunks(services.len())
        .zip(values.chunks(services.len()))
    {
        let l = chunk[0].1;
        let base = 1.0 / l;
        for (&(_, _, s), v) in chunk.iter().zip(vals) {
            let point = at(l, mu, &format!("M/{s}/inf"));
            match v {
                Ok(v) => rows.push(CheckRow::le(
                    "gginf-lower-bound",
                    point,
                    base - 3.0 * v.error_estimate,
                    v.average.unwrap_or(f64::NAN),
                )),
                Err(e) => rows.push(CheckRow::error("gginf-lower-bound", point, e)),
            }
        }
        let det = &vals[0];
        for (&(_, _, s), v) in chunk.iter().zip(vals).skip(1) {
            let point = at(l, mu, &format!("det vs {s} service"));
            match (det, v) {
                (Ok(d), Ok(o)) => rows.push(CheckRow::le(
                    "gginf-det-worst",
                    point,
                    o.average.unwrap_or(f64::NAN) + 3.0 * o.error_estimate,
                    d.average.unwrap_or(f64::NAN),
                )),
                (Err(e), _) | (_, Err(e)) => {
                    rows.push(CheckRow::error("gginf-det-worst", point, e))
                }
            }
        }
    }
}

fn inversion_checks(rows: &mut Vec<CheckRow>, l: f64, mu: f64, opts: &SuiteOptions) {
    let r = (|| -> Result<()> {
        let det = law("det", mu)?;
        let exp = law("exp", mu)?;
        rows.push(CheckRow::le(
            "age-delay-inversion",
            at(l, mu, "lcfsp delay det vs exp"),
            delay_lcfsp_mg1(l, &det)?,
            delay_lcfsp_mg1(l, &exp)?,
        ));
        rows.push(CheckRow::le(
            "age-delay-inversion",
            at(l, mu, "lcfsp average age exp vs det"),
            lcfsp_mg1(l, &exp)?.average.unwrap_or(f64::NAN),
            lcfsp_mg1(l, &det)?.average.unwrap_or(f64::NAN),
        ));
        let det_q = queue(Discipline::InfiniteServer, "exp", l, "det", mu)?;
        let det_age = evaluate(&det_q, opts.samples, opts.seed)?
            .average
            .unwrap_or(f64::NAN);
        for alt in [
            "exp",
            "pareto:1.5",
            "pareto:1.1",
            "pareto:1.01",
            "pareto:1.001",
        ] {
            let s = law(alt, mu)?;
            rows.push(CheckRow::le(
                "age-delay-inversion",
                at(l, mu, &format!("inf delay variance det vs {alt}")),
                det.variance(),
                s.variance(),
            ));
            let q = queue(Discipline::InfiniteServer, "exp", l, alt, mu)?;
            let a = evaluate(&q, opts.samples, opts.seed)?;
            rows.push(CheckRow::le(
                "age-delay-inversion",
                at(l, mu, &format!("inf average age {alt} vs det")),
                a.average.unwrap_or(f64::NAN) + 3.0 * a.error_estimate,
                det_age,
            ));
        }
        Ok(())
    })();
    if let Err(e) = r {
        rows.push(CheckRow::error("age-delay-inversion", at(l, mu, ""), &e));
    }
}

/// Simulation against the analytic values for queues with a formula.
///
/// Ages and FCFS delay must agree within twice the 95% half-width plus the
/// analytic error estimate. Preemptive LCFS packets that complete have
/// delay E[S | S < X], which is checked in place of the mean delay formula;
/// the informative fraction must be within 0.01 of P(S < X).
pub fn simulation_checks(opts: &SuiteOptions) -> Vec<CheckRow> {
    let cases: [(Discipline, &str, f64, &str); 10] = [
        (Discipline::Fcfs, "exp", 0.5, "exp"),
        (Discipline::Fcfs, "exp", 0.5, "det"),
        (Discipline::Fcfs, "det", 0.5, "exp"),
        (Discipline::Fcfs, "exp", 0.5, "lognorm:1"),
        (Discipline::LcfsPreemptive, "exp", 1.0, "exp"),
        (Discipline::LcfsPreemptive, "exp", 0.5, "det"),
        (Discipline::LcfsPreemptive, "det", 0.5, "exp"),
        (Discipline::LcfsPreemptive, "weibull:2", 0.7, "lognorm:1"),
        (Discipline::InfiniteServer, "exp", 0.8, "exp"),
        (Discipline::InfiniteServer, "exp", 0.5, "det"),
    ];
    let mu = opts.mu;
    let results: Vec<Vec<CheckRow>> = parallel::install(|| {
        cases
            .par_iter()
            .enumerate()
            .map(|(i, &(d, a, l, s))| {
                let point = format!("{d} {a}/{s} lambda={l} mu={mu}");
                agreement(d, a, l, s, mu, opts, point_seed(opts.seed, 3000 + i))
                    .unwrap_or_else(|e| vec![CheckRow::error("sim-vs-analytic", point, &e)])
            })
            .collect()
    });
    results.into_iter().flatten().collect()
}

fn agreement(
    d: Discipline,
    a: &str,
    l: f64,
    s: &str,
    mu: f64,
    opts: &SuiteOptions,
    seed: u64,
) -> Result<Vec<CheckRow>> {
    let q = queue(d, a, l, s, mu)?;
    let an = evaluate(&q, opts.samples, seed)?;
    let reps: Vec<_> = {
        let c = SimConfig::new(q, StopRule::Packets(opts.packets))
            .seed(seed)
            .replications(opts.replications);
        c.validate()?;
        (0..c.replications as u64)
            .into_par_iter()
            .map(|r| simulator::replicate(&c, r))
            .collect()
    };
    let c = SimConfig::new(q, StopRule::Packets(opts.packets))
        .seed(seed)
        .replications(opts.replications);
    let r = simulator::aggregate(&c, &reps)?;
    let delays: Vec<f64> = reps.iter().map(|x| x.delay.mean).collect();
    let delay_ci = simulator::t_halfwidth(&delays);
    let point = format!("{d} {a}/{s} lambda={l} mu={mu}");
    let mut rows = Vec::new();
    let slack = an.error_estimate * 4.0;
    if let Some(avg) = an.average {
        rows.push(CheckRow::le(
            "sim-vs-analytic",
            format!("{point} average"),
            (r.average_age - avg).abs(),
            2.0 * r.ci_halfwidth_average + slack,
        ));
    }
    if let Some(peak) = an.peak {
        rows.push(CheckRow::le(
            "sim-vs-analytic",
            format!("{point} peak"),
            (r.peak_age - peak).abs(),
            2.0 * r.ci_halfwidth_peak + slack,
        ));
    }
    match d {
        Discipline::Fcfs if q.arrival.is_exponential() => {
            let t = delay_fcfs_mg1(l, &q.service)?;
            rows.push(CheckRow::le(
                "sim-vs-analytic",
                format!("{point} delay"),
                (r.delay_mean - t).abs(),
                2.0 * delay_ci,
            ));
        }
        Discipline::LcfsPreemptive => {
            let (terms, _) = lcfsp_cross_terms(&q.arrival, &q.service, true)?;
            let served = terms.served_mean / terms.p_served;
            rows.push(CheckRow::le(
                "sim-vs-analytic",
                format!("{point} delivered delay"),
                (r.delay_mean - served).abs(),
                2.0 * delay_ci,
            ));
            rows.push(CheckRow::le(
                "sim-vs-analytic",
                format!("{point} informative fraction"),
                (r.informative_fraction - terms.p_served).abs(),
                0.01,
            ));
        }
        Discipline::InfiniteServer => {
            rows.push(CheckRow::le(
                "sim-vs-analytic",
                format!("{point} delay"),
                (r.delay_mean - q.service.mean()).abs(),
                2.0 * delay_ci,
            ));
        }
        _ => {}
    }
    Ok(rows)
}
