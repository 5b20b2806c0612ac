//! Delay and age side by side: the service law with the best delay has the
//! worst age.

use rayon::prelude::*;

use crate::analytic::{delay_lcfsp_mg1, evaluate, lcfsp_mg1, Discipline, QueueSpec};
use crate::distributions::Distribution;
use crate::error::Result;
use crate::experiments::{format_float, point_seed, Table, FIGURE3_SERVICES};
use crate::parallel;
use crate::simulator::{self, SimConfig, StopRule};

#[derive(Debug, Clone, PartialEq)]
pub struct AgeDelayOptions {
    pub lambda: f64,
    pub mu: f64,
    pub seed: u64,
    pub samples: u64,
    /// Packets per replication for the simulated columns; 0 skips them.
    pub packets: u64,
    pub replications: u32,
}

impl Default for AgeDelayOptions {
    fn default() -> Self {
        AgeDelayOptions {
            lambda: 0.5,
            mu: 1.0,
            seed: 1,
            samples: crate::analytic::DEFAULT_GGINF_SAMPLES,
            packets: 0,
            replications: 1,
        }
    }
}

/// One (discipline, service) entry.
///
/// `delay_mean` is the preemptive LCFS M/G/1 delay formula or, for the
/// infinite server, E[S]; `delay_var` is Var(S) for the infinite server and
/// empty for LCFSp. The simulated delay counts completed packets only.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AgeDelayRow {
    pub discipline: Discipline,
    pub arrival_spec: String,
    pub service_spec: String,
    pub lambda: f64,
    pub mu: f64,
    pub delay_mean: f64,
    pub delay_var: Option<f64>,
    pub average_age: f64,
    pub age_error: f64,
    pub sim_delay_mean: Option<f64>,
    pub sim_delay_var: Option<f64>,
    pub sim_average: Option<f64>,
    pub delay_best: bool,
    pub age_worst: bool,
}

impl Table for AgeDelayRow {
    fn header() -> &'static [&'static str] {
        &[
            "discipline",
            "arrival_spec",
            "service_spec",
            "lambda",
            "mu",
            "delay_mean",
            "delay_var",
            "average_age",
            "age_error",
            "sim_delay_mean",
            "sim_delay_var",
            "sim_average",
            "delay_best",
            "age_worst",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
        vec![
            self.discipline.to_string(),
            self.arrival_spec.clone(),
            self.service_spec.clone(),
            format_float(self.lambda),
            format_float(self.mu),
            format_float(self.delay_mean),
            opt(self.delay_var),
            format_float(self.average_age),
            format_float(self.age_error),
            opt(self.sim_delay_mean),
            opt(self.sim_delay_var),
            opt(self.sim_average),
            self.delay_best.to_string(),
            self.age_worst.to_string(),
        ]
    }
}

/// The table over {det, exp, Pareto ladder} × {lcfsp, inf} with Poisson
/// generation, grouped by discipline.
pub fn age_vs_delay(opts: &AgeDelayOptions) -> Result<Vec<AgeDelayRow>> {
    let points: Vec<(usize, Discipline, &str)> =
        [Discipline::LcfsPreemptive, Discipline::InfiniteServer]
            .into_iter()
            .flat_map(|d| FIGURE3_SERVICES.iter().map(move |s| (d, *s)))
            .enumerate()
            .map(|(i, (d, s))| (i, d, s))
            .collect();
    let mut rows = parallel::install(|| {
        points
            .par_iter()
            .map(|&(i, d, s)| row(d, s, opts, point_seed(opts.seed, i)))
            .collect::<Result<Vec<_>>>()
    })?;
    for group in rows.chunk_by_mut(|a, b| a.discipline == b.discipline) {
        mark(group);
    }
    Ok(rows)
}

fn row(d: Discipline, service: &str, opts: &AgeDelayOptions, seed: u64) -> Result<AgeDelayRow> {
    let (l, mu) = (opts.lambda, opts.mu);
    let law = Distribution::parse(service, mu)?;
    let spec = QueueSpec::new(d, Distribution::exponential(l)?, law)?;
    let (delay_mean, delay_var, average_age, age_error) = match d {
        Discipline::LcfsPreemptive => {
            let a = lcfsp_mg1(l, &law)?;
            (
                delay_lcfsp_mg1(l, &law)?,
                None,
                a.average.unwrap_or(f64::NAN),
                a.error_estimate,
            )
        }
        _ => {
            let a = evaluate(&spec, opts.samples, seed)?;
            (
                law.mean(),
                Some(law.variance()),
                a.average.unwrap_or(f64::NAN),
                a.error_estimate,
            )
        }
    };
    let mut out = AgeDelayRow {
        discipline: d,
        arrival_spec: "exp".into(),
        service_spec: law.literal(),
        lambda: l,
        mu,
        delay_mean,
        delay_var,
        average_age,
        age_error,
        sim_delay_mean: None,
        sim_delay_var: None,
        sim_average: None,
        delay_best: false,
        age_worst: false,
    };
    if opts.packets > 0 {
        let r = simulator::run(
            &SimConfig::new(spec, StopRule::Packets(opts.packets))
                .seed(seed)
                .replications(opts.replications),
        )?;
        let finite = |x: f64| Some(x).filter(|v| v.is_finite());
        out.sim_delay_mean = finite(r.delay_mean);
        out.sim_delay_var = finite(r.delay_variance);
        out.sim_average = finite(r.average_age);
    }
    Ok(out)
}

fn mark(group: &mut [AgeDelayRow]) {
    let key = |r: &AgeDelayRow| (r.delay_mean, r.delay_var.unwrap_or(0.0));
    let best = group
        .iter()
        .map(key)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)))
        .unwrap_or((f64::NAN, f64::NAN));
    let worst = group
        .iter()
        .map(|r| r.average_age)
        .max_by(f64::total_cmp)
        .unwrap_or(f64::NAN);
    for r in group.iter_mut() {
        r.delay_best = key(r) == best;
        r.age_worst = r.average_age == worst;
    }
}

/// True when deterministic service is delay-best and age-worst in every
/// discipline group.
pub fn inversion_holds(rows: &[AgeDelayRow]) -> bool {
    let groups: Vec<_> = rows.chunk_by(|a, b| a.discipline == b.discipline).collect();
    !groups.is_empty()
        && groups.iter().all(|g| {
            g.iter()
                .find(|r| r.service_spec == "det")
                .is_some_and(|r| r.delay_best && r.age_worst)
        })
}
