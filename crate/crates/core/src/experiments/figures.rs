//! Preemptive LCFS and infinite-server age curves over the λ grid.

use rayon::prelude::*;

use crate::analytic::{evaluate, lcfsp_mg1, Discipline, QueueSpec};
use crate::distributions::Distribution;
use crate::error::Result;
use crate::experiments::{point_seed, SweepOptions, SweepRow};
use crate::parallel;
use crate::simulator;

pub const FIGURE3_SERVICES: [&str; 6] = [
    "det",
    "exp",
    "pareto:1.5",
    "pareto:1.1",
    "pareto:1.01",
    "pareto:1.001",
];
pub const FIGURE4_SERVICES: [&str; 4] = ["lognorm:1", "lognorm:2", "lognorm:4", "lognorm:50"];

/// Label used for the rows carrying the lower bound.
pub const LOWER_BOUND: &str = "lower-bound";

/// Preemptive LCFS M/G/1 average age for the deterministic, exponential and
/// Pareto services, plus the 1/λ lower bound.
pub fn figure3(opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    sweep(
        "figure3",
        Discipline::LcfsPreemptive,
        &FIGURE3_SERVICES,
        opts,
    )
}

/// As [`figure3`] with log-normal services.
pub fn figure4(opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    sweep(
        "figure4",
        Discipline::LcfsPreemptive,
        &FIGURE4_SERVICES,
        opts,
    )
}

/// Infinite-server M/G/∞ average age (Monte Carlo, standard error in
/// `ci_average`) for the figure-3 services, plus the 1/λ lower bound.
pub fn figure6(opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    sweep(
        "figure6",
        Discipline::InfiniteServer,
        &FIGURE3_SERVICES,
        opts,
    )
}

fn sweep(
    scenario: &str,
    discipline: Discipline,
    services: &[&str],
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    let points: Vec<(usize, &str, f64)> = services
        .iter()
        .flat_map(|s| opts.lambdas.iter().map(move |&l| (*s, l)))
        .enumerate()
        .map(|(i, (s, l))| (i, s, l))
        .collect();
    let mut rows: Vec<SweepRow> = parallel::install(|| {
        points
            .par_iter()
            .map(|&(i, s, l)| point(scenario, discipline, s, l, point_seed(opts.seed, i), opts))
            .collect::<Result<Vec<_>>>()
    })?;
    for &l in &opts.lambdas {
        let mut row = SweepRow::new(scenario, discipline, "exp", LOWER_BOUND, l, opts.mu);
        // ½E[X²]/E[X] = 1/λ for Poisson generation; the peak bound is E[X].
        row.analytic_average = Some(1.0 / l);
        if discipline == Discipline::LcfsPreemptive {
            row.analytic_peak = Some(1.0 / l);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn point(
    scenario: &str,
    discipline: Discipline,
    service: &str,
    lambda: f64,
    seed: u64,
    opts: &SweepOptions,
) -> Result<SweepRow> {
    let arrival = Distribution::exponential(lambda)?;
    let law = Distribution::parse(service, opts.mu)?;
    let spec = QueueSpec::new(discipline, arrival, law)?;
    let mut row = SweepRow::new(scenario, discipline, "exp", &law.literal(), lambda, opts.mu);
    row.param = law.family().shape();
    match discipline {
        Discipline::InfiniteServer => {
            let a = evaluate(&spec, opts.samples, seed)?;
            row.analytic_average = a.average;
            row.seed = Some(seed);
            if opts.is_spot(lambda) {
                let r = simulator::run(&opts.sim_config(spec, seed))?;
                row.fill_sim(&r);
                row.ci_peak = None;
            }
            // The Monte Carlo standard error goes in the ci_average column.
            row.ci_average = Some(a.error_estimate);
        }
        _ => {
            let a = lcfsp_mg1(lambda, &law)?;
            row.analytic_peak = a.peak;
            row.analytic_average = a.average;
            if opts.is_spot(lambda) {
                let r = simulator::run(&opts.sim_config(spec, seed))?;
                row.fill_sim(&r);
            }
        }
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SweepOptions {
        SweepOptions {
            lambdas: vec![0.5, 0.9],
            samples: 20_000,
            spot: vec![],
            ..SweepOptions::default()
        }
    }

    fn find<'a>(rows: &'a [SweepRow], service: &str, lambda: f64) -> &'a SweepRow {
        rows.iter()
            .find(|r| r.service_spec == service && (r.lambda - lambda).abs() < 1e-12)
            .unwrap()
    }

    #[test]
    fn figure3_values_and_order() {
        let rows = figure3(&quick()).unwrap();
        assert_eq!(rows.len(), 7 * 2);
        let det = find(&rows, "det", 0.5).analytic_average.unwrap();
        assert!((det - 0.5f64.exp() / 0.5).abs() < 1e-12);
        for l in [0.5, 0.9] {
            let d = find(&rows, "det", l).analytic_average.unwrap();
            let e = find(&rows, "exp", l).analytic_average.unwrap();
            assert!(e < d);
        }
        let p = find(&rows, "pareto:1.001", 0.9).analytic_average.unwrap();
        assert!((p * 0.9 - 1.0).abs() < 0.02);
        assert_eq!(
            find(&rows, LOWER_BOUND, 0.9).analytic_average,
            Some(1.0 / 0.9)
        );
        assert_eq!(find(&rows, "pareto:1.5", 0.5).param, Some(1.5));
        // Grid order: service-major, then λ.
        assert_eq!(rows[0].service_spec, "det");
        assert_eq!(rows[1].lambda, 0.9);
    }

    #[test]
    fn figure4_sigma_ladder_approaches_bound() {
        let rows = figure4(&quick()).unwrap();
        let avgs: Vec<f64> = FIGURE4_SERVICES
            .iter()
            .map(|s| find(&rows, s, 0.9).analytic_average.unwrap())
            .collect();
        assert!(avgs.windows(2).all(|w| w[1] < w[0]));
        assert!((avgs[3] * 0.9 - 1.0).abs() < 0.02);
    }

    #[test]
    fn figure6_rows() {
        let rows = figure6(&quick()).unwrap();
        let det = find(&rows, "det", 0.5);
        assert_eq!(det.analytic_average, Some(3.0));
        assert_eq!(det.ci_average, Some(0.0));
        assert!(det.analytic_peak.is_none());
        let e = find(&rows, "exp", 0.5).analytic_average.unwrap();
        let p = find(&rows, "pareto:1.5", 0.5).analytic_average.unwrap();
        assert!(p < e && e < 3.0);
    }

    #[test]
    fn sweep_is_reproducible() {
        let a = figure6(&quick()).unwrap();
        let b = figure6(&quick()).unwrap();
        assert_eq!(a, b);
    }
}
