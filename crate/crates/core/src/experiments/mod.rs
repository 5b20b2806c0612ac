//! Figure sweeps, ordering checks and the age-versus-delay table.
//!
//! Figure curves are analytic; a few grid points also get a simulation
//! spot-check. Rows always come out in grid order whatever order the
//! worker threads finish in.

mod delay;
mod figures;
mod suite;

use std::io::Write;

use serde::Serialize;

use crate::analytic::Discipline;
use crate::distributions::{Distribution, Family};
use crate::error::Result;
use crate::simulator::{SimConfig, SimResult, StopRule, DEFAULT_WARMUP};

pub use delay::{age_vs_delay, inversion_holds, AgeDelayOptions, AgeDelayRow};
pub use figures::{figure3, figure4, figure6, FIGURE3_SERVICES, FIGURE4_SERVICES};
pub use suite::{simulation_checks, theorem_suite, SuiteOptions};

/// Formats with 6 significant digits, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// `λ` values from `start` to `stop` inclusive in steps of `step`.
pub fn lambda_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

/// Seed for the `index`-th point of a sweep.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Laws whose simulation converges slowly enough to need a larger budget.
pub fn is_heavy(d: &Distribution) -> bool {
    match d.family() {
        Family::Pareto(_) => true,
        Family::LogNormal(s) => s > 1.0,
        Family::Weibull(k) => k < 1.0,
        _ => false,
    }
}

/// Grid and budgets shared by the figure sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub lambdas: Vec<f64>,
    pub mu: f64,
    pub seed: u64,
    /// Monte Carlo draws per infinite-server point.
    pub samples: u64,
    /// `λ` values that also get a simulation; empty disables simulation.
    pub spot: Vec<f64>,
    pub packets: u64,
    pub heavy_packets: u64,
    pub replications: u32,
    pub warmup: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            lambdas: lambda_grid(0.5, 0.99, 0.01),
            mu: 1.0,
            seed: 1,
            samples: crate::analytic::DEFAULT_GGINF_SAMPLES,
            spot: vec![0.5, 0.7, 0.9],
            packets: 1_000_000,
            heavy_packets: 10_000_000,
            replications: 1,
            warmup: DEFAULT_WARMUP,
        }
    }
}

impl SweepOptions {
    pub fn is_spot(&self, lambda: f64) -> bool {
        self.spot.iter().any(|s| (s - lambda).abs() < 1e-9)
    }

    pub fn sim_config(&self, spec: crate::analytic::QueueSpec, seed: u64) -> SimConfig {
        let packets = if is_heavy(&spec.service) || is_heavy(&spec.arrival) {
            self.heavy_packets
        } else {
            self.packets
        };
        SimConfig::new(spec, StopRule::Packets(packets))
            .seed(seed)
            .replications(self.replications)
            .warmup(self.warmup)
    }
}

/// One sweep point with analytic and simulated values for the same queue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: String,
    pub discipline: Discipline,
    pub arrival_spec: String,
    pub service_spec: String,
    pub lambda: f64,
    pub mu: f64,
    pub param: Option<f64>,
    pub analytic_peak: Option<f64>,
    pub analytic_average: Option<f64>,
    pub sim_peak: Option<f64>,
    pub sim_average: Option<f64>,
    pub sim_delay_mean: Option<f64>,
    pub sim_delay_var: Option<f64>,
    pub ci_average: Option<f64>,
    pub ci_peak: Option<f64>,
    pub seed: Option<u64>,
}

impl SweepRow {
    pub fn new(
        scenario: &str,
        discipline: Discipline,
        arrival: &str,
        service: &str,
        lambda: f64,
        mu: f64,
    ) -> Self {
        SweepRow {
            scenario: scenario.into(),
            discipline,
            arrival_spec: arrival.into(),
            service_spec: service.into(),
            lambda,
            mu,
            param: None,
            analytic_peak: None,
            analytic_average: None,
            sim_peak: None,
            sim_average: None,
            sim_delay_mean: None,
            sim_delay_var: None,
            ci_average: None,
            ci_peak: None,
            seed: None,
        }
    }

    pub(crate) fn fill_sim(&mut self, r: &SimResult) {
        let finite = |x: f64| Some(x).filter(|v| v.is_finite());
        self.sim_peak = finite(r.peak_age);
        self.sim_average = finite(r.average_age);
        self.sim_delay_mean = finite(r.delay_mean);
        self.sim_delay_var = finite(r.delay_variance);
        self.ci_average = finite(r.ci_halfwidth_average);
        self.ci_peak = finite(r.ci_halfwidth_peak);
        self.seed = Some(r.seed);
    }
}

/// A table that can be written as CSV.
pub trait Table {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl Table for SweepRow {
    fn header() -> &'static [&'static str] {
        &[
            "scenario",
            "discipline",
            "arrival_spec",
            "service_spec",
            "lambda",
            "mu",
            "param",
            "analytic_peak",
            "analytic_average",
            "sim_peak",
            "sim_average",
            "sim_delay_mean",
            "sim_delay_var",
            "ci_average",
            "ci_peak",
            "seed",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.scenario.clone(),
            self.discipline.to_string(),
            self.arrival_spec.clone(),
            self.service_spec.clone(),
            format_float(self.lambda),
            format_float(self.mu),
            opt(self.param),
            opt(self.analytic_peak),
            opt(self.analytic_average),
            opt(self.sim_peak),
            opt(self.sim_average),
            opt(self.sim_delay_mean),
            opt(self.sim_delay_var),
            opt(self.ci_average),
            opt(self.ci_peak),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }
}

/// One ordering or agreement check: passes when `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub point: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl CheckRow {
    /// `lhs ≤ rhs` up to a relative slack of 1e-9 for quadrature noise.
    pub fn le(check: &str, point: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let slack = 1e-9 * lhs.abs().max(rhs.abs());
        CheckRow {
            check: check.into(),
            point: point.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs <= rhs + slack,
        }
    }

    /// A check that could not be evaluated; always a failure.
    pub fn error(check: &str, point: impl Into<String>, err: &crate::error::AoiError) -> Self {
        CheckRow {
            check: check.into(),
            point: format!("{} ({err})", point.into()),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            pass: false,
        }
    }
}

impl Table for CheckRow {
    fn header() -> &'static [&'static str] {
        &["check", "point", "lhs", "rhs", "margin", "pass"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.check.clone(),
            self.point.clone(),
            format_float(self.lhs),
            format_float(self.rhs),
            format_float(self.margin),
            if self.pass { "pass" } else { "fail" }.into(),
        ]
    }
}

pub fn write_csv<T: Table, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::header())?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(rows: &[T], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)
        .map_err(|e| crate::error::AoiError::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_float(3.297_442_541_400_256), "3.29744");
        assert_eq!(format_float(2.0), "2");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1.0 / 0.9), "1.11111");
        assert_eq!(format_float(123_456_789.0), "1.23457e8");
        assert_eq!(format_float(0.000_012_345_678), "1.23457e-5");
        assert_eq!(format_float(0.000_123_456_78), "0.000123457");
        assert_eq!(format_float(9.999_999_9), "10");
        assert_eq!(format_float(-4.25), "-4.25");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NAN), "");
        assert_eq!(format_float(0.0), "0");
    }

    #[test]
    fn grid_hits_both_ends() {
        let g = lambda_grid(0.5, 0.99, 0.01);
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[49], 0.99);
        assert_eq!(g[20], 0.7);
        assert_eq!(lambda_grid(0.1, 0.9, 0.1).len(), 9);
    }

    #[test]
    fn missing_values_are_empty_fields() {
        let row = SweepRow::new("x", Discipline::InfiniteServer, "exp", "det", 0.5, 1.0);
        let f = row.fields();
        assert_eq!(f.len(), SweepRow::header().len());
        assert!(f[6..].iter().all(String::is_empty));
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("scenario,discipline,arrival_spec,service_spec,lambda,mu,param,"));
        assert!(text.lines().nth(1).unwrap().ends_with(",,,,,,,,,,"));
    }

    #[test]
    fn check_rows() {
        let c = CheckRow::le("a", "p", 3.0, 3.2974);
        assert!(c.pass && c.margin > 0.0);
        assert!(!CheckRow::le("a", "p", 3.3, 3.0).pass);
        assert!(CheckRow::le("a", "p", 1.0 + 1e-14, 1.0).pass);
    }
}
