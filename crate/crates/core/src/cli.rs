//! Command-line front end.
//!
//! Exit status: 0 on success, 1 for domain errors (instability, infinite
//! moments, failed checks), 2 for malformed input, with the usage text.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::{evaluate, AnalyticAge, Discipline, QueueSpec, DEFAULT_GGINF_SAMPLES};
use crate::distributions::Distribution;
use crate::error::AoiError;
use crate::experiments::{
    self, age_vs_delay, format_float, inversion_holds, lambda_grid, simulation_checks,
    theorem_suite, AgeDelayOptions, CheckRow, SuiteOptions, SweepOptions, Table,
};
use crate::simulator::{self, SimConfig, SimResult, StopRule, DEFAULT_WARMUP};

#[derive(Parser, Debug)]
#[command(
    name = "aoi-lab",
    version,
    about = "Age-of-information calculator, simulator and sweep runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form or numeric peak and average age.
    Analytic {
        #[command(flatten)]
        common: Common,
    },
    /// Event-driven simulation.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        /// Write the first N events as JSON lines instead of the summary.
        #[arg(long, value_name = "N")]
        trace: Option<usize>,
    },
    /// Figure sweeps written as CSV.
    Sweep {
        #[arg(value_enum)]
        which: SweepKind,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Ordering checks plus analytic-versus-simulation agreement.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SweepKind {
    Figure3,
    Figure4,
    Figure6,
    AgeVsDelay,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug, Default)]
struct Common {
    /// fcfs, lcfsp or inf.
    #[arg(long)]
    discipline: Option<String>,
    /// Inter-generation law: det, exp, pareto:A, lognorm:S or weibull:K.
    #[arg(long)]
    arrival: Option<String>,
    /// Service law, same syntax as --arrival.
    #[arg(long)]
    service: Option<String>,
    /// Generation rate λ.
    #[arg(long)]
    lambda: Option<f64>,
    /// Service rate μ (default 1).
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo draws for the infinite-server age.
    #[arg(long, value_parser = parse_count)]
    samples: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct SimArgs {
    /// Simulated time per replication.
    #[arg(long, conflicts_with = "packets")]
    horizon: Option<f64>,
    /// Packets generated per replication.
    #[arg(long, value_parser = parse_count)]
    packets: Option<u64>,
    #[arg(long)]
    replications: Option<u32>,
    /// Leading fraction of each run discarded, in [0, 0.5).
    #[arg(long)]
    warmup: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long)]
    lambda_min: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    lambda_step: Option<f64>,
    /// Comma-separated λ values that also get a simulation, or `none`.
    #[arg(long)]
    spot: Option<String>,
    /// Packet budget for heavy-tailed simulation points.
    #[arg(long, value_parser = parse_count)]
    heavy_packets: Option<u64>,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

enum Failure {
    Usage(String),
    Domain(AoiError),
    /// Output was written but some check failed.
    Checks(String),
}

impl From<AoiError> for Failure {
    fn from(e: AoiError) -> Self {
        match e {
            AoiError::Parse(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

const CONFIG_KEYS: [&str; 20] = [
    "discipline",
    "arrival",
    "service",
    "lambda",
    "mu",
    "seed",
    "samples",
    "out",
    "format",
    "horizon",
    "packets",
    "replications",
    "warmup",
    "lambda_min",
    "lambda_max",
    "lambda_step",
    "spot",
    "heavy_packets",
    "trace",
    "which",
];

#[derive(Default)]
struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Config, Failure> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            Failure::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Config::parse(&text)
    }

    fn parse(text: &str) -> Result<Config, Failure> {
        let mut map = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Failure::Usage(format!(
                    "config line {}: expected `key = value`, got `{line}`",
                    n + 1
                )));
            };
            let key = k.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Failure::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    n + 1
                )));
            }
            map.insert(key, v.trim().trim_matches('"').to_string());
        }
        Ok(Config(map))
    }

    /// The flag if given, else the config value.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => {
                let parsed = if matches!(key, "packets" | "samples" | "heavy_packets") {
                    parse_count(v)
                        .ok()
                        .and_then(|n| n.to_string().parse::<T>().ok())
                } else {
                    v.parse::<T>().ok()
                };
                parsed.map(Some).ok_or_else(|| {
                    Failure::Usage(format!("config value for `{key}` is invalid: `{v}`"))
                })
            }
        }
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required option --{flag}")))
}

struct Output {
    path: Option<PathBuf>,
    format: Format,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Failure::Domain(AoiError::Io(format!("cannot create {}: {e}", p.display())))
            })?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn rows<T: Table + Serialize>(&self, rows: &[T]) -> Result<(), Failure> {
        let mut w = self.writer()?;
        match self.format {
            Format::Csv => experiments::write_csv(rows, &mut w)?,
            Format::Json => experiments::write_json(rows, &mut w)?,
        }
        w.flush()?;
        Ok(())
    }

    /// A single record: a CSV row or a bare JSON object.
    fn one<T: Table + Serialize>(&self, row: T) -> Result<(), Failure> {
        match self.format {
            Format::Csv => self.rows(&[row]),
            Format::Json => {
                let mut w = self.writer()?;
                serde_json::to_writer_pretty(&mut w, &row)
                    .map_err(|e| AoiError::Io(e.to_string()))?;
                w.write_all(b"\n")?;
                w.flush()?;
                Ok(())
            }
        }
    }
}

struct Resolved {
    cfg: Config,
    seed: u64,
    samples: u64,
    output: Output,
}

fn resolve_common(c: &Common) -> Result<Resolved, Failure> {
    let cfg = Config::load(c.config.as_deref())?;
    let seed = cfg.pick(c.seed, "seed")?.unwrap_or(1);
    let samples = cfg
        .pick(c.samples, "samples")?
        .unwrap_or(DEFAULT_GGINF_SAMPLES);
    let path = cfg.pick(c.out.clone(), "out")?;
    let format = cfg.pick(c.format, "format")?.unwrap_or_default();
    Ok(Resolved {
        cfg,
        seed,
        samples,
        output: Output { path, format },
    })
}

fn queue_spec(c: &Common, cfg: &Config) -> Result<QueueSpec, Failure> {
    let discipline: String = required(cfg.pick(c.discipline.clone(), "discipline")?, "discipline")?;
    let discipline =
        Discipline::from_str(&discipline).map_err(|e| Failure::Usage(e.to_string()))?;
    let arrival: String = required(cfg.pick(c.arrival.clone(), "arrival")?, "arrival")?;
    let service: String = required(cfg.pick(c.service.clone(), "service")?, "service")?;
    let lambda: f64 = required(cfg.pick(c.lambda, "lambda")?, "lambda")?;
    let mu: f64 = cfg.pick(c.mu, "mu")?.unwrap_or(1.0);
    let arrival = Distribution::parse(&arrival, lambda)?;
    let service = Distribution::parse(&service, mu)?;
    Ok(QueueSpec::new(discipline, arrival, service)?)
}

fn stop_rule(s: &SimArgs, cfg: &Config) -> Result<StopRule, Failure> {
    let horizon = cfg.pick(s.horizon, "horizon")?;
    let packets = cfg.pick(s.packets, "packets")?;
    match (horizon, packets) {
        (Some(_), Some(_)) if s.horizon.is_some() == s.packets.is_some() => Err(Failure::Usage(
            "give either --horizon or --packets, not both".into(),
        )),
        // A flag overrides the other stop rule taken from the config file.
        (Some(h), Some(_)) if s.horizon.is_some() => Ok(StopRule::Horizon(h)),
        (Some(_), Some(n)) => Ok(StopRule::Packets(n)),
        (Some(h), None) => Ok(StopRule::Horizon(h)),
        (None, Some(n)) => Ok(StopRule::Packets(n)),
        (None, None) => Ok(StopRule::Packets(1_000_000)),
    }
}

#[derive(Serialize)]
struct AnalyticRow {
    discipline: Discipline,
    arrival_spec: String,
    service_spec: String,
    lambda: f64,
    mu: f64,
    #[serde(flatten)]
    age: AnalyticAge,
}

impl Table for AnalyticRow {
    fn header() -> &'static [&'static str] {
        &[
            "discipline",
            "arrival_spec",
            "service_spec",
            "lambda",
            "mu",
            "peak",
            "average",
            "method",
            "error_estimate",
            "budget_exhausted",
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
            opt(self.age.peak),
            opt(self.age.average),
            self.age.method.as_str().into(),
            format_float(self.age.error_estimate),
            self.age.budget_exhausted.to_string(),
        ]
    }
}

#[derive(Serialize)]
struct SimRow {
    discipline: Discipline,
    arrival_spec: String,
    service_spec: String,
    lambda: f64,
    mu: f64,
    #[serde(flatten)]
    result: SimResult,
}

impl Table for SimRow {
    fn header() -> &'static [&'static str] {
        &[
            "discipline",
            "arrival_spec",
            "service_spec",
            "lambda",
            "mu",
            "average_age",
            "peak_age",
            "delay_mean",
            "delay_variance",
            "informative_fraction",
            "preemption_count",
            "ci_halfwidth_average",
            "ci_halfwidth_peak",
            "seed",
            "replications",
            "departures",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let r = &self.result;
        vec![
            self.discipline.to_string(),
            self.arrival_spec.clone(),
            self.service_spec.clone(),
            format_float(self.lambda),
            format_float(self.mu),
            format_float(r.average_age),
            format_float(r.peak_age),
            format_float(r.delay_mean),
            format_float(r.delay_variance),
            format_float(r.informative_fraction),
            r.preemption_count.to_string(),
            format_float(r.ci_halfwidth_average),
            format_float(r.ci_halfwidth_peak),
            r.seed.to_string(),
            r.replications.to_string(),
            r.departures.to_string(),
        ]
    }
}

fn grid(g: &GridArgs, cfg: &Config, start: f64, stop: f64, step: f64) -> Result<Vec<f64>, Failure> {
    let lo = cfg.pick(g.lambda_min, "lambda_min")?.unwrap_or(start);
    let hi = cfg.pick(g.lambda_max, "lambda_max")?.unwrap_or(stop);
    let st = cfg.pick(g.lambda_step, "lambda_step")?.unwrap_or(step);
    if !(lo > 0.0 && hi >= lo && st > 0.0) {
        return Err(Failure::Usage(format!(
            "bad λ grid: min {lo}, max {hi}, step {st}"
        )));
    }
    Ok(lambda_grid(lo, hi, st))
}

fn spot_list(g: &GridArgs, cfg: &Config, default: &[f64]) -> Result<Vec<f64>, Failure> {
    let Some(s) = cfg.pick(g.spot.clone(), "spot")? else {
        return Ok(default.to_vec());
    };
    if s.trim().eq_ignore_ascii_case("none") || s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad --spot value `{v}`")))
        })
        .collect()
}

fn packets_of(stop: StopRule) -> Result<u64, Failure> {
    match stop {
        StopRule::Packets(n) => Ok(n),
        StopRule::Horizon(_) => Err(Failure::Usage(
            "sweeps and validation take --packets, not --horizon".into(),
        )),
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analytic { common } => {
            let r = resolve_common(&common)?;
            let spec = queue_spec(&common, &r.cfg)?;
            let age = evaluate(&spec, r.samples, r.seed)?;
            r.output.one(AnalyticRow {
                discipline: spec.discipline,
                arrival_spec: spec.arrival.literal(),
                service_spec: spec.service.literal(),
                lambda: spec.lambda(),
                mu: spec.mu(),
                age,
            })
        }
        Command::Simulate { common, sim, trace } => {
            let r = resolve_common(&common)?;
            let spec = queue_spec(&common, &r.cfg)?;
            let config = SimConfig::new(spec, stop_rule(&sim, &r.cfg)?)
                .seed(r.seed)
                .replications(r.cfg.pick(sim.replications, "replications")?.unwrap_or(1))
                .warmup(r.cfg.pick(sim.warmup, "warmup")?.unwrap_or(DEFAULT_WARMUP));
            if let Some(n) = r.cfg.pick(trace, "trace")? {
                let records = simulator::trace(&config, n)?;
                let mut w = r.output.writer()?;
                simulator::write_trace(&records, &mut w)?;
                w.flush()?;
                return Ok(());
            }
            let result = simulator::run(&config)?;
            r.output.one(SimRow {
                discipline: spec.discipline,
                arrival_spec: spec.arrival.literal(),
                service_spec: spec.service.literal(),
                lambda: spec.lambda(),
                mu: spec.mu(),
                result,
            })
        }
        Command::Sweep {
            which,
            common,
            sim,
            grid: g,
        } => {
            let r = resolve_common(&common)?;
            let cfg = &r.cfg;
            let mu = cfg.pick(common.mu, "mu")?.unwrap_or(1.0);
            let defaults = SweepOptions::default();
            let replications = cfg.pick(sim.replications, "replications")?;
            let warmup = cfg.pick(sim.warmup, "warmup")?.unwrap_or(DEFAULT_WARMUP);
            let packets = match cfg.pick(sim.packets, "packets")? {
                Some(n) => n,
                None if cfg.pick(sim.horizon, "horizon")?.is_some() => {
                    packets_of(StopRule::Horizon(0.0))?
                }
                None => defaults.packets,
            };
            if which == SweepKind::AgeVsDelay {
                let opts = AgeDelayOptions {
                    lambda: cfg.pick(common.lambda, "lambda")?.unwrap_or(0.5),
                    mu,
                    seed: r.seed,
                    samples: r.samples,
                    packets: cfg.pick(sim.packets, "packets")?.unwrap_or(0),
                    replications: replications.unwrap_or(1),
                };
                let rows = age_vs_delay(&opts)?;
                r.output.rows(&rows)?;
                return if inversion_holds(&rows) {
                    Ok(())
                } else {
                    Err(Failure::Checks(
                        "deterministic service is not both delay-best and age-worst".into(),
                    ))
                };
            }
            let opts = SweepOptions {
                lambdas: grid(&g, cfg, 0.5, 0.99, 0.01)?,
                mu,
                seed: r.seed,
                samples: r.samples,
                spot: spot_list(&g, cfg, &defaults.spot)?,
                packets,
                heavy_packets: cfg
                    .pick(g.heavy_packets, "heavy_packets")?
                    .unwrap_or(defaults.heavy_packets),
                replications: replications.unwrap_or(defaults.replications),
                warmup,
            };
            let rows = match which {
                SweepKind::Figure3 => experiments::figure3(&opts)?,
                SweepKind::Figure4 => experiments::figure4(&opts)?,
                _ => experiments::figure6(&opts)?,
            };
            r.output.rows(&rows)
        }
        Command::Validate {
            common,
            sim,
            grid: g,
        } => {
            let r = resolve_common(&common)?;
            let cfg = &r.cfg;
            let defaults = SuiteOptions::default();
            let opts = SuiteOptions {
                lambdas: grid(&g, cfg, 0.1, 0.9, 0.1)?,
                mu: cfg.pick(common.mu, "mu")?.unwrap_or(1.0),
                seed: r.seed,
                samples: r.samples,
                packets: cfg
                    .pick(sim.packets, "packets")?
                    .unwrap_or(defaults.packets),
                replications: cfg
                    .pick(sim.replications, "replications")?
                    .unwrap_or(defaults.replications),
            };
            let mut rows: Vec<CheckRow> = theorem_suite(&opts);
            rows.extend(simulation_checks(&opts));
            r.output.rows(&rows)?;
            let failed = rows.iter().filter(|c| !c.pass).count();
            eprintln!("validate: {} checks, {failed} failed", rows.len());
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Checks(format!("{failed} check(s) failed")))
            }
        }
    }
}

/// Usage line of the subcommand named in `args`, or of the whole tool.
fn usage(args: &[OsString]) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = args
        .iter()
        .skip(1)
        .filter_map(|a| a.to_str())
        .find_map(|a| cmd.find_subcommand(a).map(|c| c.get_name().to_string()));
    match sub.and_then(|name| cmd.find_subcommand_mut(&name).map(|c| c.render_usage())) {
        Some(u) => u.to_string(),
        None => cmd.render_usage().to_string(),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return 0;
            }
            let text = e.render().to_string();
            if text.contains("Usage:") {
                eprint!("{text}");
            } else {
                let hint = "For more information, try '--help'.";
                let body = text.trim_end().trim_end_matches(hint).trim_end();
                eprintln!("{body}\n\n{}\n{hint}", usage(&args));
            }
            return 2;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", usage(&args));
            eprintln!("For more information, try '--help'.");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Checks(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
