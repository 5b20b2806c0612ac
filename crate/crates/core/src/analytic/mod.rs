//! Closed-form and semi-numeric peak/average age and delay calculators.

mod fcfs;
mod infinite;
mod lcfs;
pub mod roots;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::Distribution;
use crate::error::{AoiError, Result};

pub use fcfs::{
    delay_fcfs_mg1, fcfs_dd1, fcfs_gg1_bounds, fcfs_gm1, fcfs_mg1_average, fcfs_mg1_peak,
    solve_alpha_bar,
};
pub use infinite::{gginf_average, min_delivery_sample, DEFAULT_GGINF_SAMPLES};
pub use lcfs::{delay_lcfsp_mg1, lcfsp_cross_terms, lcfsp_gg1, lcfsp_gm1, lcfsp_mg1, CrossTerms};

/// FCFS formulas are evaluated up to this utilization.
pub const MAX_FCFS_UTILIZATION: f64 = 0.999;

/// Service discipline of the queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Discipline {
    #[serde(rename = "fcfs")]
    Fcfs,
    #[serde(rename = "lcfsp")]
    LcfsPreemptive,
    #[serde(rename = "inf")]
    InfiniteServer,
}

impl Discipline {
    pub fn as_str(&self) -> &'static str {
        match self {
            Discipline::Fcfs => "fcfs",
            Discipline::LcfsPreemptive => "lcfsp",
            Discipline::InfiniteServer => "inf",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Discipline {
    type Err = AoiError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fcfs" | "fifo" => Ok(Discipline::Fcfs),
            "lcfsp" | "lcfs" | "lcfs-preemptive" => Ok(Discipline::LcfsPreemptive),
            "inf" | "infinite" | "gginf" => Ok(Discipline::InfiniteServer),
            other => Err(AoiError::Config(format!(
                "unknown discipline `{other}` (expected fcfs, lcfsp or inf)"
            ))),
        }
    }
}

/// A queue: discipline, inter-generation law (rate λ) and service law (rate μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueueSpec {
    pub discipline: Discipline,
    pub arrival: Distribution,
    pub service: Distribution,
}

impl QueueSpec {
    /// Validates the discipline-specific preconditions.
    pub fn new(
        discipline: Discipline,
        arrival: Distribution,
        service: Distribution,
    ) -> Result<Self> {
        let spec = QueueSpec {
            discipline,
            arrival,
            service,
        };
        match discipline {
            Discipline::Fcfs => {
                check_stable(spec.lambda(), spec.mu())?;
            }
            Discipline::LcfsPreemptive => {
                if arrival.is_deterministic() && service.is_deterministic() {
                    return Err(AoiError::InvalidParameter(
                        "preemptive LCFS needs a continuous inter-generation or service law; \
                         det/det is not allowed"
                            .into(),
                    ));
                }
            }
            Discipline::InfiniteServer => {}
        }
        Ok(spec)
    }

    pub fn lambda(&self) -> f64 {
        self.arrival.rate()
    }

    pub fn mu(&self) -> f64 {
        self.service.rate()
    }

    pub fn utilization(&self) -> f64 {
        self.lambda() / self.mu()
    }
}

/// How an [`AnalyticAge`] value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Peak and/or average age with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticAge {
    pub peak: Option<f64>,
    pub average: Option<f64>,
    pub method: Method,
    /// Absolute error estimate; the standard error for Monte Carlo values.
    pub error_estimate: f64,
    /// Set when a Monte Carlo sample budget ran out before every sample
    /// resolved; the error estimate is widened accordingly.
    pub budget_exhausted: bool,
}

impl AnalyticAge {
    pub(crate) fn exact(peak: Option<f64>, average: Option<f64>) -> Self {
        AnalyticAge {
            peak,
            average,
            method: Method::ClosedForm,
            error_estimate: 0.0,
            budget_exhausted: false,
        }
    }

    pub(crate) fn numeric(peak: Option<f64>, average: Option<f64>, error: f64) -> Self {
        AnalyticAge {
            peak,
            average,
            method: Method::Quadrature,
            error_estimate: error,
            budget_exhausted: false,
        }
    }
}

pub(crate) fn check_stable(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda > 0.0 && mu > 0.0 && lambda.is_finite() && mu.is_finite()) {
        return Err(AoiError::InvalidParameter(format!(
            "rates must be positive, got λ = {lambda}, μ = {mu}"
        )));
    }
    let rho = lambda / mu;
    if rho > MAX_FCFS_UTILIZATION {
        return Err(AoiError::Unstable {
            lambda,
            mu,
            rho,
            limit: MAX_FCFS_UTILIZATION,
        });
    }
    Ok(())
}

pub(crate) fn check_rate(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(AoiError::InvalidParameter(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

pub(crate) fn finite_second_moment(d: &Distribution, which: &'static str) -> Result<f64> {
    let m2 = d.second_moment();
    if m2.is_finite() {
        Ok(m2)
    } else {
        Err(AoiError::InfiniteMoment {
            which,
            literal: d.literal(),
        })
    }
}

/// Evaluates the analytic ages for a queue, picking the formula that applies.
///
/// FCFS: D/D/1 exactly, exponential service through the G/M/1 fixed point,
/// Poisson arrivals through the M/G/1 formulas. Other FCFS pairs have no
/// closed form and are rejected. LCFSp: M/G/1, G/M/1 or the general
/// cross-expectation route. Infinite server: Monte Carlo (exact for
/// deterministic service) with `samples` draws seeded by `seed`.
pub fn evaluate(spec: &QueueSpec, samples: u64, seed: u64) -> Result<AnalyticAge> {
    let (lambda, mu) = (spec.lambda(), spec.mu());
    match spec.discipline {
        Discipline::Fcfs => {
            if spec.arrival.is_deterministic() && spec.service.is_deterministic() {
                fcfs_dd1(lambda, mu)
            } else if spec.service.is_exponential() {
                fcfs_gm1(&spec.arrival, mu)
            } else if spec.arrival.is_exponential() {
                let peak = fcfs_mg1_peak(lambda, &spec.service)?;
                let average = fcfs_mg1_average(lambda, &spec.service)?;
                let method = if spec.service.is_deterministic() {
                    Method::ClosedForm
                } else {
                    Method::Quadrature
                };
                Ok(AnalyticAge {
                    peak: Some(peak),
                    average: Some(average),
                    method,
                    error_estimate: 0.0,
                    budget_exhausted: false,
                })
            } else {
                let b = fcfs_gg1_bounds(lambda, mu)?;
                Err(AoiError::Unsupported(format!(
                    "FCFS ages have closed forms only for Poisson arrivals, exponential service \
                     or D/D/1; for {}/{} only the lower bounds peak ≥ {:.6} and average ≥ {:.6} hold",
                    spec.arrival.literal(),
                    spec.service.literal(),
                    b.peak.unwrap_or(f64::NAN),
                    b.average.unwrap_or(f64::NAN)
                )))
            }
        }
        Discipline::LcfsPreemptive => {
            if spec.arrival.is_exponential() {
                lcfsp_mg1(lambda, &spec.service)
            } else if spec.service.is_exponential() {
                lcfsp_gm1(&spec.arrival, mu)
            } else {
                lcfsp_gg1(spec)
            }
        }
        Discipline::InfiniteServer => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            gginf_average(spec, samples, &mut rng)
        }
    }
}
