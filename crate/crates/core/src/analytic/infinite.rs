//! Infinite-server queue: every packet gets its own server, so deliveries
//! can overtake each other.

use rand::Rng;

use crate::analytic::{finite_second_moment, AnalyticAge, Discipline, Method, QueueSpec};
use crate::distributions::Distribution;
use crate::error::{AoiError, Result};

pub const DEFAULT_GGINF_SAMPLES: u64 = 1_000_000;

/// Per-sample cap on the number of later packets examined.
const MAX_STEPS: u64 = 10_000_000;

/// One draw of D = min_{l≥0} {X_1 + … + X_l + S_{l+1}}, the time from a
/// generation until it or any later packet is delivered.
///
/// Packets are added while the accumulated inter-generation time is still
/// below the best delivery found; once it is not, no later packet can
/// improve the minimum since service times are non-negative. Returns the
/// value and whether the step cap cut the search short.
pub fn min_delivery_sample<R: Rng + ?Sized>(
    arrival: &Distribution,
    service: &Distribution,
    rng: &mut R,
    max_steps: u64,
) -> (f64, bool) {
    let mut best = service.sample(rng);
    let mut elapsed = 0.0;
    let mut steps = 0;
    loop {
        elapsed += arrival.sample(rng);
        if elapsed >= best {
            return (best, false);
        }
        steps += 1;
        if steps >= max_steps {
            return (best, true);
        }
        let candidate = elapsed + service.sample(rng);
        if candidate < best {
            best = candidate;
        }
    }
}

/// Average age ½E[X²]/E[X] + E[D] of the G/G/∞ queue.
///
/// Deterministic service makes D = S exactly. Otherwise E[D] is estimated
/// from `samples` independent draws and `error_estimate` is the standard
/// error.
pub fn gginf_average<R: Rng + ?Sized>(
    spec: &QueueSpec,
    samples: u64,
    rng: &mut R,
) -> Result<AnalyticAge> {
    if spec.discipline != Discipline::InfiniteServer {
        return Err(AoiError::InvalidParameter(format!(
            "gginf_average needs the inf discipline, got {}",
            spec.discipline
        )));
    }
    let arrival = &spec.arrival;
    let service = &spec.service;
    let m2 = finite_second_moment(arrival, "inter-generation")?;
    let base = 0.5 * m2 / arrival.mean();

    if service.is_deterministic() {
        return Ok(AnalyticAge::exact(None, Some(base + service.mean())));
    }
    if samples < 2 {
        return Err(AoiError::InvalidParameter(format!(
            "Monte Carlo needs at least 2 samples, got {samples}"
        )));
    }

    let mut mean = 0.0;
    let mut m2_acc = 0.0;
    let mut exhausted = 0u64;
    for k in 0..samples {
        let (v, cut) = min_delivery_sample(arrival, service, rng, MAX_STEPS);
        if cut {
            exhausted += 1;
        }
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2_acc += delta * (v - mean);
    }
    let n = samples as f64;
    let mut stderr = (m2_acc / (n - 1.0)).sqrt() / n.sqrt();
    if exhausted > 0 {
        // Truncated draws overstate D by at most E[S] each.
        stderr += exhausted as f64 / n * service.mean();
    }
    Ok(AnalyticAge {
        peak: None,
        average: Some(base + mean),
        method: Method::MonteCarlo,
        error_estimate: stderr,
        budget_exhausted: exhausted > 0,
    })
}
