//! Preemptive last-come-first-serve single-server queues.
//!
//! A new packet always takes the server; packet i completes only if its
//! service S_i finishes before the next generation, i.e. S_i < X_i. All ages
//! reduce to three cross-expectations of the independent pair (X, S).

use crate::analytic::{
    check_rate, finite_second_moment, AnalyticAge, Discipline, Method, QueueSpec,
};
use crate::distributions::Distribution;
use crate::error::{AoiError, Result};

/// Served-probability threshold below which the age is treated as infinite.
const DEGENERATE_P: f64 = 1e-12;

/// Cross-expectations of independent X (inter-generation) and S (service).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerms {
    /// P(S < X)
    pub p_served: f64,
    /// E[S·1{S < X}]
    pub served_mean: f64,
    /// E[min(X, S)]
    pub min_mean: f64,
}

/// Computes [`CrossTerms`]. With `shortcuts`, exponential X or S use
/// transform identities; otherwise the pair is integrated over the service
/// law against the arrival survival function (or evaluated directly when
/// one side is a point mass).
pub fn lcfsp_cross_terms(
    arrival: &Distribution,
    service: &Distribution,
    shortcuts: bool,
) -> Result<(CrossTerms, Method)> {
    if arrival.is_deterministic() && service.is_deterministic() {
        return Err(AoiError::InvalidParameter(
            "preemptive LCFS needs a continuous inter-generation or service law".into(),
        ));
    }
    let closed = |d: &Distribution| d.is_deterministic() || d.is_exponential();

    if shortcuts && arrival.is_exponential() {
        let lambda = arrival.rate();
        let m = service.laplace(lambda)?;
        let terms = CrossTerms {
            p_served: m,
            served_mean: -service.laplace_derivative(lambda)?,
            min_mean: service.laplace_complement(lambda)? / lambda,
        };
        let method = if closed(service) {
            Method::ClosedForm
        } else {
            Method::Quadrature
        };
        return Ok((terms, method));
    }
    if shortcuts && service.is_exponential() {
        let mu = service.rate();
        let comp = arrival.laplace_complement(mu)?;
        let terms = CrossTerms {
            p_served: comp,
            served_mean: comp / mu + arrival.laplace_derivative(mu)?,
            min_mean: comp / mu,
        };
        let method = if closed(arrival) {
            Method::ClosedForm
        } else {
            Method::Quadrature
        };
        return Ok((terms, method));
    }
    if arrival.is_deterministic() {
        let x0 = arrival.mean();
        let terms = CrossTerms {
            p_served: service.cdf(x0),
            served_mean: service.truncated_mean(x0)?,
            min_mean: service.min_mean(x0)?,
        };
        return Ok((terms, Method::ClosedForm));
    }
    if service.is_deterministic() {
        let s0 = service.mean();
        let p = arrival.tail(s0);
        let terms = CrossTerms {
            p_served: p,
            served_mean: s0 * p,
            min_mean: arrival.min_mean(s0)?,
        };
        return Ok((terms, Method::ClosedForm));
    }

    let terms = CrossTerms {
        p_served: service.expect(|s| arrival.tail(s), 0.0)?,
        served_mean: service.expect(|s| s * arrival.tail(s), 1.0)?,
        min_mean: service.expect(|s| arrival.min_mean(s).unwrap_or(f64::NAN), 1.0)?,
    };
    if !terms.min_mean.is_finite() {
        return Err(AoiError::Quadrature {
            achieved: f64::INFINITY,
            requested: 1e-11,
        });
    }
    Ok((terms, Method::Quadrature))
}

fn ages_from_terms(arrival: &Distribution, terms: &CrossTerms) -> Result<(f64, f64)> {
    if terms.p_served < DEGENERATE_P {
        return Err(AoiError::Degenerate(terms.p_served));
    }
    let m1 = arrival.mean();
    let m2 = finite_second_moment(arrival, "inter-generation")?;
    let peak = (m1 + terms.served_mean) / terms.p_served;
    let average = 0.5 * m2 / m1 + terms.min_mean / terms.p_served;
    Ok((peak, average))
}

/// LCFSp G/G/1 peak (E[X] + E[S·1{S<X}])/P(S<X) and average
/// ½E[X²]/E[X] + E[min(X,S)]/P(S<X).
pub fn lcfsp_gg1(spec: &QueueSpec) -> Result<AnalyticAge> {
    if spec.discipline != Discipline::LcfsPreemptive {
        return Err(AoiError::InvalidParameter(format!(
            "lcfsp_gg1 needs the lcfsp discipline, got {}",
            spec.discipline
        )));
    }
    let (terms, method) = lcfsp_cross_terms(&spec.arrival, &spec.service, true)?;
    let (peak, average) = ages_from_terms(&spec.arrival, &terms)?;
    Ok(AnalyticAge {
        peak: Some(peak),
        average: Some(average),
        method,
        error_estimate: if method == Method::ClosedForm {
            0.0
        } else {
            1e-9 * average
        },
        budget_exhausted: false,
    })
}

/// LCFSp M/G/1: average 1/(λM) and peak 1/(λM) + E[S e^{−λS}]/M with
/// M = E[e^{−λS}] = P(S < X).
pub fn lcfsp_mg1(lambda: f64, service: &Distribution) -> Result<AnalyticAge> {
    check_rate("λ", lambda)?;
    let m = service.laplace(lambda)?;
    if m < DEGENERATE_P {
        return Err(AoiError::Degenerate(m));
    }
    let served_mean = -service.laplace_derivative(lambda)?;
    let average = 1.0 / (lambda * m);
    let peak = average + served_mean / m;
    Ok(if service.is_deterministic() || service.is_exponential() {
        AnalyticAge::exact(Some(peak), Some(average))
    } else {
        AnalyticAge::numeric(Some(peak), Some(average), 1e-9 * peak)
    })
}

/// LCFSp G/M/1: average ½E[X²]/E[X] + 1/μ and peak
/// 1/μ + E[X(1 − e^{−μX})]/E[1 − e^{−μX}].
pub fn lcfsp_gm1(arrival: &Distribution, mu: f64) -> Result<AnalyticAge> {
    check_rate("μ", mu)?;
    let m1 = arrival.mean();
    let m2 = finite_second_moment(arrival, "inter-generation")?;
    let comp = arrival.laplace_complement(mu)?;
    if comp < DEGENERATE_P {
        return Err(AoiError::Degenerate(comp));
    }
    // E[X(1 − e^{−μX})] = E[X] + d/ds E[e^{−sX}] at s = μ
    let weighted = m1 + arrival.laplace_derivative(mu)?;
    let peak = 1.0 / mu + weighted / comp;
    let average = 0.5 * m2 / m1 + 1.0 / mu;
    Ok(if arrival.is_deterministic() || arrival.is_exponential() {
        AnalyticAge::exact(Some(peak), Some(average))
    } else {
        AnalyticAge::numeric(Some(peak), Some(average), 1e-9 * peak)
    })
}

/// Mean packet delay (λ/2)·E[S²]/(1−ρ) + E[S]; infinite when E[S²] is.
pub fn delay_lcfsp_mg1(lambda: f64, service: &Distribution) -> Result<f64> {
    check_rate("λ", lambda)?;
    let mu = service.rate();
    let rho = lambda / mu;
    if rho >= 1.0 {
        return Err(AoiError::Unstable {
            lambda,
            mu,
            rho,
            limit: 1.0,
        });
    }
    let m2 = service.second_moment();
    if !m2.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(0.5 * lambda * m2 / (1.0 - rho) + service.mean())
}
