//! First-come-first-serve single-server queues.

use crate::analytic::roots::bisect;
use crate::analytic::{check_stable, finite_second_moment, AnalyticAge, Method};
use crate::distributions::Distribution;
use crate::error::{AoiError, Result};

/// D/D/1: periodic generation every 1/λ, constant service 1/μ.
pub fn fcfs_dd1(lambda: f64, mu: f64) -> Result<AnalyticAge> {
    check_stable(lambda, mu)?;
    Ok(AnalyticAge::exact(
        Some(1.0 / lambda + 1.0 / mu),
        Some(0.5 / lambda + 1.0 / mu),
    ))
}

/// Universal FCFS G/G/1 lower bounds; they coincide with the D/D/1 values.
pub fn fcfs_gg1_bounds(lambda: f64, mu: f64) -> Result<AnalyticAge> {
    fcfs_dd1(lambda, mu)
}

/// Root ᾱ ∈ (0, μ) of α = μ − μ·E[e^{−αX}], the exponential rate of the
/// stationary G/M/1 system time.
pub fn solve_alpha_bar(arrival: &Distribution, mu: f64) -> Result<f64> {
    check_stable(arrival.rate(), mu)?;
    // h(α) = α − μ(1 − E[e^{−αX}]); negative just above 0, positive at μ.
    let h = |alpha: f64| -> Result<f64> { Ok(alpha - mu * arrival.laplace_complement(alpha)?) };
    let lo = 1e-12;
    let hi = mu - 1e-12;
    let root = bisect(h, lo, hi, 1e-13, 1e-14 * mu.max(1.0))?;
    if root.residual.abs() >= 1e-10 {
        return Err(AoiError::Quadrature {
            achieved: root.residual.abs(),
            requested: 1e-10,
        });
    }
    Ok(root.x)
}

/// FCFS G/M/1 peak 1/ᾱ + 1/λ and average λ[½E[X²] + E[X e^{−ᾱX}]/ᾱ] + 1/μ.
pub fn fcfs_gm1(arrival: &Distribution, mu: f64) -> Result<AnalyticAge> {
    let lambda = arrival.rate();
    let alpha = solve_alpha_bar(arrival, mu)?;
    let m2 = finite_second_moment(arrival, "inter-generation")?;
    let tilted_mean = -arrival.laplace_derivative(alpha)?;
    let peak = 1.0 / alpha + 1.0 / lambda;
    let average = lambda * (0.5 * m2 + tilted_mean / alpha) + 1.0 / mu;
    let method = if arrival.is_deterministic() || arrival.is_exponential() {
        Method::ClosedForm
    } else {
        Method::Quadrature
    };
    Ok(AnalyticAge {
        peak: Some(peak),
        average: Some(average),
        method,
        // A residual of 1e-10 on the fixed point moves 1/ᾱ by about that over ᾱ².
        error_estimate: 1e-10 / (alpha * alpha),
        budget_exhausted: false,
    })
}

/// FCFS M/G/1 peak age (1/μ)[1 + 1/ρ + (ρ/(1−ρ))·½·E[S²]/E[S]²].
pub fn fcfs_mg1_peak(lambda: f64, service: &Distribution) -> Result<f64> {
    let mu = service.rate();
    check_stable(lambda, mu)?;
    let m2 = finite_second_moment(service, "service")?;
    let rho = lambda / mu;
    let scv = m2 * mu * mu;
    Ok((1.0 + 1.0 / rho + rho / (1.0 - rho) * 0.5 * scv) / mu)
}

/// FCFS M/G/1 average age 1/μ + (1−ρ)/(λ·E[e^{−λS}]) + (λ/2)·E[S²]/(1−ρ).
pub fn fcfs_mg1_average(lambda: f64, service: &Distribution) -> Result<f64> {
    let mu = service.rate();
    check_stable(lambda, mu)?;
    let m2 = finite_second_moment(service, "service")?;
    let rho = lambda / mu;
    let transform = service.laplace(lambda)?;
    Ok(1.0 / mu + (1.0 - rho) / (lambda * transform) + 0.5 * lambda * m2 / (1.0 - rho))
}

/// Pollaczek–Khinchine mean system time E[T] = 1/μ + λE[S²]/(2(1−ρ)).
pub fn delay_fcfs_mg1(lambda: f64, service: &Distribution) -> Result<f64> {
    let mu = service.rate();
    check_stable(lambda, mu)?;
    let m2 = finite_second_moment(service, "service")?;
    Ok(1.0 / mu + lambda * m2 / (2.0 * (1.0 - lambda / mu)))
}
