//! C ABI for aoi-lab.
//!
//! Every fallible call returns an [`AoiStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and
//! can be read with [`aoi_last_error`]. Distributions are opaque handles
//! created by [`aoi_distribution_new`] and released by
//! [`aoi_distribution_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use aoi_lab::analytic::{self, Method};
use aoi_lab::simulator::{self, SimConfig, StopRule};
use aoi_lab::{AoiError, Discipline, Distribution, QueueSpec};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Unstable = 4,
    InfiniteMoment = 5,
    NumericalFailure = 6,
    Unsupported = 7,
    Config = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoiDiscipline {
    Fcfs = 0,
    LcfsPreemptive = 1,
    InfiniteServer = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoiMethod {
    ClosedForm = 0,
    Quadrature = 1,
    MonteCarlo = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoiStopKind {
    Packets = 0,
    Horizon = 1,
}

/// Opaque distribution handle.
pub struct AoiDistribution(Distribution);

/// Analytic ages. A missing value is NaN with its `has_` flag cleared.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoiAnalyticResult {
    pub peak: f64,
    pub average: f64,
    pub has_peak: bool,
    pub has_average: bool,
    pub method: AoiMethod,
    pub error_estimate: f64,
    pub budget_exhausted: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoiSimConfig {
    pub discipline: AoiDiscipline,
    pub stop_kind: AoiStopKind,
    /// Used when `stop_kind` is `Horizon`.
    pub horizon: f64,
    /// Used when `stop_kind` is `Packets`.
    pub packets: u64,
    pub warmup_fraction: f64,
    pub seed: u64,
    pub replications: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoiSimResult {
    pub average_age: f64,
    pub peak_age: f64,
    pub delay_mean: f64,
    pub delay_variance: f64,
    pub informative_fraction: f64,
    pub preemption_count: u64,
    pub ci_halfwidth_average: f64,
    pub ci_halfwidth_peak: f64,
    pub seed: u64,
    pub replications: u32,
    pub departures: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &AoiError) -> AoiStatus {
    match e {
        AoiError::InvalidParameter(_) | AoiError::Degenerate(_) => AoiStatus::InvalidArgument,
        AoiError::Parse(_) => AoiStatus::ParseError,
        AoiError::Unstable { .. } => AoiStatus::Unstable,
        AoiError::InfiniteMoment { .. } => AoiStatus::InfiniteMoment,
        AoiError::Quadrature { .. } | AoiError::Bracket { .. } => AoiStatus::NumericalFailure,
        AoiError::Unsupported(_) => AoiStatus::Unsupported,
        AoiError::Config(_) => AoiStatus::Config,
        AoiError::Io(_) => AoiStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Aoi(AoiError),
}

impl From<AoiError> for Fail {
    fn from(e: AoiError) -> Self {
        Fail::Aoi(e)
    }
}

/// Runs `f`, stores its value in `out` and turns errors and panics into
/// status codes.
fn guard<T, F>(out: *mut T, f: F) -> AoiStatus
where
    F: FnOnce() -> Result<T, Fail>,
{
    if out.is_null() {
        set_error("null output pointer".into());
        return AoiStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null above; the caller provides writable storage.
            unsafe { out.write(v) };
            AoiStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            AoiStatus::NullPointer
        }
        Ok(Err(Fail::Aoi(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            AoiStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or point to a live handle.
unsafe fn dist<'a>(
    p: *const AoiDistribution,
    what: &'static str,
) -> Result<&'a Distribution, Fail> {
    // SAFETY: forwarded from the caller.
    unsafe { p.as_ref() }.map(|d| &d.0).ok_or(Fail::Null(what))
}

fn to_discipline(d: AoiDiscipline) -> Discipline {
    match d {
        AoiDiscipline::Fcfs => Discipline::Fcfs,
        AoiDiscipline::LcfsPreemptive => Discipline::LcfsPreemptive,
        AoiDiscipline::InfiniteServer => Discipline::InfiniteServer,
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn aoi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aoi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a literal such as `"pareto:1.5"` with mean `1/rate`.
///
/// # Safety
/// `literal` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_new(
    literal: *const c_char,
    rate: f64,
    out: *mut *mut AoiDistribution,
) -> AoiStatus {
    guard(out, || {
        if literal.is_null() {
            return Err(Fail::Null("literal"));
        }
        // SAFETY: non-null and NUL-terminated per the contract.
        let s = unsafe { CStr::from_ptr(literal) }
            .to_str()
            .map_err(|_| AoiError::Parse("<non-UTF-8>".into()))?;
        let d = Distribution::parse(s, rate)?;
        Ok(Box::into_raw(Box::new(AoiDistribution(d))))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `d` must come from [`aoi_distribution_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_free(d: *mut AoiDistribution) {
    if !d.is_null() {
        // SAFETY: created by Box::into_raw in aoi_distribution_new.
        drop(unsafe { Box::from_raw(d) });
    }
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_mean(
    d: *const AoiDistribution,
    out: *mut f64,
) -> AoiStatus {
    guard(out, || Ok(unsafe { dist(d, "distribution") }?.mean()))
}

/// Infinite when the second moment diverges.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_second_moment(
    d: *const AoiDistribution,
    out: *mut f64,
) -> AoiStatus {
    guard(out, || {
        Ok(unsafe { dist(d, "distribution") }?.second_moment())
    })
}

/// E[e^{−sX}] for `s ≥ 0`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_laplace(
    d: *const AoiDistribution,
    s: f64,
    out: *mut f64,
) -> AoiStatus {
    guard(out, || Ok(unsafe { dist(d, "distribution") }?.laplace(s)?))
}

/// d/ds E[e^{−sX}] = −E[X e^{−sX}].
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_laplace_derivative(
    d: *const AoiDistribution,
    s: f64,
    out: *mut f64,
) -> AoiStatus {
    guard(out, || {
        Ok(unsafe { dist(d, "distribution") }?.laplace_derivative(s)?)
    })
}

/// P(X > x).
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_tail(
    d: *const AoiDistribution,
    x: f64,
    out: *mut f64,
) -> AoiStatus {
    guard(out, || Ok(unsafe { dist(d, "distribution") }?.tail(x)))
}

/// E[X·1{X < x}].
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_distribution_truncated_mean(
    d: *const AoiDistribution,
    x: f64,
    out: *mut f64,
) -> AoiStatus {
    guard(out, || {
        Ok(unsafe { dist(d, "distribution") }?.truncated_mean(x)?)
    })
}

/// Analytic peak and average age. `samples` and `seed` drive the
/// infinite-server Monte Carlo and are ignored otherwise.
///
/// # Safety
/// `arrival` and `service` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_analytic(
    discipline: AoiDiscipline,
    arrival: *const AoiDistribution,
    service: *const AoiDistribution,
    samples: u64,
    seed: u64,
    out: *mut AoiAnalyticResult,
) -> AoiStatus {
    guard(out, || {
        let a = unsafe { dist(arrival, "arrival") }?;
        let s = unsafe { dist(service, "service") }?;
        let spec = QueueSpec::new(to_discipline(discipline), *a, *s)?;
        let r = analytic::evaluate(&spec, samples, seed)?;
        Ok(AoiAnalyticResult {
            peak: r.peak.unwrap_or(f64::NAN),
            average: r.average.unwrap_or(f64::NAN),
            has_peak: r.peak.is_some(),
            has_average: r.average.is_some(),
            method: match r.method {
                Method::ClosedForm => AoiMethod::ClosedForm,
                Method::Quadrature => AoiMethod::Quadrature,
                Method::MonteCarlo => AoiMethod::MonteCarlo,
            },
            error_estimate: r.error_estimate,
            budget_exhausted: r.budget_exhausted,
        })
    })
}

/// Defaults: FCFS, 10⁶ packets, warmup 0.1, seed 1, one replication.
#[no_mangle]
pub extern "C" fn aoi_sim_config_default() -> AoiSimConfig {
    AoiSimConfig {
        discipline: AoiDiscipline::Fcfs,
        stop_kind: AoiStopKind::Packets,
        horizon: 0.0,
        packets: 1_000_000,
        warmup_fraction: simulator::DEFAULT_WARMUP,
        seed: 1,
        replications: 1,
    }
}

/// Runs the simulator.
///
/// # Safety
/// `arrival`, `service` and `config` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aoi_simulate(
    arrival: *const AoiDistribution,
    service: *const AoiDistribution,
    config: *const AoiSimConfig,
    out: *mut AoiSimResult,
) -> AoiStatus {
    guard(out, || {
        let a = unsafe { dist(arrival, "arrival") }?;
        let s = unsafe { dist(service, "service") }?;
        // SAFETY: forwarded from the caller.
        let c = unsafe { config.as_ref() }.ok_or(Fail::Null("config"))?;
        let spec = QueueSpec::new(to_discipline(c.discipline), *a, *s)?;
        let stop = match c.stop_kind {
            AoiStopKind::Packets => StopRule::Packets(c.packets),
            AoiStopKind::Horizon => StopRule::Horizon(c.horizon),
        };
        let cfg = SimConfig::new(spec, stop)
            .seed(c.seed)
            .replications(c.replications)
            .warmup(c.warmup_fraction);
        let r = simulator::run(&cfg)?;
        Ok(AoiSimResult {
            average_age: r.average_age,
            peak_age: r.peak_age,
            delay_mean: r.delay_mean,
            delay_variance: r.delay_variance,
            informative_fraction: r.informative_fraction,
            preemption_count: r.preemption_count,
            ci_halfwidth_average: r.ci_halfwidth_average,
            ci_halfwidth_peak: r.ci_halfwidth_peak,
            seed: r.seed,
            replications: r.replications,
            departures: r.departures,
        })
    })
}
