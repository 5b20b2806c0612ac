use std::ffi::{CStr, CString};
use std::ptr;

use aoi_lab_ffi::*;

fn new(lit: &str, rate: f64) -> *mut AoiDistribution {
    let c = CString::new(lit).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { aoi_distribution_new(c.as_ptr(), rate, &mut out) },
        AoiStatus::Ok
    );
    out
}

fn last_error() -> String {
    let p = aoi_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn distribution_queries() {
    let d = new("pareto:1.5", 2.0);
    let mut x = 0.0;
    unsafe {
        assert_eq!(aoi_distribution_mean(d, &mut x), AoiStatus::Ok);
        assert!((x - 0.5).abs() < 1e-12);
        assert_eq!(aoi_distribution_second_moment(d, &mut x), AoiStatus::Ok);
        assert!(x.is_infinite());
        assert_eq!(aoi_distribution_laplace(d, 0.0, &mut x), AoiStatus::Ok);
        assert!((x - 1.0).abs() < 1e-12);
        assert_eq!(
            aoi_distribution_laplace_derivative(d, 0.0, &mut x),
            AoiStatus::Ok
        );
        assert!((x + 0.5).abs() < 1e-8);
        assert_eq!(aoi_distribution_tail(d, 0.0, &mut x), AoiStatus::Ok);
        assert_eq!(x, 1.0);
        assert_eq!(
            aoi_distribution_truncated_mean(d, 1e300, &mut x),
            AoiStatus::Ok
        );
        assert!((x - 0.5).abs() < 1e-8);
        aoi_distribution_free(d);
    }
}

#[test]
fn analytic_values_and_codes() {
    let m = new("exp", 1.0);
    let s = new("exp", 1.0);
    let mut r = unsafe { std::mem::zeroed::<AoiAnalyticResult>() };
    unsafe {
        assert_eq!(
            aoi_analytic(AoiDiscipline::LcfsPreemptive, m, s, 0, 1, &mut r),
            AoiStatus::Ok
        );
        assert!(r.has_peak && r.has_average);
        assert!((r.average - 2.0).abs() < 1e-12);
        assert!((r.peak - 2.5).abs() < 1e-12);
        assert_eq!(
            aoi_analytic(AoiDiscipline::Fcfs, m, s, 0, 1, &mut r),
            AoiStatus::Unstable
        );
        assert!(last_error().contains("unstable"));
    }
    let p = new("pareto:1.5", 1.0);
    let h = new("exp", 0.5);
    unsafe {
        assert_eq!(
            aoi_analytic(AoiDiscipline::Fcfs, h, p, 0, 1, &mut r),
            AoiStatus::InfiniteMoment
        );
        assert_eq!(
            aoi_analytic(AoiDiscipline::InfiniteServer, h, s, 20_000, 3, &mut r),
            AoiStatus::Ok
        );
        assert_eq!(r.method, AoiMethod::MonteCarlo);
        assert!(!r.has_peak && r.peak.is_nan());
        for d in [m, s, p, h] {
            aoi_distribution_free(d);
        }
    }
}

#[test]
fn simulate_matches_core() {
    let m = new("exp", 0.5);
    let s = new("det", 1.0);
    let mut cfg = aoi_sim_config_default();
    cfg.discipline = AoiDiscipline::LcfsPreemptive;
    cfg.packets = 50_000;
    cfg.seed = 11;
    cfg.replications = 2;
    let mut r = unsafe { std::mem::zeroed::<AoiSimResult>() };
    assert_eq!(unsafe { aoi_simulate(m, s, &cfg, &mut r) }, AoiStatus::Ok);

    let spec = aoi_lab::QueueSpec::new(
        aoi_lab::Discipline::LcfsPreemptive,
        aoi_lab::Distribution::exponential(0.5).unwrap(),
        aoi_lab::Distribution::deterministic(1.0).unwrap(),
    )
    .unwrap();
    let core = aoi_lab::simulator::run(
        &aoi_lab::SimConfig::new(spec, aoi_lab::StopRule::Packets(50_000))
            .seed(11)
            .replications(2),
    )
    .unwrap();
    assert_eq!(r.average_age, core.average_age);
    assert_eq!(r.peak_age, core.peak_age);
    assert_eq!(r.departures, core.departures);

    cfg.stop_kind = AoiStopKind::Horizon;
    cfg.horizon = -1.0;
    assert_eq!(
        unsafe { aoi_simulate(m, s, &cfg, &mut r) },
        AoiStatus::Config
    );
    unsafe {
        aoi_distribution_free(m);
        aoi_distribution_free(s);
    }
}

#[test]
fn bad_input_is_reported_not_crashed() {
    let mut out = ptr::null_mut();
    let lit = CString::new("weibull:-1").unwrap();
    unsafe {
        assert_eq!(
            aoi_distribution_new(lit.as_ptr(), 1.0, &mut out),
            AoiStatus::InvalidArgument
        );
        assert!(out.is_null());
        assert_eq!(
            aoi_distribution_new(ptr::null(), 1.0, &mut out),
            AoiStatus::NullPointer
        );
        let lit = CString::new("exp").unwrap();
        assert_eq!(
            aoi_distribution_new(lit.as_ptr(), 1.0, ptr::null_mut()),
            AoiStatus::NullPointer
        );
        let mut x = 0.0;
        assert_eq!(
            aoi_distribution_mean(ptr::null(), &mut x),
            AoiStatus::NullPointer
        );
        assert!(last_error().contains("null"));
        aoi_distribution_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_per_thread() {
    let mut out = ptr::null_mut();
    let lit = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { aoi_distribution_new(lit.as_ptr(), 1.0, &mut out) },
        AoiStatus::ParseError
    );
    let other = std::thread::spawn(|| aoi_last_error().is_null())
        .join()
        .unwrap();
    assert!(other);
    assert!(last_error().contains("nope"));
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(aoi_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
