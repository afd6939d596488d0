use std::ffi::{CStr, CString};
use std::ptr;

use screenest_ffi::*;

const EXAMPLE1: &str = r#"{
    "curve": {"kind": "quadratic", "a": 0.16666666666666666, "y_max": 2.0},
    "cost": {"kind": "half-squared-norm"},
    "density": {"kind": "uniform"},
    "grid": {"mode": "equal-chord", "n": 28, "chord": 0.03571428571428571}
}"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(screenest_last_error()) }.to_string_lossy().into_owned()
}

fn instance(json: &str) -> Result<*mut ScreenestInstance, ScreenestStatus> {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { screenest_instance_from_json(c.as_ptr(), &mut out) } {
        ScreenestStatus::Ok => Ok(out),
        s => Err(s),
    }
}

#[test]
fn solve_and_read_back() {
    let inst = instance(EXAMPLE1).unwrap();
    let mut summary = ScreenestCheckSummary::default();
    assert_eq!(unsafe { screenest_check(inst, &mut summary) }, ScreenestStatus::Ok);
    assert_eq!(summary.premium, 1);
    assert_eq!(summary.market_size, 28);

    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { screenest_solve(inst, ScreenestMethod::Auto, &mut sol) }, ScreenestStatus::Ok);
    let m = unsafe { screenest_solution_market_size(sol) };
    assert_eq!(m, 28);
    assert_eq!(unsafe { screenest_solution_is_nested(sol) }, 1);
    assert!(unsafe { screenest_solution_profit(sol) } > 0.0);

    let mut ts = vec![0.0; m];
    let mut n = 0;
    let s = unsafe { screenest_solution_breakpoints(sol, ts.as_mut_ptr(), ts.len(), &mut n) };
    assert_eq!(s, ScreenestStatus::Ok);
    assert_eq!(n, m);
    assert!(ts.windows(2).all(|w| w[0] < w[1]));

    let mut masses = vec![0.0; m + 1];
    let s = unsafe { screenest_solution_masses(sol, masses.as_mut_ptr(), masses.len(), ptr::null_mut()) };
    assert_eq!(s, ScreenestStatus::Ok);
    assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    let mut d = f64::NAN;
    assert_eq!(unsafe { screenest_dprofit_dti(inst, 3, ts[3], &mut d) }, ScreenestStatus::Ok);
    assert!(d.abs() < 1e-8, "{d}");

    unsafe {
        screenest_solution_free(sol);
        screenest_instance_free(inst);
    }
}

#[test]
fn short_buffer_reports_length() {
    let inst = instance(EXAMPLE1).unwrap();
    let mut sol = ptr::null_mut();
    unsafe { screenest_solve(inst, ScreenestMethod::Closed, &mut sol) };
    let mut buf = [0.0; 4];
    let mut n = 0;
    let s = unsafe { screenest_solution_prices(sol, buf.as_mut_ptr(), buf.len(), &mut n) };
    assert_eq!(s, ScreenestStatus::BufferTooSmall);
    assert_eq!(n, 29);
    assert!(last_error().contains("29"));
    unsafe {
        screenest_solution_free(sol);
        screenest_instance_free(inst);
    }
}

#[test]
fn errors_map_to_codes() {
    assert_eq!(instance("{ not json").unwrap_err(), ScreenestStatus::Config);
    assert!(!last_error().is_empty());

    let gaussian = EXAMPLE1.replace(
        r#"{"kind": "uniform"}"#,
        r#"{"kind": "gaussian", "mean": [0.5, 0.5], "sigma": 0.25}"#,
    );
    let inst = instance(&gaussian).unwrap();
    let mut sol = ptr::null_mut();
    let s = unsafe { screenest_solve(inst, ScreenestMethod::Closed, &mut sol) };
    assert_eq!(s, ScreenestStatus::WrongMethod);
    assert!(sol.is_null());

    let mut d = 0.0;
    assert_eq!(unsafe { screenest_dprofit_dti(inst, 99, 0.5, &mut d) }, ScreenestStatus::OutOfRange);
    assert_eq!(unsafe { screenest_solve(ptr::null(), ScreenestMethod::Auto, &mut sol) }, ScreenestStatus::NullPointer);
    unsafe { screenest_instance_free(inst) };
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        screenest_instance_free(ptr::null_mut());
        screenest_solution_free(ptr::null_mut());
        assert_eq!(screenest_solution_market_size(ptr::null()), 0);
        assert!(screenest_solution_profit(ptr::null()).is_nan());
    }
    let v = unsafe { CStr::from_ptr(screenest_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/screenest.h")).unwrap();
    for name in [
        "screenest_instance_from_json",
        "screenest_instance_free",
        "screenest_check",
        "screenest_solve",
        "screenest_solution_free",
        "screenest_solution_breakpoints",
        "screenest_solution_prices",
        "screenest_solution_masses",
        "screenest_solution_profit",
        "screenest_solution_is_nested",
        "screenest_solution_market_size",
        "screenest_dprofit_dti",
        "screenest_last_error",
        "screenest_version",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name}");
    }
}
