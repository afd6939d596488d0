//! C interface to the screening solver.
//!
//! Instances and solutions are opaque handles created from a JSON
//! configuration. Every call returns a [`ScreenestStatus`]; on failure the
//! message is available from [`screenest_last_error`] until the next call on
//! the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use screenest::config::{MethodSpec, RunConfig};
use screenest::model::{check_h1, check_h2, check_h3, check_premium, market_size};
use screenest::solver::{dprofit_dti, solve_numeric, solve_uniform, NumericOptions};
use screenest::{Error, ScreeningInstance, SolutionBundle};

/// Opaque problem instance.
pub struct ScreenestInstance(ScreeningInstance);

/// Opaque solution bundle.
pub struct ScreenestSolution(SolutionBundle);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenestStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidModel = 4,
    NoPremium = 5,
    WrongMethod = 6,
    Solve = 7,
    BufferTooSmall = 8,
    OutOfRange = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenestMethod {
    Auto = 0,
    Closed = 1,
    Numeric = 2,
}

/// Hypothesis verdicts (1 = pass, 0 = fail) and the market size.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ScreenestCheckSummary {
    pub premium: i32,
    pub h1: i32,
    pub h2: i32,
    pub h3: i32,
    pub market_size: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ScreenestStatus {
    match e {
        Error::Config(_) | Error::Expression { .. } => ScreenestStatus::Config,
        Error::NoPremium => ScreenestStatus::NoPremium,
        Error::WrongMethod(_) => ScreenestStatus::WrongMethod,
        Error::CurveTooShort { .. }
        | Error::NonConvex(_)
        | Error::InvalidGrid(_)
        | Error::InvalidModel(_)
        | Error::NonMonotoneExclusion { .. } => ScreenestStatus::InvalidModel,
        _ => ScreenestStatus::Solve,
    }
}

fn guard<F: FnOnce() -> Result<(), ScreenestStatus>>(f: F) -> ScreenestStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScreenestStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            ScreenestStatus::Panic
        }
    }
}

fn fail(e: Error) -> ScreenestStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> ScreenestStatus {
    set_error("null pointer argument".into());
    ScreenestStatus::NullPointer
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn screenest_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn screenest_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an instance from a JSON configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn screenest_instance_from_json(
    json: *const c_char,
    out: *mut *mut ScreenestInstance,
) -> ScreenestStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        // SAFETY: checked non-null; caller guarantees NUL termination.
        let text = unsafe { CStr::from_ptr(json) }.to_str().map_err(|_| {
            set_error("configuration is not valid UTF-8".into());
            ScreenestStatus::InvalidUtf8
        })?;
        let cfg: RunConfig = text.parse().map_err(fail)?;
        let inst = cfg.instance().map_err(fail)?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(ScreenestInstance(inst))) };
        Ok(())
    })
}

/// # Safety
/// `inst` must come from [`screenest_instance_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn screenest_instance_free(inst: *mut ScreenestInstance) {
    if !inst.is_null() {
        // SAFETY: pointer was produced by Box::into_raw.
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// # Safety
/// `inst` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn screenest_check(
    inst: *const ScreenestInstance,
    out: *mut ScreenestCheckSummary,
) -> ScreenestStatus {
    guard(|| {
        // SAFETY: null-checked below.
        let (Some(inst), false) = (unsafe { inst.as_ref() }, out.is_null()) else {
            return Err(null());
        };
        let i = &inst.0;
        let flag = |b: bool| i32::from(b);
        let interior = i.grid.n() >= 2;
        let summary = ScreenestCheckSummary {
            premium: flag(check_premium(i)),
            h1: flag(interior && check_h1(i).pass),
            h2: flag(interior && check_h2(i).is_ok_and(|r| r.pass)),
            h3: flag(interior && check_h3(i).is_ok_and(|r| r.pass)),
            market_size: market_size(i).map_err(fail)?,
        };
        // SAFETY: checked non-null.
        unsafe { *out = summary };
        Ok(())
    })
}

/// Solves the instance. Non-nested candidates are returned as solutions with
/// `screenest_solution_is_nested` equal to 0.
///
/// # Safety
/// `inst` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn screenest_solve(
    inst: *const ScreenestInstance,
    method: ScreenestMethod,
    out: *mut *mut ScreenestSolution,
) -> ScreenestStatus {
    guard(|| {
        // SAFETY: null-checked below.
        let (Some(inst), false) = (unsafe { inst.as_ref() }, out.is_null()) else {
            return Err(null());
        };
        let i = &inst.0;
        let method = match method {
            ScreenestMethod::Auto => MethodSpec::Auto,
            ScreenestMethod::Closed => MethodSpec::Closed,
            ScreenestMethod::Numeric => MethodSpec::Numeric,
        };
        let bundle = match method {
            MethodSpec::Closed => solve_uniform(i),
            MethodSpec::Numeric => solve_numeric(i, &NumericOptions::default()),
            MethodSpec::Auto if i.density.is_uniform() => solve_uniform(i),
            MethodSpec::Auto => solve_numeric(i, &NumericOptions::default()),
        }
        .map_err(fail)?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(ScreenestSolution(bundle))) };
        Ok(())
    })
}

/// # Safety
/// `sol` must come from [`screenest_solve`] or be null.
#[no_mangle]
pub unsafe extern "C" fn screenest_solution_free(sol: *mut ScreenestSolution) {
    if !sol.is_null() {
        // SAFETY: pointer was produced by Box::into_raw.
        drop(unsafe { Box::from_raw(sol) });
    }
}

/// Market size `M`, or 0 for a null handle.
///
/// # Safety
/// `sol` must be a valid solution handle or null.
#[no_mangle]
pub unsafe extern "C" fn screenest_solution_market_size(sol: *const ScreenestSolution) -> usize {
    // SAFETY: as_ref handles null.
    unsafe { sol.as_ref() }.map_or(0, |s| s.0.breakpoints.m())
}

/// Profit, or NaN for a null handle.
///
/// # Safety
/// `sol` must be a valid solution handle or null.
#[no_mangle]
pub unsafe extern "C" fn screenest_solution_profit(sol: *const ScreenestSolution) -> f64 {
    // SAFETY: as_ref handles null.
    unsafe { sol.as_ref() }.map_or(f64::NAN, |s| s.0.profit)
}

/// 1 when the solution passed validation, 0 otherwise (or for null).
///
/// # Safety
/// `sol` must be a valid solution handle or null.
#[no_mangle]
pub unsafe extern "C" fn screenest_solution_is_nested(sol: *const ScreenestSolution) -> i32 {
    // SAFETY: as_ref handles null.
    unsafe { sol.as_ref() }.map_or(0, |s| i32::from(s.0.is_nested()))
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize, written: *mut usize) -> Result<(), ScreenestStatus> {
    if !written.is_null() {
        // SAFETY: checked non-null.
        unsafe { *written = values.len() };
    }
    if len < values.len() {
        set_error(format!("buffer holds {len} values, {} needed", values.len()));
        return Err(ScreenestStatus::BufferTooSmall);
    }
    if values.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null());
    }
    // SAFETY: caller guarantees `buf` has room for `len >= values.len()` values.
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
    Ok(())
}

unsafe fn read_solution(
    sol: *const ScreenestSolution,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
    pick: fn(&SolutionBundle) -> &[f64],
) -> ScreenestStatus {
    guard(|| {
        // SAFETY: as_ref handles null.
        let Some(s) = (unsafe { sol.as_ref() }) else {
            return Err(null());
        };
        // SAFETY: forwarded caller guarantees.
        unsafe { copy_out(pick(&s.0), buf, len, written) }
    })
}

/// Breakpoints `t_0..t_{M-1}`. `written` (optional) receives the required
/// length even when the buffer is too small.
///
/// # Safety
/// `sol` must be a valid handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn screenest_solution_breakpoints(
    sol: *const ScreenestSolution,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> ScreenestStatus {
    // SAFETY: forwarded caller guarantees.
    unsafe { read_solution(sol, buf, len, written, |s| s.breakpoints.ts()) }
}

/// Prices `v_0..v_M`, same buffer protocol as the breakpoints.
///
/// # Safety
/// `sol` must be a valid handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn screenest_solution_prices(
    sol: *const ScreenestSolution,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> ScreenestStatus {
    // SAFETY: forwarded caller guarantees.
    unsafe { read_solution(sol, buf, len, written, |s| &s.tariff.vs) }
}

/// Region masses `mu(X_0)..mu(X_M)`, same buffer protocol as the breakpoints.
///
/// # Safety
/// `sol` must be a valid handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn screenest_solution_masses(
    sol: *const ScreenestSolution,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> ScreenestStatus {
    // SAFETY: forwarded caller guarantees.
    unsafe { read_solution(sol, buf, len, written, |s| s.masses()) }
}

/// Derivative of the profit in `t_i` at `t`.
///
/// # Safety
/// `inst` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn screenest_dprofit_dti(
    inst: *const ScreenestInstance,
    i: usize,
    t: f64,
    out: *mut f64,
) -> ScreenestStatus {
    guard(|| {
        // SAFETY: null-checked below.
        let (Some(inst), false) = (unsafe { inst.as_ref() }, out.is_null()) else {
            return Err(null());
        };
        if i >= inst.0.grid.n() || !(0.0..=1.0).contains(&t) {
            set_error(format!("gap {i} or t = {t} out of range"));
            return Err(ScreenestStatus::OutOfRange);
        }
        // SAFETY: checked non-null.
        unsafe { *out = dprofit_dti(&inst.0, i, t) };
        Ok(())
    })
}
