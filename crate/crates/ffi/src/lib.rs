//! C interface to `twosource`.
//!
//! Every fallible function returns a `TsStatus`; on failure a message is kept
//! per thread and can be read with `ts_last_error`. Results either go to
//! caller-provided `#[repr(C)]` structs or, for bound reports, to an opaque
//! handle that must be released with `ts_bound_report_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use twosource::asymptotics::{chernoff_analytic, chernoff_for};
use twosource::discrimination::{helstrom_m_shot, helstrom_one_shot, minimal_m, BoundReport};
use twosource::model::{ScenarioKind, ScenarioParams};
use twosource::simulate::{run_experiment, SimConfig};
use twosource::sliver::protocol_error;
use twosource::Error;

pub const TS_SCENARIO_ASYMMETRIC: u32 = 0;
pub const TS_SCENARIO_SYMMETRIC: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was outside its domain.
    Domain = 2,
    /// The request exceeds a size limit.
    Capacity = 3,
    /// A numerical routine failed.
    Numeric = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// Opaque result of a bound computation.
pub struct TsBoundReport(BoundReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsChernoff {
    pub xi: f64,
    pub s_star: f64,
    pub overlap_at_s_star: f64,
    pub minimum_at_zero: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsProtocol {
    pub alpha: f64,
    pub beta: f64,
    pub p_err: f64,
    pub saturation: f64,
    pub exponent: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsSimulation {
    pub wrong_h1: u64,
    pub wrong_h2: u64,
    pub p_hat: f64,
    /// Binomial standard error of `p_hat` (`stderr` is a C macro).
    pub std_error: f64,
    pub p_theory: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> TsStatus {
    match err {
        Error::Domain(_) | Error::Empty(_) | Error::InvalidMatrix(_) => TsStatus::Domain,
        Error::Capacity(_) => TsStatus::Capacity,
        Error::Numerical(_) => TsStatus::Numeric,
    }
}

fn scenario(code: u32) -> Result<ScenarioKind, Error> {
    match code {
        TS_SCENARIO_ASYMMETRIC => Ok(ScenarioKind::Asymmetric),
        TS_SCENARIO_SYMMETRIC => Ok(ScenarioKind::Symmetric),
        other => Err(Error::Domain(format!("unknown scenario code {other}"))),
    }
}

/// Runs `f`, writes its value through `out`, and maps errors and panics.
fn guarded<T>(out: *mut T, f: impl FnOnce() -> Result<T, Error>) -> TsStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return TsStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller guarantees it is writable.
            unsafe { out.write(v) };
            set_error("");
            TsStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            TsStatus::Panic
        }
    }
}

/// Message of the last failure on this thread (empty after a success).
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ts_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Optimal error after `m` detections. On success `*out` owns a new report.
#[no_mangle]
pub extern "C" fn ts_bound(
    scenario_code: u32,
    k: f64,
    q: f64,
    p1: f64,
    m: u32,
    out: *mut *mut TsBoundReport,
) -> TsStatus {
    guarded(out, || {
        let params = ScenarioParams::new(scenario(scenario_code)?, k, q, p1)?;
        let report = if m == 1 { helstrom_one_shot(&params)? } else { helstrom_m_shot(&params, m)? };
        Ok(Box::into_raw(Box::new(TsBoundReport(report))))
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from `ts_bound` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_bound_report_free(report: *mut TsBoundReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn with_report<T>(report: *const TsBoundReport, fallback: T, f: impl FnOnce(&BoundReport) -> T) -> T {
    report.as_ref().map_or(fallback, |r| f(&r.0))
}

/// Optimal error; NaN for a null report.
///
/// # Safety
/// `report` must be null or a live report from `ts_bound`.
#[no_mangle]
pub unsafe extern "C" fn ts_bound_report_e_min(report: *const TsBoundReport) -> f64 {
    with_report(report, f64::NAN, |r| r.e_min)
}

/// Error of guessing from the priors alone; NaN for a null report.
///
/// # Safety
/// `report` must be null or a live report from `ts_bound`.
#[no_mangle]
pub unsafe extern "C" fn ts_bound_report_e_guess(report: *const TsBoundReport) -> f64 {
    with_report(report, f64::NAN, |r| r.e_guess)
}

/// Guessing error over optimal error (`INFINITY` when the optimum is zero);
/// NaN for a null report.
///
/// # Safety
/// `report` must be null or a live report from `ts_bound`.
#[no_mangle]
pub unsafe extern "C" fn ts_bound_report_advantage(report: *const TsBoundReport) -> f64 {
    with_report(report, f64::NAN, |r| r.advantage.ratio())
}

/// Whether guessing is already optimal; false for a null report.
///
/// # Safety
/// `report` must be null or a live report from `ts_bound`.
#[no_mangle]
pub unsafe extern "C" fn ts_bound_report_forbidden(report: *const TsBoundReport) -> bool {
    with_report(report, false, |r| r.forbidden)
}

/// Detections per decision; 0 for a null report.
///
/// # Safety
/// `report` must be null or a live report from `ts_bound`.
#[no_mangle]
pub unsafe extern "C" fn ts_bound_report_m(report: *const TsBoundReport) -> u32 {
    with_report(report, 0, |r| r.m)
}

/// Numerically minimized Chernoff exponent.
#[no_mangle]
pub extern "C" fn ts_chernoff(scenario_code: u32, k: f64, q: f64, out: *mut TsChernoff) -> TsStatus {
    guarded(out, || {
        let r = chernoff_for(scenario(scenario_code)?, k, q)?;
        Ok(TsChernoff {
            xi: r.xi,
            s_star: r.s_star,
            overlap_at_s_star: r.overlap_at_s_star,
            minimum_at_zero: r.minimum_at_zero,
        })
    })
}

/// Closed-form Chernoff exponent.
#[no_mangle]
pub extern "C" fn ts_chernoff_analytic(scenario_code: u32, k: f64, q: f64, out: *mut f64) -> TsStatus {
    guarded(out, || chernoff_analytic(scenario(scenario_code)?, k, q))
}

/// Parity-sorting protocol error after `m` detections (equal priors and
/// brightness).
#[no_mangle]
pub extern "C" fn ts_protocol(scenario_code: u32, k: f64, m: u32, out: *mut TsProtocol) -> TsStatus {
    guarded(out, || {
        let r = protocol_error(scenario(scenario_code)?, k, m)?;
        Ok(TsProtocol {
            alpha: r.alpha,
            beta: r.beta,
            p_err: r.p_err,
            saturation: r.saturation,
            exponent: r.exponent,
        })
    })
}

/// Smallest `m <= m_cap` that beats guessing; `-1` if there is none.
#[no_mangle]
pub extern "C" fn ts_minimal_m(
    scenario_code: u32,
    k: f64,
    q: f64,
    p1: f64,
    m_cap: u32,
    out: *mut i64,
) -> TsStatus {
    guarded(out, || {
        let params = ScenarioParams::new(scenario(scenario_code)?, k, q, p1)?;
        Ok(minimal_m(&params, m_cap)?.m_min.as_i64())
    })
}

/// Monte Carlo run of the protocol; deterministic for a given `seed`.
#[no_mangle]
pub extern "C" fn ts_simulate(
    scenario_code: u32,
    k: f64,
    m: u32,
    trials: u64,
    seed: u64,
    out: *mut TsSimulation,
) -> TsStatus {
    guarded(out, || {
        let r = run_experiment(&SimConfig { kind: scenario(scenario_code)?, k, m, trials, seed })?;
        Ok(TsSimulation {
            wrong_h1: r.wrong_h1,
            wrong_h2: r.wrong_h2,
            p_hat: r.p_hat,
            std_error: r.stderr,
            p_theory: r.p_theory,
        })
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ts_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
