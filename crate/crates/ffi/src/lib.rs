//! C ABI over dnls-core.
//!
//! Handles are opaque and owned by the caller once returned; each has a
//! matching `_free`. Every entry point returns a [`DnlsStatus`]; on anything
//! other than `DNLS_STATUS_OK` (and `DNLS_STATUS_CHECK_FAILED`, which still
//! fills its outputs) a message is available from [`dnls_last_error_message`]
//! on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dnls_core::breather::{find_breather, BreatherSolution};
use dnls_core::config::ScenarioConfig;
use dnls_core::integrator::{integrate, Trajectory};
use dnls_core::scenario::{run_scenario, Command};
use dnls_core::Error;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DnlsStatus {
    Ok = 0,
    /// The check ran and its verdict is FAIL; outputs are still written.
    CheckFailed = 1,
    /// Malformed JSON, bad parameters or an unmet precondition.
    InvalidArgument = 2,
    /// Step-size underflow or a non-convergent iteration.
    Numerical = 3,
    NullPointer = 4,
    /// An internal panic was caught.
    Panic = 5,
    /// The caller's buffer is too short.
    BufferTooSmall = 6,
}

/// A validated scenario configuration.
pub struct DnlsScenario(ScenarioConfig);

/// Sampled trajectory: times and lattice states.
pub struct DnlsTrajectory(Trajectory);

/// A periodic breather found by the fixed-point solver.
pub struct DnlsBreather(BreatherSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: DnlsStatus, msg: impl Into<String>) -> DnlsStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> DnlsStatus {
    let status = if e.is_numerical() || matches!(e, Error::InsufficientData(_)) {
        DnlsStatus::Numerical
    } else {
        DnlsStatus::InvalidArgument
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> DnlsStatus) -> DnlsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            fail(DnlsStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, DnlsStatus> {
    if s.is_null() {
        return Err(fail(DnlsStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(DnlsStatus::InvalidArgument, "string argument is not UTF-8"))
}

fn emit<T>(out: *mut *mut T, value: T) -> DnlsStatus {
    // SAFETY: callers check `out` for null before computing `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    DnlsStatus::Ok
}

/// Copies `values` into `buf` when it holds at least `values.len()` entries.
unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> DnlsStatus {
    if buf.is_null() {
        return fail(DnlsStatus::NullPointer, "output buffer is null");
    }
    if len < values.len() {
        return fail(DnlsStatus::BufferTooSmall, format!("buffer holds {len} values, {} needed", values.len()));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    DnlsStatus::Ok
}

macro_rules! deref {
    ($p:expr) => {{
        if $p.is_null() {
            return fail(DnlsStatus::NullPointer, concat!(stringify!($p), " is null"));
        }
        &*$p
    }};
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn dnls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates a scenario JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dnls_scenario_from_json(json: *const c_char, out: *mut *mut DnlsScenario) -> DnlsStatus {
    guard(|| {
        if out.is_null() {
            return fail(DnlsStatus::NullPointer, "out is null");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ScenarioConfig::from_json(text) {
            Ok(cfg) => emit(out, DnlsScenario(cfg)),
            Err(e) => from_error(&e),
        }
    })
}

/// Overrides the scenario seed.
///
/// # Safety
/// `scenario` must come from [`dnls_scenario_from_json`].
#[no_mangle]
pub unsafe extern "C" fn dnls_scenario_set_seed(scenario: *mut DnlsScenario, seed: u64) -> DnlsStatus {
    guard(|| {
        if scenario.is_null() {
            return fail(DnlsStatus::NullPointer, "scenario is null");
        }
        (*scenario).0.scenario.seed = seed;
        DnlsStatus::Ok
    })
}

/// Number of lattice sites.
///
/// # Safety
/// `scenario` must come from [`dnls_scenario_from_json`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnls_scenario_sites(scenario: *const DnlsScenario, out: *mut usize) -> DnlsStatus {
    guard(|| {
        let s = deref!(scenario);
        if out.is_null() {
            return fail(DnlsStatus::NullPointer, "out is null");
        }
        *out = s.0.lattice.sites;
        DnlsStatus::Ok
    })
}

/// # Safety
/// `scenario` must come from [`dnls_scenario_from_json`] or be null, and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dnls_scenario_free(scenario: *mut DnlsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Integrates the configured initial state over `[t0, t0 + horizon]`.
///
/// # Safety
/// `scenario` must come from [`dnls_scenario_from_json`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnls_simulate(scenario: *const DnlsScenario, out: *mut *mut DnlsTrajectory) -> DnlsStatus {
    guard(|| {
        let cfg = &deref!(scenario).0;
        if out.is_null() {
            return fail(DnlsStatus::NullPointer, "out is null");
        }
        let run = || -> dnls_core::Result<Trajectory> {
            let model = cfg.build_model()?;
            let s = &cfg.scenario;
            let initial = s.initial.build(&model, s.seed)?;
            integrate(&model, model.lattice(), &initial, s.t0, s.t0 + s.horizon, &cfg.integrator)
        };
        match run() {
            Ok(t) => emit(out, DnlsTrajectory(t)),
            Err(e) => from_error(&e),
        }
    })
}

/// Number of samples and lattice sites.
///
/// # Safety
/// `traj` must come from [`dnls_simulate`]; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnls_trajectory_shape(
    traj: *const DnlsTrajectory,
    samples: *mut usize,
    sites: *mut usize,
) -> DnlsStatus {
    guard(|| {
        let t = &deref!(traj).0;
        if samples.is_null() || sites.is_null() {
            return fail(DnlsStatus::NullPointer, "output is null");
        }
        *samples = t.len();
        *sites = t.states.first().map_or(0, |s| s.len());
        DnlsStatus::Ok
    })
}

/// Copies the sample times into `buf`, which must hold `samples` doubles.
///
/// # Safety
/// `traj` must come from [`dnls_simulate`]; `buf` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dnls_trajectory_times(traj: *const DnlsTrajectory, buf: *mut f64, len: usize) -> DnlsStatus {
    guard(|| copy_out(&deref!(traj).0.times, buf, len))
}

/// Copies sample `index` as interleaved `re, im` pairs into `buf`, which must
/// hold `2 * sites` doubles.
///
/// # Safety
/// `traj` must come from [`dnls_simulate`]; `buf` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dnls_trajectory_state(
    traj: *const DnlsTrajectory,
    index: usize,
    buf: *mut f64,
    len: usize,
) -> DnlsStatus {
    guard(|| {
        let t = &deref!(traj).0;
        match t.states.get(index) {
            Some(s) => copy_out(&s.to_real_vec(), buf, len),
            None => fail(DnlsStatus::InvalidArgument, format!("sample {index} out of range ({} samples)", t.len())),
        }
    })
}

/// # Safety
/// `traj` must come from [`dnls_simulate`] or be null, and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn dnls_trajectory_free(traj: *mut DnlsTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Solves for the periodic breather from the zero state, or from a random
/// state in the absorbing ball when `use_seed` is true.
///
/// # Safety
/// `scenario` must come from [`dnls_scenario_from_json`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnls_find_breather(
    scenario: *const DnlsScenario,
    use_seed: bool,
    seed: u64,
    out: *mut *mut DnlsBreather,
) -> DnlsStatus {
    guard(|| {
        let cfg = &deref!(scenario).0;
        if out.is_null() {
            return fail(DnlsStatus::NullPointer, "out is null");
        }
        let seed = use_seed.then_some(seed);
        match cfg.build_model().and_then(|m| find_breather(&m, &cfg.scenario.breather, seed)) {
            Ok(b) => emit(out, DnlsBreather(b)),
            Err(e) => from_error(&e),
        }
    })
}

/// Lattice state at `t0` as interleaved `re, im` pairs; `buf` must hold
/// `2 * sites` doubles.
///
/// # Safety
/// `breather` must come from [`dnls_find_breather`]; `buf` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dnls_breather_state(breather: *const DnlsBreather, buf: *mut f64, len: usize) -> DnlsStatus {
    guard(|| copy_out(&deref!(breather).0.state0.to_real_vec(), buf, len))
}

/// Period, periodicity residual and iteration count.
///
/// # Safety
/// `breather` must come from [`dnls_find_breather`]; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dnls_breather_info(
    breather: *const DnlsBreather,
    period: *mut f64,
    residual: *mut f64,
    iterations: *mut usize,
) -> DnlsStatus {
    guard(|| {
        let b = &deref!(breather).0;
        if period.is_null() || residual.is_null() || iterations.is_null() {
            return fail(DnlsStatus::NullPointer, "output is null");
        }
        *period = b.period;
        *residual = b.periodicity_residual;
        *iterations = b.iterations;
        DnlsStatus::Ok
    })
}

/// # Safety
/// `breather` must come from [`dnls_find_breather`] or be null, and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dnls_breather_free(breather: *mut DnlsBreather) {
    if !breather.is_null() {
        drop(Box::from_raw(breather));
    }
}

/// Runs a named check (`simulate`, `verify-bounds`, `absorbing`, `tail`,
/// `contraction`, `continuity`, `dimension`, `breather`) and writes its JSON
/// summary to `out_json`, to be released with [`dnls_string_free`]. Returns
/// `DNLS_STATUS_CHECK_FAILED` with the summary written when the verdict is FAIL.
///
/// # Safety
/// `scenario` must come from [`dnls_scenario_from_json`], `command` must be a
/// NUL-terminated string and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn dnls_run_check(
    scenario: *const DnlsScenario,
    command: *const c_char,
    out_json: *mut *mut c_char,
) -> DnlsStatus {
    guard(|| {
        let cfg = &deref!(scenario).0;
        if out_json.is_null() {
            return fail(DnlsStatus::NullPointer, "out_json is null");
        }
        let name = match read_str(command) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let command: Command = match name.parse() {
            Ok(c) => c,
            Err(e) => return from_error(&e),
        };
        match run_scenario(command, cfg) {
            Ok(o) => {
                let text = o.summary.to_string();
                *out_json = CString::new(text).map_or(ptr::null_mut(), CString::into_raw);
                if o.pass {
                    DnlsStatus::Ok
                } else {
                    fail(DnlsStatus::CheckFailed, format!("{command}: FAIL"))
                }
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `s` must come from this library or be null, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dnls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
