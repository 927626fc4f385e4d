//! C interface to the `lsfem` convergence-study driver.
//!
//! Every function returns an [`LsfemStatus`]; on failure a message is kept
//! per thread and can be read with [`lsfem_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use lsfem::cli::{fit_rate, run, write_csv, Mode, RunConfig, RunReport};
use lsfem::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsfemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    InvalidArgument = 3,
    IndexOutOfRange = 4,
    SolverFailure = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Study configuration. Starts from the library defaults.
pub struct LsfemConfig {
    inner: RunConfig,
}

/// Result of [`lsfem_run`].
pub struct LsfemReport {
    inner: RunReport,
}

/// One level of a report. Values that do not apply are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LsfemRow {
    pub level: usize,
    pub dofs: usize,
    pub nodes: usize,
    pub hmax: f64,
    pub ls: f64,
    pub eta: f64,
    pub l2u: f64,
    pub h1u: f64,
    pub l2sigma: f64,
    pub wbh2a: f64,
    pub wbh2: f64,
    /// rates of ls, l2u, h1u, l2sigma, wbh2A, wbh2
    pub rates: [f64; 6],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> LsfemStatus {
    match e {
        Error::UnknownName { .. }
        | Error::FormulationDegree { .. }
        | Error::Config(_)
        | Error::UnsupportedDegree(_)
        | Error::RateInput => LsfemStatus::InvalidArgument,
        Error::SolverDiverged { .. } | Error::Factorization(_) => LsfemStatus::SolverFailure,
        Error::Io(_) => LsfemStatus::Io,
        _ => LsfemStatus::Numerical,
    }
}

fn fail(status: LsfemStatus, msg: impl Into<String>) -> LsfemStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), LsfemStatus>) -> LsfemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsfemStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(LsfemStatus::Panic, "internal panic"),
    }
}

fn lib(e: Error) -> LsfemStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, LsfemStatus> {
    if p.is_null() {
        return Err(fail(LsfemStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LsfemStatus::InvalidString, "string is not valid UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, LsfemStatus> {
    p.as_ref().ok_or_else(|| fail(LsfemStatus::NullPointer, "null handle"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, LsfemStatus> {
    value
        .trim()
        .parse()
        .map_err(|_| fail(LsfemStatus::InvalidArgument, format!("bad value '{value}' for '{key}'")))
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lsfem_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn lsfem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn lsfem_config_new() -> *mut LsfemConfig {
    Box::into_raw(Box::new(LsfemConfig {
        inner: RunConfig::default(),
    }))
}

/// # Safety
/// `config` must come from [`lsfem_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lsfem_config_free(config: *mut LsfemConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets one option. Keys match the long flags of the `lsfem` binary:
/// benchmark, formulation, degree, mode, levels, theta, tol, solver,
/// max-dofs, rate-window, out-csv, out-svg.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn lsfem_config_set(
    config: *mut LsfemConfig,
    key: *const c_char,
    value: *const c_char,
) -> LsfemStatus {
    guard(|| {
        let c = &mut config
            .as_mut()
            .ok_or_else(|| fail(LsfemStatus::NullPointer, "null handle"))?
            .inner;
        let key = str_arg(key)?;
        let value = str_arg(value)?;
        match key {
            "benchmark" => c.benchmark = value.parse().map_err(lib)?,
            "formulation" => c.formulation = value.parse().map_err(lib)?,
            "mode" => c.mode = value.parse().map_err(lib)?,
            "solver" => c.solver.kind = value.parse().map_err(lib)?,
            "degree" => c.degree = parse(key, value)?,
            "levels" => c.levels = parse(key, value)?,
            "theta" => c.theta = parse(key, value)?,
            "tol" => c.solver.tol = parse(key, value)?,
            "max-dofs" => c.max_dofs = parse(key, value)?,
            "rate-window" => c.rate_window = Some(parse(key, value)?),
            "out-csv" => c.out_csv = Some(PathBuf::from(value)),
            "out-svg" => c.out_svg = Some(PathBuf::from(value)),
            _ => return Err(fail(LsfemStatus::InvalidArgument, format!("unknown key '{key}'"))),
        }
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lsfem_config_validate(config: *const LsfemConfig) -> LsfemStatus {
    guard(|| handle(config)?.inner.validate().map_err(lib))
}

/// Runs the configured study. On success `*out` receives a report handle.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lsfem_run(config: *const LsfemConfig, out: *mut *mut LsfemReport) -> LsfemStatus {
    guard(|| {
        let c = handle(config)?;
        if out.is_null() {
            return Err(fail(LsfemStatus::NullPointer, "null output pointer"));
        }
        *out = ptr::null_mut();
        let report = run(&c.inner).map_err(lib)?;
        *out = Box::into_raw(Box::new(LsfemReport { inner: report }));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`lsfem_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lsfem_report_free(report: *mut LsfemReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of levels in the report; 0 for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lsfem_report_len(report: *const LsfemReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.rows.len())
}

/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lsfem_report_row(report: *const LsfemReport, index: usize, out: *mut LsfemRow) -> LsfemStatus {
    guard(|| {
        let r = handle(report)?;
        if out.is_null() {
            return Err(fail(LsfemStatus::NullPointer, "null output pointer"));
        }
        let row = r.inner.rows.get(index).ok_or_else(|| {
            fail(
                LsfemStatus::IndexOutOfRange,
                format!("row {index} of {}", r.inner.rows.len()),
            )
        })?;
        let e = &row.errors;
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        *out = LsfemRow {
            level: e.level,
            dofs: e.dofs,
            nodes: e.nodes,
            hmax: e.h_max,
            ls: e.ls,
            eta: e.eta,
            l2u: e.l2_u,
            h1u: e.h1_u,
            l2sigma: e.l2_sigma,
            wbh2a: nan(e.wbh2_a),
            wbh2: nan(e.wbh2),
            rates: row.rates.map(nan),
        };
        Ok(())
    })
}

/// Writes the report as CSV to `path`.
///
/// # Safety
/// `report` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lsfem_report_write_csv(report: *const LsfemReport, path: *const c_char) -> LsfemStatus {
    guard(|| {
        let r = handle(report)?;
        let path = str_arg(path)?;
        std::fs::write(path, write_csv(&r.inner)).map_err(|e| lib(e.into()))
    })
}

/// Fitted convergence rate of `n` error values against `n` scale values
/// (mesh sizes when `adaptive` is false, unknown counts otherwise).
///
/// # Safety
/// `values` and `scale` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsfem_fit_rate(
    values: *const f64,
    scale: *const f64,
    n: usize,
    adaptive: bool,
    out: *mut f64,
) -> LsfemStatus {
    guard(|| {
        if values.is_null() || scale.is_null() || out.is_null() {
            return Err(fail(LsfemStatus::NullPointer, "null pointer argument"));
        }
        let v = std::slice::from_raw_parts(values, n);
        let s = std::slice::from_raw_parts(scale, n);
        let mode = if adaptive { Mode::Adaptive } else { Mode::Uniform };
        *out = fit_rate(v, s, mode).map_err(lib)?;
        Ok(())
    })
}
