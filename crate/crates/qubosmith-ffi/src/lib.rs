//! C ABI for the qubosmith QUBO solver library.
//!
//! Conventions:
//! - `QsMatrix` and `QsResult` are opaque handles owned by the library;
//!   release them with `qs_matrix_free` / `qs_result_free`.
//! - Fallible calls return a `QsStatus`; on anything but `QS_STATUS_OK` the
//!   thread-local message from `qs_last_error_message` describes the
//!   failure (free it with `qs_string_free`).
//! - Strings are NUL-terminated UTF-8. Bit buffers are one byte per
//!   variable, each 0 or 1.
//! - Solver configuration is passed as a JSON object matching the library's
//!   `SolverConfig` (direct solvers) or `DecompositionConfig`
//!   (`qbsolv-like:<inner>`); pass NULL for defaults.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;

use qubosmith::dispatch::SolverInstance;
use qubosmith::error::Error;
use qubosmith::generate::{random_qubo, GeneratorSpec};
use qubosmith::gset::{maxcut_to_qubo, parse_gset};
use qubosmith::matrix::{BitVector, QuboMatrix};
use qubosmith::solvers::SolveResult;

/// Opaque QUBO coefficient matrix handle.
pub struct QsMatrix {
    inner: QuboMatrix,
}

/// Opaque solve-result handle.
pub struct QsResult {
    inner: SolveResult,
    num_vars: usize,
}

/// Status codes returned by fallible calls.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    IoError = 4,
    CapacityError = 5,
    ConfigError = 6,
    UnknownSolver = 7,
    DimensionMismatch = 8,
    DomainError = 9,
    SolveFailed = 10,
    BufferTooSmall = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let cstring = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &Error) -> QsStatus {
    match err {
        Error::DimensionMismatch { .. } => QsStatus::DimensionMismatch,
        Error::Parse { .. } => QsStatus::ParseError,
        Error::Io(_) => QsStatus::IoError,
        Error::Capacity { .. } => QsStatus::CapacityError,
        Error::Config(_) | Error::Json(_) => QsStatus::ConfigError,
        Error::UnknownSolver(_) => QsStatus::UnknownSolver,
        Error::Domain(_) | Error::IndexOutOfRange { .. } | Error::NonFinite { .. } => {
            QsStatus::DomainError
        }
        _ => QsStatus::SolveFailed,
    }
}

fn fail(err: &Error) -> QsStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn null_argument(what: &str) -> QsStatus {
    set_error(&format!("null argument: {what}"));
    QsStatus::NullArgument
}

/// # Safety
/// `ptr` must be NUL-terminated and valid for reads.
unsafe fn cstr_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, QsStatus> {
    if ptr.is_null() {
        return Err(null_argument(what));
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        QsStatus::InvalidUtf8
    })
}

fn box_matrix(m: QuboMatrix, out: *mut *mut QsMatrix) -> QsStatus {
    if out.is_null() {
        return null_argument("out");
    }
    unsafe { *out = Box::into_raw(Box::new(QsMatrix { inner: m })) };
    QsStatus::Ok
}

/// Reads a native-format instance file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_from_file(
    path: *const c_char,
    out: *mut *mut QsMatrix,
) -> QsStatus {
    let path = match unsafe { cstr_arg(path, "path") } {
        Ok(p) => PathBuf::from(p),
        Err(status) => return status,
    };
    match qubosmith::io::read_instance_file(&path) {
        Ok(m) => box_matrix(m, out),
        Err(e) => fail(&e),
    }
}

/// Generates a fully dense Gaussian random instance (mean 0, given sigma);
/// identical `(n, sigma, seed)` always produce the same matrix.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_random(
    n: u64,
    sigma: f64,
    seed: u64,
    out: *mut *mut QsMatrix,
) -> QsStatus {
    let spec = GeneratorSpec {
        n: n as usize,
        sigma,
        seed,
    };
    match random_qubo(&spec) {
        Ok(m) => box_matrix(m, out),
        Err(e) => fail(&e),
    }
}

/// Parses a G-set Max-Cut graph file and reduces it to a minimization QUBO
/// whose energies are negated cut values.
///
/// # Safety
/// `path` must be a valid NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_from_gset_file(
    path: *const c_char,
    out: *mut *mut QsMatrix,
) -> QsStatus {
    let path = match unsafe { cstr_arg(path, "path") } {
        Ok(p) => PathBuf::from(p),
        Err(status) => return status,
    };
    let parse = || -> Result<QuboMatrix, Error> {
        let file = std::fs::File::open(&path)?;
        let graph = parse_gset(std::io::BufReader::new(file))?;
        maxcut_to_qubo(&graph)
    };
    match parse() {
        Ok(m) => box_matrix(m, out),
        Err(e) => fail(&e),
    }
}

/// Writes the matrix in the native instance format.
///
/// # Safety
/// `matrix` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_write_file(
    matrix: *const QsMatrix,
    path: *const c_char,
) -> QsStatus {
    let Some(m) = (unsafe { matrix.as_ref() }) else {
        return null_argument("matrix");
    };
    let path = match unsafe { cstr_arg(path, "path") } {
        Ok(p) => PathBuf::from(p),
        Err(status) => return status,
    };
    match qubosmith::io::write_instance_file(&m.inner, &path) {
        Ok(()) => QsStatus::Ok,
        Err(e) => fail(&e),
    }
}

/// Number of binary variables; 0 for a null handle.
///
/// # Safety
/// `matrix` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_num_vars(matrix: *const QsMatrix) -> usize {
    unsafe { matrix.as_ref() }.map_or(0, |m| m.inner.num_vars())
}

/// Interaction density (stored off-diagonal couplers over n-choose-2).
///
/// # Safety
/// `matrix` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_density(matrix: *const QsMatrix, out: *mut f64) -> QsStatus {
    let Some(m) = (unsafe { matrix.as_ref() }) else {
        return null_argument("matrix");
    };
    if out.is_null() {
        return null_argument("out");
    }
    match m.inner.density() {
        Ok(d) => {
            unsafe { *out = d };
            QsStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Evaluates the energy of an assignment (`len` bytes, each 0 or 1).
///
/// # Safety
/// `bits` must point at `len` readable bytes; other pointers as above.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_energy(
    matrix: *const QsMatrix,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> QsStatus {
    let Some(m) = (unsafe { matrix.as_ref() }) else {
        return null_argument("matrix");
    };
    if bits.is_null() {
        return null_argument("bits");
    }
    if out.is_null() {
        return null_argument("out");
    }
    let slice = unsafe { std::slice::from_raw_parts(bits, len) };
    if slice.iter().any(|&b| b > 1) {
        set_error("bit values must be 0 or 1");
        return QsStatus::DomainError;
    }
    let x = BitVector::from_bits(slice);
    match m.inner.energy(&x) {
        Ok(e) => {
            unsafe { *out = e };
            QsStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a matrix handle; null is a no-op.
///
/// # Safety
/// `matrix` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qs_matrix_free(matrix: *mut QsMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// Runs a solver against a matrix. `solver_id` is one of `bf`, `sa`, `sd`,
/// `ts`, `pticm` or `qbsolv-like:<inner>`; `config_json` may be NULL for
/// defaults.
///
/// # Safety
/// Pointer arguments as documented in the module header.
#[no_mangle]
pub unsafe extern "C" fn qs_solve(
    matrix: *const QsMatrix,
    solver_id: *const c_char,
    config_json: *const c_char,
    out: *mut *mut QsResult,
) -> QsStatus {
    let Some(m) = (unsafe { matrix.as_ref() }) else {
        return null_argument("matrix");
    };
    let id = match unsafe { cstr_arg(solver_id, "solver_id") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config = if config_json.is_null() {
        None
    } else {
        match unsafe { cstr_arg(config_json, "config_json") } {
            Ok(s) => Some(s),
            Err(status) => return status,
        }
    };
    if out.is_null() {
        return null_argument("out");
    }
    let run = || -> Result<SolveResult, Error> {
        let solver = SolverInstance::from_id_and_json(id, config)?;
        solver.solve(&m.inner)
    };
    match run() {
        Ok(result) => {
            let handle = Box::new(QsResult {
                inner: result,
                num_vars: m.inner.num_vars(),
            });
            unsafe { *out = Box::into_raw(handle) };
            QsStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Best energy found; NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qs_result_energy(result: *const QsResult) -> f64 {
    unsafe { result.as_ref() }.map_or(f64::NAN, |r| r.inner.best_energy)
}

/// Solve-only wall time in seconds; NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qs_result_solve_time_seconds(result: *const QsResult) -> f64 {
    unsafe { result.as_ref() }.map_or(f64::NAN, |r| r.inner.solve_time.as_secs_f64())
}

/// Variable count of the solved instance.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qs_result_num_vars(result: *const QsResult) -> usize {
    unsafe { result.as_ref() }.map_or(0, |r| r.num_vars)
}

/// Copies the best assignment into `buf` (one byte per variable).
///
/// # Safety
/// `buf` must point at `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qs_result_bits(
    result: *const QsResult,
    buf: *mut u8,
    len: usize,
) -> QsStatus {
    let Some(r) = (unsafe { result.as_ref() }) else {
        return null_argument("result");
    };
    if buf.is_null() {
        return null_argument("buf");
    }
    if len < r.num_vars {
        set_error(&format!("buffer holds {len} bytes, need {}", r.num_vars));
        return QsStatus::BufferTooSmall;
    }
    let out = unsafe { std::slice::from_raw_parts_mut(buf, r.num_vars) };
    out.copy_from_slice(r.inner.best_bits.as_slice());
    QsStatus::Ok
}

/// Number of per-read energies available.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qs_result_num_reads(result: *const QsResult) -> usize {
    unsafe { result.as_ref() }.map_or(0, |r| r.inner.read_energies.len())
}

/// Copies the per-read energies into `buf`.
///
/// # Safety
/// `buf` must point at `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qs_result_read_energies(
    result: *const QsResult,
    buf: *mut f64,
    len: usize,
) -> QsStatus {
    let Some(r) = (unsafe { result.as_ref() }) else {
        return null_argument("result");
    };
    if buf.is_null() {
        return null_argument("buf");
    }
    let energies = &r.inner.read_energies;
    if len < energies.len() {
        set_error(&format!(
            "buffer holds {len} doubles, need {}",
            energies.len()
        ));
        return QsStatus::BufferTooSmall;
    }
    let out = unsafe { std::slice::from_raw_parts_mut(buf, energies.len()) };
    out.copy_from_slice(energies);
    QsStatus::Ok
}

/// Solver metadata as a JSON object; free with `qs_string_free`. NULL for a
/// null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qs_result_metadata_json(result: *const QsResult) -> *mut c_char {
    let Some(r) = (unsafe { result.as_ref() }) else {
        return std::ptr::null_mut();
    };
    let json = serde_json::to_string(&r.inner.metadata).unwrap_or_else(|_| "{}".to_string());
    CString::new(json)
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Releases a result handle; null is a no-op.
///
/// # Safety
/// `result` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qs_result_free(result: *mut QsResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Message of the last error on this thread, or NULL; free with
/// `qs_string_free`.
#[no_mangle]
pub extern "C" fn qs_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.clone().into_raw())
            .unwrap_or(std::ptr::null_mut())
    })
}

/// Frees a string returned by this library; null is a no-op.
///
/// # Safety
/// `s` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
