//! C ABI for the speclift library: opaque matrix handles, status codes, and
//! JSON strings for structured payloads (same schemas as the CLI).
//!
//! Ownership rules: every `*mut SpecliftMatrix` returned here is freed with
//! [`speclift_matrix_free`]; every `*mut c_char` returned here is freed with
//! [`speclift_string_free`]. Output parameters are only written on
//! `SpecliftStatusOk`. `speclift_last_error_message` describes the most
//! recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use num_complex::Complex64;

use speclift::criterion::{check_global, BlockReading};
use speclift::files::{
    exit_code_for, global_verdict_info, lifting_data, structure_to_clusters, InstanceFile,
    VerificationInfo,
};
use speclift::jordan::{d_sequence, jordan_structure};
use speclift::lift::{global_cyclic_lift, verify_lift};
use speclift::matrix::ComplexMatrix;
use speclift::projection::{in_spectral_ball, project};
use speclift::{Error, ToleranceConfig};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecliftStatus {
    /// Success; output parameters are valid.
    SpecliftStatusOk = 0,
    /// A pointer argument was null.
    SpecliftStatusNullPointer = 1,
    /// Malformed input (shape, schema, domain violations).
    SpecliftStatusInvalidArgument = 2,
    /// A numerical routine failed (non-convergence, singularity, ambiguous
    /// structure).
    SpecliftStatusNumericalFailure = 3,
}

use SpecliftStatus::*;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_for(e: &Error) -> SpecliftStatus {
    set_error(&e.to_string());
    if exit_code_for(e) == 2 {
        SpecliftStatusInvalidArgument
    } else {
        SpecliftStatusNumericalFailure
    }
}

/// Opaque handle to a dense complex matrix.
pub struct SpecliftMatrix {
    inner: ComplexMatrix,
}

/// Most recent error message on this thread; valid until the next failing
/// call from the same thread. Never null.
#[no_mangle]
pub extern "C" fn speclift_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn speclift_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Builds an `n x n` matrix from `2 n^2` doubles: row-major entries, each as
/// a (re, im) pair.
///
/// # Safety
/// `entries` must point to `2 n^2` readable doubles and `out` to a writable
/// pointer slot.
#[no_mangle]
pub unsafe extern "C" fn speclift_matrix_new(
    n: usize,
    entries: *const f64,
    out: *mut *mut SpecliftMatrix,
) -> SpecliftStatus {
    if entries.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    let raw = std::slice::from_raw_parts(entries, 2 * n * n);
    let data: Vec<Complex64> = raw
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    match ComplexMatrix::new(n, data) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(SpecliftMatrix { inner: m }));
            SpecliftStatusOk
        }
        Err(e) => status_for(&e),
    }
}

/// Frees a matrix handle; null is ignored.
///
/// # Safety
/// `m` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn speclift_matrix_free(m: *mut SpecliftMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Writes the symmetrized-polydisc coordinates as `2n` doubles (re, im
/// pairs).
///
/// # Safety
/// `m` must be a live handle; `out_pairs` must point to `2n` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn speclift_project(
    m: *const SpecliftMatrix,
    out_pairs: *mut f64,
) -> SpecliftStatus {
    if m.is_null() || out_pairs.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    let y = project(&(*m).inner);
    let out = std::slice::from_raw_parts_mut(out_pairs, 2 * y.dim());
    for (i, z) in y.components().iter().enumerate() {
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
    SpecliftStatusOk
}

/// Spectral radius of the matrix.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn speclift_spectral_radius(
    m: *const SpecliftMatrix,
    out: *mut f64,
) -> SpecliftStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    match speclift::spectral_radius(&(*m).inner) {
        Ok(r) => {
            *out = r;
            SpecliftStatusOk
        }
        Err(e) => status_for(&e),
    }
}

/// Spectral-ball membership: `out_inside` is 1 or 0, `out_margin` is
/// `1 - rho`.
///
/// # Safety
/// `m` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn speclift_in_spectral_ball(
    m: *const SpecliftMatrix,
    out_inside: *mut i32,
    out_margin: *mut f64,
) -> SpecliftStatus {
    if m.is_null() || out_inside.is_null() || out_margin.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    match in_spectral_ball(&(*m).inner) {
        Ok(membership) => {
            *out_inside = membership.inside as i32;
            *out_margin = membership.margin;
            SpecliftStatusOk
        }
        Err(e) => status_for(&e),
    }
}

fn tolerance_config(rank_tol: f64, cluster_tol: f64) -> ToleranceConfig {
    let mut cfg = ToleranceConfig::default();
    if rank_tol > 0.0 {
        cfg.rank_tol = rank_tol;
    }
    if cluster_tol > 0.0 {
        cfg.cluster_tol = cluster_tol;
    }
    cfg
}

/// Whether the matrix is cyclic (one Jordan block per eigenvalue).
/// Non-positive tolerances select the defaults.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn speclift_is_cyclic(
    m: *const SpecliftMatrix,
    rank_tol: f64,
    cluster_tol: f64,
    out: *mut i32,
) -> SpecliftStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    let cfg = tolerance_config(rank_tol, cluster_tol);
    match speclift::is_cyclic(&(*m).inner, &cfg) {
        Ok(c) => {
            *out = c as i32;
            SpecliftStatusOk
        }
        Err(e) => status_for(&e),
    }
}

fn string_out(out: *mut *mut c_char, text: String) -> SpecliftStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            SpecliftStatusOk
        }
        Err(_) => {
            set_error("payload contained an interior NUL");
            SpecliftStatusInvalidArgument
        }
    }
}

/// Jordan structure of the matrix as a JSON payload: clusters with
/// eigenvalue, multiplicity, partition and Weyr characteristic, plus the
/// minimal-generator sequence. Non-positive tolerances select the defaults.
///
/// # Safety
/// `m` must be a live handle; `out` receives a string freed by
/// [`speclift_string_free`].
#[no_mangle]
pub unsafe extern "C" fn speclift_jordan_json(
    m: *const SpecliftMatrix,
    rank_tol: f64,
    cluster_tol: f64,
    out: *mut *mut c_char,
) -> SpecliftStatus {
    if m.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    let cfg = tolerance_config(rank_tol, cluster_tol);
    match jordan_structure(&(*m).inner, &cfg) {
        Ok(s) => {
            let payload = serde_json::json!({
                "cyclic": s.is_cyclic(),
                "clusters": structure_to_clusters(&s),
                "d_sequence": d_sequence(&s).values(),
            });
            string_out(out, payload.to_string())
        }
        Err(e) => status_for(&e),
    }
}

unsafe fn parse_instance(text: *const c_char) -> Result<InstanceFile, SpecliftStatus> {
    if text.is_null() {
        set_error("null pointer argument");
        return Err(SpecliftStatusNullPointer);
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("instance JSON is not UTF-8");
            return Err(SpecliftStatusInvalidArgument);
        }
    };
    InstanceFile::parse(text).map_err(|e| status_for(&e))
}

/// Runs the lifting criterion at every node of an instance (JSON, same
/// schema as the CLI input) and returns the verdict payload as JSON.
///
/// # Safety
/// `instance_json` must be a NUL-terminated string; `out` receives a string
/// freed by [`speclift_string_free`].
#[no_mangle]
pub unsafe extern "C" fn speclift_check_global_json(
    instance_json: *const c_char,
    out: *mut *mut c_char,
) -> SpecliftStatus {
    if out.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    let file = match parse_instance(instance_json) {
        Ok(v) => v,
        Err(status) => return status,
    };
    let run = || -> Result<serde_json::Value, Error> {
        let instance = file.to_instance()?;
        let cfg = file.tolerance_config(&Default::default())?;
        let reading = file.reading()?.unwrap_or(BlockReading::Grouped);
        let verdict = check_global(&instance, reading, &cfg)?;
        Ok(serde_json::to_value(global_verdict_info(&verdict)).expect("serializable"))
    };
    match run() {
        Ok(payload) => string_out(out, payload.to_string()),
        Err(e) => status_for(&e),
    }
}

/// Constructs and verifies a lifting for an all-cyclic instance; returns
/// `{"lifting": ..., "verification": ..., "warnings": ...}` as JSON.
/// Verification samples the disc at `samples` quasi-uniform points.
///
/// # Safety
/// `instance_json` must be a NUL-terminated string; `out` receives a string
/// freed by [`speclift_string_free`].
#[no_mangle]
pub unsafe extern "C" fn speclift_lift_json(
    instance_json: *const c_char,
    seed: u64,
    samples: usize,
    out: *mut *mut c_char,
) -> SpecliftStatus {
    if out.is_null() {
        set_error("null pointer argument");
        return SpecliftStatusNullPointer;
    }
    let file = match parse_instance(instance_json) {
        Ok(v) => v,
        Err(status) => return status,
    };
    let run = || -> Result<serde_json::Value, Error> {
        let instance = file.to_instance()?;
        let cfg = file.tolerance_config(&Default::default())?;
        let lift = global_cyclic_lift(&instance, &cfg, seed)?;
        let verification = verify_lift(&lift.map, &instance, samples.max(1), cfg.verify_tol)?;
        Ok(serde_json::json!({
            "lifting": lifting_data(&lift.map),
            "verification": VerificationInfo::from(&verification),
            "warnings": lift.warnings,
        }))
    };
    match run() {
        Ok(payload) => string_out(out, payload.to_string()),
        Err(e) => status_for(&e),
    }
}

/// Frees a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn speclift_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
