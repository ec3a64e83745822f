//! C ABI for the `hopfcert` certifier.
//!
//! Models, oracles and reports cross the boundary as opaque handles created by
//! `hc_*_from_*` / `hc_certify` and released with the matching `hc_*_free`.
//! Every fallible function returns an [`HcStatus`]; on failure the message is
//! available from [`hc_last_error_message`] on the same thread. Strings handed
//! out by the library must be released with [`hc_string_free`].
//!
//! The header `include/hopfcert.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hopfcert::io::{model_to_json, parse_model, parse_oracle};
use hopfcert::report::certificate_json;
use hopfcert::{
    certify, fourier, from_hadamard, from_permutations, idempotent_eval, multiplicity_one, validate_magic_unitary,
    Capacity, CertificateReport, Error, MagicUnitaryModel, Method, MomentOracle, Permutation, Tolerance, Verdict,
    Word,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Dimension = 3,
    Capacity = 4,
    NonConvergence = 5,
    Inconsistency = 6,
    Domain = 7,
    Parse = 8,
    NotContractive = 9,
    Utf8 = 10,
    Panic = 11,
}

/// Outcome of a certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcVerdictKind {
    Confirmed = 0,
    ConfirmedWithWarnings = 1,
    Refuted = 2,
    Inconsistent = 3,
}

/// Opaque model handle.
pub struct HcModel(MagicUnitaryModel);

/// Opaque moment-oracle handle.
pub struct HcOracle(MomentOracle);

/// Opaque certificate handle.
pub struct HcReport(CertificateReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::Dimension(_) => HcStatus::Dimension,
        Error::NonFinite { .. } | Error::InvalidTolerance(_) | Error::InvalidInput(_) | Error::SizeGuard { .. } => {
            HcStatus::InvalidInput
        }
        Error::NonConvergence { .. } => HcStatus::NonConvergence,
        Error::Capacity { .. } => HcStatus::Capacity,
        Error::Inconsistency { .. } => HcStatus::Inconsistency,
        Error::Domain(_) => HcStatus::Domain,
        Error::Parse { .. } => HcStatus::Parse,
        Error::NotContractive { .. } => HcStatus::NotContractive,
    }
}

struct Fail(HcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult = Result<(), Fail>;

/// Runs `body`, recording errors and panics for [`hc_last_error_message`].
fn guard(body: impl FnOnce() -> FfiResult) -> HcStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in hopfcert".to_string());
            set_last_error(msg);
            HcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(HcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> FfiResult {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(HcStatus::Utf8, format!("{what} is not valid UTF-8")))
}

fn tolerance(eps: f64) -> Result<Tolerance, Fail> {
    Ok(Tolerance::new(eps)?)
}

fn capacity(max_dim: usize) -> Capacity {
    if max_dim == 0 {
        Capacity::default()
    } else {
        Capacity::with_max_dim(max_dim)
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// ABI version as `major * 10000 + minor * 100 + patch`.
#[no_mangle]
pub extern "C" fn hc_version() -> u32 {
    100 // 0.1.0
}

/// Message of the last failed call on this thread, or NULL.
/// The pointer stays valid until the next `hc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a model JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_from_json(json: *const c_char, out: *mut *mut HcModel) -> HcStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let model = parse_model(text)?;
        write_out(out, Box::into_raw(Box::new(HcModel(model))), "out")
    })
}

/// Model of `C(S_n)` evaluated at `num_points` permutations.
/// `images` holds `num_points * n` 1-based images, one permutation after another.
///
/// # Safety
/// `images` must point to `num_points * n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_from_permutations(
    n: usize,
    images: *const u32,
    num_points: usize,
    out: *mut *mut HcModel,
) -> HcStatus {
    guard(|| {
        if images.is_null() {
            return Err(null("images"));
        }
        let len = n.checked_mul(num_points).ok_or_else(|| Fail(HcStatus::InvalidInput, "size overflow".into()))?;
        let flat = std::slice::from_raw_parts(images, len);
        let points = flat
            .chunks(n.max(1))
            .map(|c| Permutation::from_images(&c.iter().map(|&x| x as usize).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>, _>>()?;
        let model = from_permutations(n, &points)?;
        write_out(out, Box::into_raw(Box::new(HcModel(model))), "out")
    })
}

/// Model of the Fourier matrix `F_n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_from_fourier(n: usize, tol: f64, out: *mut *mut HcModel) -> HcStatus {
    guard(|| {
        if n == 0 {
            return Err(Fail(HcStatus::InvalidInput, "Fourier size must be positive".into()));
        }
        let model = from_hadamard(&fourier(n), tolerance(tol)?)?;
        write_out(out, Box::into_raw(Box::new(HcModel(model))), "out")
    })
}

/// Serializes a model; free the result with [`hc_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_to_json(model: *const HcModel, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        let model = borrow(model, "model")?;
        write_out(out, into_c_string(model_to_json(&model.0)), "out")
    })
}

/// `n` of the model, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_model_n(model: *const HcModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.n())
}

/// `d` of the model, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_model_d(model: *const HcModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.d())
}

/// Counts violated model invariants; 0 means valid.
///
/// # Safety
/// `model` must be a live handle; `out_violations` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_model_validate(model: *const HcModel, tol: f64, out_violations: *mut usize) -> HcStatus {
    guard(|| {
        let model = borrow(model, "model")?;
        let report = validate_magic_unitary(&model.0, tolerance(tol)?);
        write_out(out_violations, report.violations.len(), "out_violations")
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_model_free(model: *mut HcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Parses an oracle descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_oracle_from_json(json: *const c_char, out: *mut *mut HcOracle) -> HcStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let oracle = parse_oracle(text)?;
        write_out(out, Box::into_raw(Box::new(HcOracle(oracle))), "out")
    })
}

/// `c_k = h(χ^k)` as a decimal string (`"14"` or `"7/2"`); free with [`hc_string_free`].
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_oracle_character_moment(
    oracle: *const HcOracle,
    k: usize,
    out: *mut *mut c_char,
) -> HcStatus {
    guard(|| {
        let oracle = borrow(oracle, "oracle")?;
        let c = oracle.0.character_moment(k)?;
        write_out(out, into_c_string(c.to_string()), "out")
    })
}

/// # Safety
/// `oracle` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_oracle_free(oracle: *mut HcOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// `#(1 ∈ T_k)`, counted by kernel rank and by the Cesàro projector; the
/// two must agree. `max_dim = 0` selects the default capacity.
///
/// # Safety
/// `model` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_multiplicity(
    model: *const HcModel,
    k: usize,
    tol: f64,
    max_dim: usize,
    out_count: *mut usize,
    out_marginal: *mut bool,
) -> HcStatus {
    guard(|| {
        let model = borrow(model, "model")?;
        let m = multiplicity_one(&model.0, k, Method::Both, tolerance(tol)?, capacity(max_dim))?;
        write_out(out_count, m.count, "out_count")?;
        write_out(out_marginal, m.marginal, "out_marginal")
    })
}

/// Value of the Cesàro-limit idempotent state on `u_{i_1 j_1}···u_{i_k j_k}`,
/// with 1-based `rows[t] = i_t` and `cols[t] = j_t`.
///
/// # Safety
/// `rows` and `cols` must point to `len` readable values; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_idempotent_eval(
    model: *const HcModel,
    rows: *const u32,
    cols: *const u32,
    len: usize,
    tol: f64,
    max_dim: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HcStatus {
    guard(|| {
        let model = borrow(model, "model")?;
        if rows.is_null() || cols.is_null() {
            return Err(null("rows/cols"));
        }
        let is = std::slice::from_raw_parts(rows, len);
        let js = std::slice::from_raw_parts(cols, len);
        let word = Word::new(is.iter().zip(js).map(|(&i, &j)| (i as usize, j as usize)).collect(), model.0.n())?;
        let v = idempotent_eval(&model.0, &word, tolerance(tol)?, capacity(max_dim))?.value();
        write_out(out_re, v.re, "out_re")?;
        write_out(out_im, v.im, "out_im")
    })
}

/// Certifies the model against the oracle up to `k_max`.
///
/// # Safety
/// `model` and `oracle` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_certify(
    model: *const HcModel,
    oracle: *const HcOracle,
    k_max: usize,
    tol: f64,
    max_dim: usize,
    out: *mut *mut HcReport,
) -> HcStatus {
    guard(|| {
        let model = borrow(model, "model")?;
        let oracle = borrow(oracle, "oracle")?;
        let report = certify(&model.0, &oracle.0, k_max, tolerance(tol)?, capacity(max_dim))
            .map_err(|f| Fail::from(f.error))?;
        write_out(out, Box::into_raw(Box::new(HcReport(report))), "out")
    })
}

/// Number of level records, or 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_report_num_levels(report: *const HcReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.levels.len())
}

/// Level record `index` (0-based). Fails with `INVALID_INPUT` when `c_k` does not fit in 64 bits.
///
/// # Safety
/// `report` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_report_level(
    report: *const HcReport,
    index: usize,
    out_k: *mut usize,
    out_m: *mut usize,
    out_c: *mut u64,
    out_marginal: *mut bool,
) -> HcStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        let level = report
            .0
            .levels
            .get(index)
            .ok_or_else(|| Fail(HcStatus::InvalidInput, format!("no level at index {index}")))?;
        let c = u64::try_from(&level.c_k)
            .map_err(|_| Fail(HcStatus::InvalidInput, format!("c_{} does not fit in 64 bits", level.k)))?;
        write_out(out_k, level.k, "out_k")?;
        write_out(out_m, level.m_k, "out_m")?;
        write_out(out_c, c, "out_c")?;
        write_out(out_marginal, level.marginal, "out_marginal")
    })
}

/// Verdict kind and its level (`k_max` when confirmed, the deciding `k` otherwise).
///
/// # Safety
/// `report` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_report_verdict(
    report: *const HcReport,
    out_kind: *mut HcVerdictKind,
    out_k: *mut usize,
) -> HcStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        let (kind, k) = match report.0.verdict {
            Verdict::ConfirmedUpTo { k_max, warnings: false } => (HcVerdictKind::Confirmed, k_max),
            Verdict::ConfirmedUpTo { k_max, warnings: true } => (HcVerdictKind::ConfirmedWithWarnings, k_max),
            Verdict::RefutedAt { k, .. } => (HcVerdictKind::Refuted, k),
            Verdict::Inconsistent { k, .. } => (HcVerdictKind::Inconsistent, k),
        };
        write_out(out_kind, kind, "out_kind")?;
        write_out(out_k, k, "out_k")
    })
}

/// The report as JSON, identical to the CLI's `--format json`; free with [`hc_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_report_to_json(report: *const HcReport, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        let mut text = serde_json::to_string_pretty(&certificate_json(&report.0)).expect("json value serializes");
        text.push('\n');
        write_out(out, into_c_string(text), "out")
    })
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_report_free(report: *mut HcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
