//! C ABI for `kstab`.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every fallible call returns a [`KstabStatus`]; on failure the message is
//! available from [`kstab_last_error`] on the same thread. Strings handed
//! out by the library are NUL-terminated and released with
//! [`kstab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kstab::flag::{FlagIdeal, Mode};
use kstab::io;
use kstab::weight::FitOptions;
use kstab::{intersection, weight, Error, PolarizedToricVariety};

/// Status codes, numerically equal to the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KstabStatus {
    Ok = 0,
    InvalidInput = 1,
    /// Fits did not stabilize, or the exponent `r` is too small.
    NotStabilized = 2,
    CrossCheckFailed = 3,
    NullPointer = 4,
    Internal = 5,
}

/// Opaque polarized toric variety.
pub struct KstabVariety {
    inner: PolarizedToricVariety,
}

/// Opaque validated flag ideal, bound to the variety it was parsed against.
pub struct KstabFlagIdeal {
    inner: FlagIdeal,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KstabStatus {
    set_error(&e.to_string());
    match e.exit_code() {
        2 => KstabStatus::NotStabilized,
        _ => KstabStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> KstabStatus) -> KstabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == KstabStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => {
            set_error("internal error");
            KstabStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, KstabStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(KstabStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        KstabStatus::InvalidInput
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> KstabStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            KstabStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            KstabStatus::Internal
        }
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null pointer argument");
            return KstabStatus::NullPointer;
        }
    };
}

/// Message of the last failed call on this thread (empty after success).
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn kstab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn kstab_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"",
    };
    VERSION.as_ptr()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kstab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a variety descriptor such as
/// `{"type":"projective_space","n":2,"d":2}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kstab_variety_from_json(json: *const c_char, out: *mut *mut KstabVariety) -> KstabStatus {
    guard(|| {
        non_null!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let parsed = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
            .and_then(|v| io::parse_variety(&v));
        match parsed {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(KstabVariety { inner }));
                KstabStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `v` must come from [`kstab_variety_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kstab_variety_free(v: *mut KstabVariety) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kstab_variety_dim(v: *const KstabVariety, out: *mut usize) -> KstabStatus {
    guard(|| {
        non_null!(v, out);
        *out = (*v).inner.dim();
        KstabStatus::Ok
    })
}

/// Number of lattice points of `k·P`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kstab_ehrhart_count(v: *const KstabVariety, k: u64, out: *mut u64) -> KstabStatus {
    guard(|| {
        non_null!(v, out);
        *out = (*v).inner.ehrhart_count(k);
        KstabStatus::Ok
    })
}

/// `(Lⁿ)` and `(L^{n−1}.K_X)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kstab_intersection_numbers(
    v: *const KstabVariety,
    top: *mut i64,
    canonical: *mut i64,
) -> KstabStatus {
    guard(|| {
        non_null!(v, top, canonical);
        let nums = (*v).inner.intersection_numbers();
        *top = nums.top;
        *canonical = nums.canonical;
        KstabStatus::Ok
    })
}

/// Parses and validates a flag ideal such as
/// `{"N":1,"mode":"chart","ideals":[{"gens":[[2]]}]}` against `v`.
///
/// # Safety
/// Pointers must be valid; `json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn kstab_flag_ideal_from_json(
    v: *const KstabVariety,
    json: *const c_char,
    out: *mut *mut KstabFlagIdeal,
) -> KstabStatus {
    guard(|| {
        non_null!(v, out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let variety = &(*v).inner;
        let parsed = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
            .and_then(|j| io::parse_flag(&j, variety))
            .and_then(|raw| FlagIdeal::validate(raw, variety));
        match parsed {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(KstabFlagIdeal { inner }));
                KstabStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `f` must come from [`kstab_flag_ideal_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kstab_flag_ideal_free(f: *mut KstabFlagIdeal) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Whether the flag ideal is in Cox mode (1) or chart mode (0).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kstab_flag_ideal_is_cox(f: *const KstabFlagIdeal, out: *mut i32) -> KstabStatus {
    guard(|| {
        non_null!(f, out);
        *out = i32::from((*f).inner.mode() == Mode::Cox);
        KstabStatus::Ok
    })
}

/// Counting-route invariant at exponent `r` as a `"p/q"` string.
///
/// # Safety
/// Pointers must be valid; `f` must have been parsed against `v`.
#[no_mangle]
pub unsafe extern "C" fn kstab_df_counting(
    v: *const KstabVariety,
    f: *const KstabFlagIdeal,
    r: u32,
    out: *mut *mut c_char,
) -> KstabStatus {
    guard(|| {
        non_null!(v, f, out);
        match weight::df_counting(&(*v).inner, &(*f).inner, r, &FitOptions::default()) {
            Ok(res) => write_string(out, kstab::exact::to_string(&res.df)),
            Err(e) => status_of(&e),
        }
    })
}

/// Intersection-route decomposition at exponent `r` as JSON.
///
/// # Safety
/// Pointers must be valid; `f` must have been parsed against `v`.
#[no_mangle]
pub unsafe extern "C" fn kstab_df_intersection_json(
    v: *const KstabVariety,
    f: *const KstabFlagIdeal,
    r: u32,
    out: *mut *mut c_char,
) -> KstabStatus {
    guard(|| {
        non_null!(v, f, out);
        match intersection::df_intersection(&(*v).inner, &(*f).inner, r) {
            Ok(rep) => write_string(out, io::to_json(&rep)),
            Err(e) => status_of(&e),
        }
    })
}

/// Runs a complete `compute` job document and returns the JSON output. On
/// a failed job the output holds the error payload and the status mirrors
/// the CLI exit code.
///
/// # Safety
/// `job` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn kstab_compute_json(job: *const c_char, out: *mut *mut c_char) -> KstabStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let text = match read_str(job) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
        let code = kstab::cli::run(["kstab", "compute", "--no-cache"], &mut text.as_bytes(), &mut stdout, &mut stderr);
        let status = match code {
            0 => KstabStatus::Ok,
            1 => KstabStatus::InvalidInput,
            2 => KstabStatus::NotStabilized,
            3 => KstabStatus::CrossCheckFailed,
            _ => KstabStatus::Internal,
        };
        if status != KstabStatus::Ok {
            set_error(String::from_utf8_lossy(&stderr).trim());
        }
        match write_string(out, String::from_utf8_lossy(&stdout).into_owned()) {
            KstabStatus::Ok => status,
            other => other,
        }
    })
}
