//! C ABI over `sharpbasis`.
//!
//! Objects cross the boundary as opaque handles (`SbCache`, `SbSeries`)
//! owned by the caller and released with the matching `*_free`. Every
//! fallible call returns an `SbStatus`; on failure `sb_last_error` gives
//! the message for the calling thread. Strings returned by the library are
//! NUL-terminated, heap-allocated and released with `sb_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sharpbasis::cli::exit_code;
use sharpbasis::{BasisCache, EtaCombination, QSeries, Space};

/// Result of a call. Codes 2-4 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    Usage = 2,
    Integrity = 3,
    Precision = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Memoized basis ladders.
pub struct SbCache(BasisCache);

/// A truncated q-series with exact rational coefficients.
pub struct SbSeries(QSeries);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &sharpbasis::Error) -> SbStatus {
    set_error(format!("{} ({})", e, e.kind()));
    match exit_code(e) {
        2 => SbStatus::Usage,
        4 => SbStatus::Precision,
        _ => SbStatus::Integrity,
    }
}

fn guard(f: impl FnOnce() -> SbStatus) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            SbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, SbStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(SbStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        SbStatus::InvalidUtf8
    })
}

fn out_string(s: String, out: *mut *mut c_char) -> SbStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            SbStatus::Ok
        }
        Err(_) => {
            set_error("string contains NUL");
            SbStatus::Integrity
        }
    }
}

macro_rules! nonnull {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("null argument: ", stringify!($p)));
            return SbStatus::NullArgument;
        })+
    };
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn sb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy of the last error message of this thread, or NULL if none.
#[no_mangle]
pub extern "C" fn sb_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New cache; `dir` may be NULL for an in-memory cache. Returns NULL on
/// error.
///
/// # Safety
/// `dir` must be NULL or a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sb_cache_new(dir: *const c_char) -> *mut SbCache {
    let mut out = ptr::null_mut();
    let _ = guard(|| {
        let cache = if dir.is_null() {
            BasisCache::new()
        } else {
            let d = match str_arg(dir) {
                Ok(d) => d,
                Err(s) => return s,
            };
            match BasisCache::with_dir(d) {
                Ok(c) => c,
                Err(e) => return status_of(&e),
            }
        };
        out = Box::into_raw(Box::new(SbCache(cache)));
        SbStatus::Ok
    });
    out
}

/// Writes the cache's ladders to its directory, if it has one.
///
/// # Safety
/// `cache` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_cache_persist(cache: *const SbCache) -> SbStatus {
    nonnull!(cache);
    guard(|| match (*cache).0.persist() {
        Ok(_) => SbStatus::Ok,
        Err(e) => status_of(&e),
    })
}

/// # Safety
/// `cache` must come from `sb_cache_new` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sb_cache_free(cache: *mut SbCache) {
    if !cache.is_null() {
        drop(Box::from_raw(cache));
    }
}

/// `f_{k,m}` (`space` = 'M') or `g_{k,m}` (`space` = 'S') of level
/// `level`, truncated below `q^prec`.
///
/// # Safety
/// `cache` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sb_element(
    cache: *const SbCache,
    level: i64,
    weight: i64,
    space: c_char,
    m: i64,
    prec: i64,
    out: *mut *mut SbSeries,
) -> SbStatus {
    nonnull!(cache, out);
    guard(|| {
        let space = match space as u8 {
            b'M' | b'm' => Space::M,
            b'S' | b's' => Space::S,
            _ => {
                set_error("space must be 'M' or 'S'");
                return SbStatus::Usage;
            }
        };
        match (*cache).0.element(level, weight, space, m, prec) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(SbSeries(e.expansion.truncate(prec))));
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Expansion of an eta combination such as `"eta(2)^6 * eta(3)^8 *
/// eta(6)^-10"` on level `level`, known below `q^prec`.
///
/// # Safety
/// `expr` must be a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sb_eta_expand(level: u64, expr: *const c_char, prec: i64, out: *mut *mut SbSeries) -> SbStatus {
    nonnull!(out);
    guard(|| {
        let text = match str_arg(expr) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match EtaCombination::parse(level, text).and_then(|c| c.expand(prec)) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(SbSeries(s)));
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_series_valuation(s: *const SbSeries) -> i64 {
    if s.is_null() {
        return 0;
    }
    (*s).0.valuation()
}

/// Exclusive precision bound.
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_series_prec(s: *const SbSeries) -> i64 {
    if s.is_null() {
        return 0;
    }
    (*s).0.prec()
}

/// Coefficient of `q^n` as a decimal string (`"p/q"` if not integral).
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sb_series_coeff(s: *const SbSeries, n: i64, out: *mut *mut c_char) -> SbStatus {
    nonnull!(s, out);
    guard(|| match (*s).0.coeff(n) {
        Ok(c) => out_string(c.to_string(), out),
        Err(e) => status_of(&e),
    })
}

/// First `terms` nonzero terms, e.g. `"q^-1 + 6q + 4q^2 - 3q^3"`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sb_series_render(s: *const SbSeries, terms: usize, out: *mut *mut c_char) -> SbStatus {
    nonnull!(s, out);
    guard(|| out_string((*s).0.render_terms(terms), out))
}

/// JSON form of the series.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sb_series_to_json(s: *const SbSeries, out: *mut *mut c_char) -> SbStatus {
    nonnull!(s, out);
    guard(|| match serde_json::to_string(&(*s).0) {
        Ok(j) => out_string(j, out),
        Err(e) => status_of(&e.into()),
    })
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sb_series_free(s: *mut SbSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs the duality check on `m <= m_max`, `n <= n_max`. `passed` gets 1 or
/// 0; `report_json`, if not NULL, gets the full report.
///
/// # Safety
/// `cache` must be a live handle, `passed` writable, `report_json` NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sb_verify_duality(
    cache: *const SbCache,
    level: i64,
    weight: i64,
    m_max: i64,
    n_max: i64,
    passed: *mut c_int,
    report_json: *mut *mut c_char,
) -> SbStatus {
    nonnull!(cache, passed);
    guard(|| match sharpbasis::verify::duality_check(&(*cache).0, level, weight, m_max, n_max) {
        Ok(r) => {
            *passed = c_int::from(r.passed);
            if report_json.is_null() {
                return SbStatus::Ok;
            }
            match serde_json::to_string(&r) {
                Ok(j) => out_string(j, report_json),
                Err(e) => status_of(&e.into()),
            }
        }
        Err(e) => status_of(&e),
    })
}
