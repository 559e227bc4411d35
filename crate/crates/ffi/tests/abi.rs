use std::ffi::{c_char, c_int, CStr, CString};
use std::process::Command;
use std::ptr;

use sharpbasis_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    sb_string_free(s);
    out
}

#[test]
fn version_matches_the_core_crate() {
    let v = unsafe { CStr::from_ptr(sb_version()) }.to_str().unwrap();
    assert_eq!(v, sharpbasis::TOOL_VERSION);
}

#[test]
fn element_round_trip() {
    unsafe {
        let cache = sb_cache_new(ptr::null());
        assert!(!cache.is_null());
        let mut s = ptr::null_mut();
        assert_eq!(sb_element(cache, 6, 0, b'M' as c_char, 1, 20, &mut s), SbStatus::Ok);
        assert_eq!(sb_series_valuation(s), -1);
        assert_eq!(sb_series_prec(s), 20);
        let mut text = ptr::null_mut();
        assert_eq!(sb_series_render(s, 4, &mut text), SbStatus::Ok);
        assert_eq!(take(text), "q^-1 + 6q + 4q^2 - 3q^3");
        let mut c = ptr::null_mut();
        assert_eq!(sb_series_coeff(s, 2, &mut c), SbStatus::Ok);
        assert_eq!(take(c), "4");
        assert_eq!(sb_series_coeff(s, 20, &mut c), SbStatus::Precision);
        assert!(take(sb_last_error()).contains("PrecisionExceeded"));
        let mut j = ptr::null_mut();
        assert_eq!(sb_series_to_json(s, &mut j), SbStatus::Ok);
        let parsed: sharpbasis::QSeries = serde_json::from_str(&take(j)).unwrap();
        assert_eq!(parsed.render_terms(4), "q^-1 + 6q + 4q^2 - 3q^3");
        sb_series_free(s);
        sb_cache_free(cache);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let cache = sb_cache_new(ptr::null());
        let mut s = ptr::null_mut();
        assert_eq!(sb_element(cache, 7, 0, b'M' as c_char, 1, 20, &mut s), SbStatus::Usage);
        assert!(take(sb_last_error()).contains("UnsupportedLevel"));
        assert_eq!(sb_element(cache, 6, 0, b'X' as c_char, 1, 20, &mut s), SbStatus::Usage);
        assert_eq!(sb_element(ptr::null(), 6, 0, b'M' as c_char, 1, 20, &mut s), SbStatus::NullArgument);
        let bad = CString::new("eta(12)^2 * eta(18)").unwrap();
        assert_eq!(sb_eta_expand(18, bad.as_ptr(), 10, &mut s), SbStatus::Integrity);
        assert!(take(sb_last_error()).contains("FractionalValuation"));
        sb_cache_free(cache);
        sb_series_free(ptr::null_mut());
        sb_string_free(ptr::null_mut());
    }
}

#[test]
fn eta_and_duality() {
    unsafe {
        let expr = CString::new("eta(2)^6 * eta(3)^8 * eta(6)^-10").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(sb_eta_expand(6, expr.as_ptr(), 10, &mut s), SbStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(sb_series_render(s, 4, &mut text), SbStatus::Ok);
        assert_eq!(take(text), "q^-1 - 6q - 8q^2 + 9q^3");
        sb_series_free(s);

        let dir = tempfile::tempdir().unwrap();
        let d = CString::new(dir.path().to_str().unwrap()).unwrap();
        let cache = sb_cache_new(d.as_ptr());
        let mut passed: c_int = -1;
        let mut json = ptr::null_mut();
        assert_eq!(sb_verify_duality(cache, 6, 0, 6, 6, &mut passed, &mut json), SbStatus::Ok);
        assert_eq!(passed, 1);
        let report: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(report["check"], "duality");
        assert_eq!(sb_cache_persist(cache), SbStatus::Ok);
        sb_cache_free(cache);
        assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 2);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/sharpbasis.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["sb_version", "sb_last_error", "sb_cache_new", "sb_element", "sb_eta_expand", "sb_series_free", "sb_verify_duality"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
