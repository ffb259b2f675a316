use std::ffi::{CStr, CString};
use std::ptr;

use minres_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    minres_string_free(s);
    out
}

unsafe fn parse(text: &str, residue: &str) -> Result<*mut MinresMap, (MinresStatus, String)> {
    let mut m = ptr::null_mut();
    match minres_map_parse(c(text).as_ptr(), c(residue).as_ptr(), &mut m) {
        MinresStatus::Ok => Ok(m),
        s => Err((s, CStr::from_ptr(minres_last_error()).to_str().unwrap().to_string())),
    }
}

#[test]
fn power_map_round_trip() {
    unsafe {
        let m = parse("z^2", "Q").unwrap();
        assert_eq!(minres_map_degree(m), 2);
        let mut s = ptr::null_mut();
        assert_eq!(minres_ordres_at(m, c("0,3/2").as_ptr(), &mut s), MinresStatus::Ok);
        assert_eq!(take(s), "3");
        assert_eq!(minres_min_res_loc_json(m, &mut s), MinresStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert!(v.is_object());
        assert_eq!(minres_crucial_json(m, &mut s), MinresStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(v["degree"], 2);
        minres_map_free(m);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let (s, msg) = parse("z^2 +", "Q").unwrap_err();
        assert_eq!(s, MinresStatus::ParseError);
        assert!(msg.contains("parse"), "{msg}");
        assert_eq!(parse("z^2", "F8").unwrap_err().0, MinresStatus::ParseError);
        assert_eq!(parse("z", "Q").unwrap_err().0, MinresStatus::Failure);
        let mut m = ptr::null_mut();
        assert_eq!(minres_map_parse(ptr::null(), c("Q").as_ptr(), &mut m), MinresStatus::NullArgument);
        assert_eq!(minres_map_parse(c("z^2").as_ptr(), c("Q").as_ptr(), ptr::null_mut()), MinresStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(minres_map_parse(bad.as_ptr().cast(), c("Q").as_ptr(), &mut m), MinresStatus::InvalidUtf8);
        let mut s = ptr::null_mut();
        assert_eq!(minres_crucial_json(ptr::null(), &mut s), MinresStatus::NullArgument);
        assert_eq!(minres_map_degree(ptr::null()), 0);
        minres_map_free(ptr::null_mut());
        minres_string_free(ptr::null_mut());
    }
}

#[test]
fn nonsplit_fixed_points() {
    unsafe {
        // Fixed points are the roots of z^2 + 1, which has none in F_7.
        let m = parse("(z^2 - 1)/(2z)", "F7").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(minres_crucial_json(m, &mut s), MinresStatus::ResidueExtensionRequired);
        assert!(s.is_null());
        minres_map_free(m);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/minres.h")).unwrap();
    for name in [
        "typedef struct MinresMap MinresMap",
        "MINRES_STATUS_RESIDUE_EXTENSION_REQUIRED",
        "minres_map_parse",
        "minres_map_free",
        "minres_ordres_at",
        "minres_min_res_loc_json",
        "minres_last_error",
        "minres_string_free",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}
