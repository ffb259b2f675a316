//! C ABI over `minres`. Maps live behind an opaque handle; structured results come back as
//! JSON strings that the caller releases with [`minres_string_free`].
//!
//! Every fallible entry point returns a [`MinresStatus`] and writes its result through an
//! out pointer only on success. The message for the most recent failure on the calling
//! thread is available from [`minres_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use minres::berktree::BerkPoint;
use minres::crucial::crucial_set;
use minres::error::Error;
use minres::forms::MapRep;
use minres::minresloc::min_res_loc;
use minres::ordres::ordres_at;
use minres::ring::{fmt_exp, ResidueField};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinresStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The map, point or residue field text did not parse.
    ParseError = 3,
    /// Fixed points or preimages do not split over the residue field.
    ResidueExtensionRequired = 4,
    /// Independent computations of the same quantity disagreed.
    CrossCheckFailure = 5,
    /// Any other library error.
    Failure = 6,
    /// The library panicked; this is a bug.
    Panic = 7,
}

impl From<&Error> for MinresStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidField(_) => MinresStatus::ParseError,
            Error::ResidueExtensionRequired(_) => MinresStatus::ResidueExtensionRequired,
            Error::CrossCheckFailure(_) => MinresStatus::CrossCheckFailure,
            _ => MinresStatus::Failure,
        }
    }
}

/// A rational map of degree at least 2 in normalized form.
pub struct MinresMap {
    inner: MapRep,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Status(MinresStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status and recording the message.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> MinresStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MinresStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            MinresStatus::from(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal error: {msg}"));
            MinresStatus::Panic
        }
    }
}

/// # Safety
/// `s` is null or a nul-terminated string.
unsafe fn str_arg<'a>(s: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Status(MinresStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail::Status(MinresStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

/// # Safety
/// `m` is null or a handle from [`minres_map_parse`] that has not been freed.
unsafe fn map_arg<'a>(m: *const MinresMap) -> Result<&'a MapRep, Fail> {
    m.as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| Fail::Status(MinresStatus::NullArgument, "map is null".into()))
}

/// # Safety
/// `out` is null or writable.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(MinresStatus::NullArgument, "out is null".into()));
    }
    *out = CString::new(s).expect("no interior nul").into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Parses a rational function such as `(z^3 - (1+t)*z^2)/(-t)` over the residue field
/// `residue` (`"Q"` or `"F<p>"`) and stores a new handle in `*out`.
///
/// # Safety
/// `text` and `residue` are nul-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn minres_map_parse(
    text: *const c_char,
    residue: *const c_char,
    out: *mut *mut MinresMap,
) -> MinresStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let field = ResidueField::parse(str_arg(residue, "residue")?)?;
        if out.is_null() {
            return Err(Fail::Status(MinresStatus::NullArgument, "out is null".into()));
        }
        let inner = minres::cli::parse_map(text, field)?;
        *out = Box::into_raw(Box::new(MinresMap { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `map` is null or a live handle from [`minres_map_parse`].
#[no_mangle]
pub unsafe extern "C" fn minres_map_free(map: *mut MinresMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Degree of the map, or 0 for a null handle.
///
/// # Safety
/// `map` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn minres_map_degree(map: *const MinresMap) -> u32 {
    map.as_ref().map_or(0, |m| m.inner.degree() as u32)
}

/// `ordRes` at the type II point written `center,depth` (for example `"0,1/2"`), as an
/// exact rational string.
///
/// # Safety
/// `map` is a live handle, `point` a nul-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn minres_ordres_at(
    map: *const MinresMap,
    point: *const c_char,
    out: *mut *mut c_char,
) -> MinresStatus {
    guard(|| {
        let phi = map_arg(map)?;
        let p = BerkPoint::parse(str_arg(point, "point")?, phi.field())?;
        let v = ordres_at(phi, &p)?;
        put_string(out, fmt_exp(&v))
    })
}

/// The crucial set with weights and reduction types, as JSON.
///
/// # Safety
/// `map` is a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn minres_crucial_json(map: *const MinresMap, out: *mut *mut c_char) -> MinresStatus {
    guard(|| {
        let phi = map_arg(map)?;
        put_string(out, to_json(&crucial_set(phi)?))
    })
}

/// The minimal resultant locus with its cross-validation certificates, as JSON.
///
/// # Safety
/// `map` is a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn minres_min_res_loc_json(map: *const MinresMap, out: *mut *mut c_char) -> MinresStatus {
    guard(|| {
        let phi = map_arg(map)?;
        put_string(out, to_json(&min_res_loc(phi)?))
    })
}

/// Message for the most recent failure on this thread, or null. The pointer stays valid
/// until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn minres_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned through an out pointer. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn minres_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
