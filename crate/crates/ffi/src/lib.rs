//! C ABI over `sdqc-core`.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free`. Every entry point returns an [`SdqcStatus`]; on
//! failure a message is available from [`sdqc_last_error_message`] on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sdqc_core::hull::{hsdqc, slope_report, HullResult};
use sdqc_core::membership::{membership_with, Verdict};
use sdqc_core::{invariants, PlanarSet, SdqcError, SymMatrix};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdqcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    EmptySet = 4,
    Degenerate = 5,
    NotConverged = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdqcVerdict {
    Member = 0,
    PhiMemberOnly = 1,
    NotMember = 2,
}

/// Opaque planar set.
pub struct SdqcPlanarSet {
    set: PlanarSet,
}

/// Opaque hull computed from a planar set.
pub struct SdqcHull {
    set: PlanarSet,
    hull: HullResult,
    rel_tol: f64,
    slope_held: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &SdqcError) -> SdqcStatus {
    match e {
        SdqcError::Parse(_) => SdqcStatus::Parse,
        SdqcError::EmptySet => SdqcStatus::EmptySet,
        SdqcError::DegenerateBase(_)
        | SdqcError::DegenerateTangency(_)
        | SdqcError::DomainError(_) => SdqcStatus::Degenerate,
        SdqcError::NotConverged { .. } => SdqcStatus::NotConverged,
        _ => SdqcStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SdqcStatus, String)>) -> SdqcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdqcStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            SdqcStatus::Panic
        }
    }
}

fn core_err(e: SdqcError) -> (SdqcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SdqcStatus, String) {
    (SdqcStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `rows` must point to `n * n` readable doubles.
unsafe fn read_matrix(rows: *const f64, n: usize) -> Result<SymMatrix, (SdqcStatus, String)> {
    if rows.is_null() {
        return Err(null("rows"));
    }
    if n != 2 && n != 3 {
        return Err(core_err(SdqcError::InvalidDimension(n)));
    }
    let flat = std::slice::from_raw_parts(rows, n * n);
    let rows: Vec<Vec<f64>> = flat.chunks(n).map(|r| r.to_vec()).collect();
    SymMatrix::from_rows(&rows).map_err(core_err)
}

/// Pressure and shear invariants of a symmetric `n×n` matrix (`n` = 2 or 3),
/// given row-major.
///
/// # Safety
/// `rows` must point to `n * n` doubles; `p_out` and `q_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_phi(rows: *const f64, n: usize, p_out: *mut f64, q_out: *mut f64) -> SdqcStatus {
    guard(|| {
        if p_out.is_null() || q_out.is_null() {
            return Err(null("output"));
        }
        let m = read_matrix(rows, n)?;
        let y = invariants::phi(&m);
        *p_out = y.p;
        *q_out = y.q;
        Ok(())
    })
}

/// `(n-1)|F|² - (Tr F)²` for a row-major `n×n` matrix.
///
/// # Safety
/// `rows` must point to `n * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_tartar(rows: *const f64, n: usize, out: *mut f64) -> SdqcStatus {
    guard(|| {
        if rows.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        if n != 2 && n != 3 {
            return Err(core_err(SdqcError::InvalidDimension(n)));
        }
        let flat = std::slice::from_raw_parts(rows, n * n);
        let rows: Vec<Vec<f64>> = flat.chunks(n).map(|r| r.to_vec()).collect();
        let m = sdqc_core::Matrix::from_rows(&rows).map_err(core_err)?;
        *out = invariants::tartar_f(&m);
        Ok(())
    })
}

/// Parses a planar set from its JSON description.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_planar_set_from_json(
    json: *const c_char,
    out: *mut *mut SdqcPlanarSet,
) -> SdqcStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (SdqcStatus::Parse, format!("input is not UTF-8: {e}")))?;
        let set = PlanarSet::from_json(text).map_err(core_err)?;
        *out = Box::into_raw(Box::new(SdqcPlanarSet { set }));
        Ok(())
    })
}

/// # Safety
/// `set` must come from [`sdqc_planar_set_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sdqc_planar_set_free(set: *mut SdqcPlanarSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Hull of `set` on `resolution` grid nodes; `rel_tol <= 0` selects the default.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_hull_new(
    set: *const SdqcPlanarSet,
    resolution: usize,
    rel_tol: f64,
    out: *mut *mut SdqcHull,
) -> SdqcStatus {
    guard(|| {
        if set.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        *out = ptr::null_mut();
        if resolution < 2 {
            return Err((SdqcStatus::InvalidArgument, format!("resolution {resolution} < 2")));
        }
        let rel_tol = if rel_tol > 0.0 { rel_tol } else { sdqc_core::hull::DEFAULT_REL_TOL };
        let set = (*set).set.clone();
        let hull = hsdqc(&set, resolution, rel_tol).map_err(core_err)?;
        let slope_held = slope_report(&hull.region, &hull.hhat, hull.tol.max(1e-9)).held;
        *out = Box::into_raw(Box::new(SdqcHull { set, hull, rel_tol, slope_held }));
        Ok(())
    })
}

/// # Safety
/// `hull` must come from [`sdqc_hull_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sdqc_hull_free(hull: *mut SdqcHull) {
    if !hull.is_null() {
        drop(Box::from_raw(hull));
    }
}

/// Number of grid nodes.
///
/// # Safety
/// `hull` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_hull_len(hull: *const SdqcHull, out: *mut usize) -> SdqcStatus {
    guard(|| {
        if hull.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        *out = (*hull).hull.region.grid.len();
        Ok(())
    })
}

/// Node `i`: its abscissa, the envelope value and whether it is defined.
///
/// # Safety
/// `hull` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_hull_node(
    hull: *const SdqcHull,
    i: usize,
    p: *mut f64,
    psi: *mut f64,
    defined: *mut bool,
) -> SdqcStatus {
    guard(|| {
        if hull.is_null() || p.is_null() || psi.is_null() || defined.is_null() {
            return Err(null("argument"));
        }
        let r = &(*hull).hull.region;
        if i >= r.grid.len() {
            return Err((SdqcStatus::OutOfRange, format!("node {i} >= {}", r.grid.len())));
        }
        *p = r.grid.node(i);
        *psi = r.psi[i].unwrap_or(f64::NAN);
        *defined = r.psi[i].is_some();
        Ok(())
    })
}

/// # Safety
/// `hull` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_hull_connected(hull: *const SdqcHull, out: *mut bool) -> SdqcStatus {
    guard(|| {
        if hull.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        *out = (*hull).hull.connected;
        Ok(())
    })
}

/// # Safety
/// `hull` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_hull_slope_condition(hull: *const SdqcHull, out: *mut bool) -> SdqcStatus {
    guard(|| {
        if hull.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        *out = (*hull).slope_held;
        Ok(())
    })
}

/// Classifies a row-major symmetric `n×n` matrix against the hull.
///
/// # Safety
/// `hull` must be a live handle; `rows` must point to `n * n` doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdqc_hull_membership(
    hull: *const SdqcHull,
    rows: *const f64,
    n: usize,
    out: *mut SdqcVerdict,
) -> SdqcStatus {
    guard(|| {
        if hull.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let sigma = read_matrix(rows, n)?;
        let h = &*hull;
        let v = membership_with(&sigma, &h.set, &h.hull, h.rel_tol).map_err(core_err)?;
        *out = match v.verdict {
            Verdict::Member => SdqcVerdict::Member,
            Verdict::PhiMemberOnly => SdqcVerdict::PhiMemberOnly,
            Verdict::NotMember => SdqcVerdict::NotMember,
        };
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sdqc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sdqc_status_message(status: SdqcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SdqcStatus::Ok => c"ok",
        SdqcStatus::NullPointer => c"null pointer argument",
        SdqcStatus::InvalidArgument => c"invalid argument",
        SdqcStatus::Parse => c"parse error",
        SdqcStatus::EmptySet => c"empty planar set",
        SdqcStatus::Degenerate => c"degenerate input",
        SdqcStatus::NotConverged => c"iteration did not converge",
        SdqcStatus::OutOfRange => c"index out of range",
        SdqcStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
