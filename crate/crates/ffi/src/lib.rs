//! C ABI over `umm-edge`.
//!
//! Every entry point returns a [`UmmStatus`] code and writes results through out-pointers.
//! Objects cross the boundary as opaque handles released with the matching `_free`
//! function. The message of the last failure on the calling thread is available from
//! [`umm_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use umm_edge::edgelab::{self, EdgeModel};
use umm_edge::equilibrium::{self, EdgeConstants, EquilibriumData, Potential};
use umm_edge::{airy, fredholm, Error};

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UmmStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Domain = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// Edge constants of a solved equilibrium problem.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UmmEdgeConstants {
    pub theta: f64,
    pub p_at_edge: f64,
    pub p_theta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub a_operator: f64,
    pub edge_scale: f64,
}

impl From<&EdgeConstants> for UmmEdgeConstants {
    fn from(ec: &EdgeConstants) -> Self {
        UmmEdgeConstants {
            theta: ec.theta,
            p_at_edge: ec.p_at_edge,
            p_theta: ec.p_theta,
            gamma: ec.gamma,
            a: ec.a,
            b: ec.b,
            a_operator: ec.a_operator,
            edge_scale: ec.edge_scale,
        }
    }
}

/// Opaque solved equilibrium problem.
pub struct UmmEquilibrium {
    eq: EquilibriumData,
    ec: EdgeConstants,
}

/// Opaque finite-n edge model: Verblunsky coefficients, kernel and edge constants.
pub struct UmmEdgeModel {
    model: EdgeModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> UmmStatus {
    match e {
        Error::Validation { .. } | Error::Json(_) => UmmStatus::Validation,
        Error::Domain(_) => UmmStatus::Domain,
        Error::Numerical(_) => UmmStatus::Numerical,
        Error::Io(_) => UmmStatus::Io,
    }
}

fn guard<F>(f: F) -> UmmStatus
where
    F: FnOnce() -> Result<(), UmmFailure> + UnwindSafe,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(f) {
        Ok(Ok(())) => UmmStatus::Ok,
        Ok(Err(UmmFailure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            UmmStatus::NullPointer
        }
        Ok(Err(UmmFailure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            UmmStatus::Panic
        }
    }
}

enum UmmFailure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for UmmFailure {
    fn from(e: Error) -> Self {
        UmmFailure::Lib(e)
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, UmmFailure> {
    p.as_mut().ok_or(UmmFailure::Null(what))
}

unsafe fn potential(coeffs: *const f64, len: usize) -> Result<Potential, UmmFailure> {
    if coeffs.is_null() && len > 0 {
        return Err(UmmFailure::Null("coeffs"));
    }
    let c = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(coeffs, len).to_vec() };
    Ok(Potential::polynomial(c)?)
}

unsafe fn intervals(bounds: *const f64, count: usize) -> Result<Vec<(f64, f64)>, UmmFailure> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if bounds.is_null() {
        return Err(UmmFailure::Null("intervals"));
    }
    Ok(std::slice::from_raw_parts(bounds, 2 * count).chunks(2).map(|p| (p[0], p[1])).collect())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length in bytes, 0 when there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn umm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn umm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Solves the one-cut equilibrium problem for `V(x) = Σ coeffs[k] x^k`.
///
/// # Safety
/// `coeffs` must be valid for `len` reads; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn umm_equilibrium_new(
    coeffs: *const f64,
    len: usize,
    out: *mut *mut UmmEquilibrium,
) -> UmmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let pot = potential(coeffs, len)?;
        let eq = equilibrium::solve_support(&pot, edgelab::SUPPORT_TOL)?;
        let ec = equilibrium::edge_constants(&eq)?;
        *out = Box::into_raw(Box::new(UmmEquilibrium { eq, ec }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`umm_equilibrium_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn umm_equilibrium_free(h: *mut UmmEquilibrium) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_equilibrium_constants(h: *const UmmEquilibrium, out: *mut UmmEdgeConstants) -> UmmStatus {
    guard(|| {
        let h = h.as_ref().ok_or(UmmFailure::Null("handle"))?;
        *out_ref(out, "out")? = UmmEdgeConstants::from(&h.ec);
        Ok(())
    })
}

/// Equilibrium density at angle `lambda`; zero outside the support.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_equilibrium_density(h: *const UmmEquilibrium, lambda: f64, out: *mut f64) -> UmmStatus {
    guard(|| {
        let h = h.as_ref().ok_or(UmmFailure::Null("handle"))?;
        let out = out_ref(out, "out")?;
        if !lambda.is_finite() {
            return Err(Error::validation("lambda", "must be finite").into());
        }
        *out = h.eq.density(lambda);
        Ok(())
    })
}

/// Builds the degree-`n` edge model for `V(x) = Σ coeffs[k] x^k` at the default precision.
///
/// # Safety
/// `coeffs` must be valid for `len` reads; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn umm_edge_model_new(
    coeffs: *const f64,
    len: usize,
    n: usize,
    out: *mut *mut UmmEdgeModel,
) -> UmmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let pot = potential(coeffs, len)?;
        let model = EdgeModel::build(&pot, n, None, None)?;
        *out = Box::into_raw(Box::new(UmmEdgeModel { model }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`umm_edge_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn umm_edge_model_free(h: *mut UmmEdgeModel) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_edge_model_constants(h: *const UmmEdgeModel, out: *mut UmmEdgeConstants) -> UmmStatus {
    guard(|| {
        let h = h.as_ref().ok_or(UmmFailure::Null("handle"))?;
        *out_ref(out, "out")? = UmmEdgeConstants::from(&h.model.ec);
        Ok(())
    })
}

/// Half-width of the edge window in rescaled coordinates.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_edge_model_window(h: *const UmmEdgeModel, out: *mut f64) -> UmmStatus {
    guard(|| {
        let h = h.as_ref().ok_or(UmmFailure::Null("handle"))?;
        *out_ref(out, "out")? = h.model.window();
        Ok(())
    })
}

/// Edge-rescaled finite-n kernel at `(x, y)`.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_edge_model_kernel(h: *const UmmEdgeModel, x: f64, y: f64, out: *mut f64) -> UmmStatus {
    guard(|| {
        let h = h.as_ref().ok_or(UmmFailure::Null("handle"))?;
        let out = out_ref(out, "out")?;
        *out = h.model.rescaled_kernel(x, y)?;
        Ok(())
    })
}

/// Limit kernel at `(x, y)` for the model's edge constants.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_edge_model_limit_kernel(h: *const UmmEdgeModel, x: f64, y: f64, out: *mut f64) -> UmmStatus {
    guard(|| {
        let h = h.as_ref().ok_or(UmmFailure::Null("handle"))?;
        let out = out_ref(out, "out")?;
        *out = edgelab::limit_kernel(&h.model.ec, x, y)?;
        Ok(())
    })
}

/// Finite-n hole probability of the union of `count` rescaled intervals
/// `[bounds[2i], bounds[2i+1]]`, Nyström order `order` per interval.
///
/// # Safety
/// `h` must be a live handle; `bounds` must be valid for `2 * count` reads; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_edge_model_hole(
    h: *const UmmEdgeModel,
    bounds: *const f64,
    count: usize,
    order: usize,
    out: *mut f64,
) -> UmmStatus {
    guard(|| {
        let h = h.as_ref().ok_or(UmmFailure::Null("handle"))?;
        let out = out_ref(out, "out")?;
        let iv = intervals(bounds, count)?;
        let m = &h.model;
        *out = fredholm::finite_n_hole(&m.ke, &m.eq, &m.ec, &iv, m.n, order)?.value;
        Ok(())
    })
}

/// Airy kernel `Q_Ai(x, y)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_airy_kernel(x: f64, y: f64, out: *mut f64) -> UmmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = airy::airy_kernel(x, y)?;
        Ok(())
    })
}

/// `det(1 − Q_Ai)` on the union of `count` intervals `[bounds[2i], bounds[2i+1]]`.
///
/// # Safety
/// `bounds` must be valid for `2 * count` reads; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_airy_gap(bounds: *const f64, count: usize, order: usize, out: *mut f64) -> UmmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let iv = intervals(bounds, count)?;
        *out = fredholm::airy_gap(&iv, order)?;
        Ok(())
    })
}

/// Tracy–Widom `F₂(s)` with the default tail cut-off.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn umm_tracy_widom(s: f64, order: usize, out: *mut f64) -> UmmStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = fredholm::tracy_widom(s, fredholm::DEFAULT_TAIL, order)?;
        Ok(())
    })
}
