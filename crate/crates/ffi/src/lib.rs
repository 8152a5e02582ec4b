//! C ABI for the `semispray` crate.
//!
//! Objects are opaque handles created by `ss_*_new` and released by the
//! matching `ss_*_free`. Every fallible call returns an [`SsStatus`]; on a
//! non-zero status [`ss_last_error`] describes the failure for the calling
//! thread. Strings handed out by the library are released with
//! [`ss_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use semispray::expr::{Point, ZeroTestConfig};
use semispray::forms::{Lagrangian, SemiBasicOneForm};
use semispray::geometry::{classify, Semispray};
use semispray::helmholtz::{
    semispray_from_lagrangian, variationality_verdict, verify_lagrangian, HelmholtzError, Verdict,
};
use semispray::numeric::integrate_geodesic;
use semispray::spencer::symbol_dims;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Dimension = 4,
    InvalidArgument = 5,
    SingularMetric = 6,
    Inconclusive = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsVerdict {
    LagrangianConfirmed = 0,
    FormallyIntegrableClass = 1,
    ObstructionFails = 2,
    HelmholtzFails = 3,
    Inconclusive = 4,
}

impl From<Verdict> for SsVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::LagrangianConfirmed => SsVerdict::LagrangianConfirmed,
            Verdict::FormallyIntegrableClass => SsVerdict::FormallyIntegrableClass,
            Verdict::ObstructionFails => SsVerdict::ObstructionFails,
            Verdict::HelmholtzFails => SsVerdict::HelmholtzFails,
            Verdict::Inconclusive => SsVerdict::Inconclusive,
        }
    }
}

/// Opaque semispray handle.
pub struct SsSemispray(Semispray);

/// Opaque semi-basic 1-form handle.
pub struct SsForm(SemiBasicOneForm);

/// One row of the symbol table.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SsSymbolDims {
    pub n: usize,
    pub dim_g1: usize,
    pub dim_g2: usize,
    pub dim_k: usize,
    pub exact: bool,
    pub all_match: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SsClassification {
    pub is_flat: bool,
    pub is_isotropic: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(SsStatus, String);

impl Fail {
    fn new(status: SsStatus, msg: impl ToString) -> Fail {
        Fail(status, msg.to_string())
    }
}

impl From<HelmholtzError> for Fail {
    fn from(e: HelmholtzError) -> Self {
        let status = match e {
            HelmholtzError::SingularMetric => SsStatus::SingularMetric,
            HelmholtzError::DimensionTooLarge { .. } | HelmholtzError::Form(_) => SsStatus::Dimension,
            HelmholtzError::Geometry(_) => SsStatus::InvalidArgument,
            HelmholtzError::ZeroTest(_) => SsStatus::Inconclusive,
        };
        Fail::new(status, e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::new(SsStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::new(SsStatus::InvalidUtf8, "string is not valid UTF-8"))
}

unsafe fn read_strs<'a>(p: *const *const c_char, len: usize) -> Result<Vec<&'a str>, Fail> {
    if p.is_null() {
        return Err(Fail::new(SsStatus::NullPointer, "null string array"));
    }
    (0..len).map(|i| read_str(*p.add(i))).collect()
}

fn check_out<T>(p: *mut T) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail::new(SsStatus::NullPointer, "null output pointer"))
    } else {
        Ok(())
    }
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::new(SsStatus::NullPointer, "null handle"))
}

fn config(seed: u64) -> ZeroTestConfig {
    ZeroTestConfig {
        seed,
        ..ZeroTestConfig::default()
    }
}

fn out_string(s: String, out: *mut *mut c_char) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail::new(SsStatus::InvalidArgument, e))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds `S` from `n` coefficient strings `G¹..Gⁿ`.
///
/// # Safety
/// `g` must point to `n` valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_semispray_new(n: usize, g: *const *const c_char, out: *mut *mut SsSemispray) -> SsStatus {
    guard(|| {
        check_out(out)?;
        let g = read_strs(g, n)?;
        let s = Semispray::parse(n, &g).map_err(|e| Fail::new(SsStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(SsSemispray(s)));
        Ok(())
    })
}

/// Derives `S` from a regular Lagrangian (`n <= 3`).
///
/// # Safety
/// `l` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_semispray_from_lagrangian(
    n: usize,
    l: *const c_char,
    seed: u64,
    out: *mut *mut SsSemispray,
) -> SsStatus {
    guard(|| {
        check_out(out)?;
        if n == 0 {
            return Err(Fail::new(SsStatus::Dimension, "n must be at least 1"));
        }
        let l = Lagrangian::parse(read_str(l)?, n).map_err(|e| Fail::new(SsStatus::Parse, e))?;
        let s = semispray_from_lagrangian(&l, &config(seed))?;
        *out = Box::into_raw(Box::new(SsSemispray(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_semispray_free(s: *mut SsSemispray) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Dimension `n`, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ss_semispray_dim(s: *const SsSemispray) -> usize {
    s.as_ref().map_or(0, |s| s.0.n())
}

/// Coefficient `G^(i+1)` as a string, to be freed with [`ss_string_free`].
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_semispray_coefficient(s: *const SsSemispray, i: usize, out: *mut *mut c_char) -> SsStatus {
    guard(|| {
        check_out(out)?;
        let s = &handle(s)?.0;
        let g = s
            .coefficients()
            .get(i)
            .ok_or_else(|| Fail::new(SsStatus::Dimension, format!("index {i} out of range")))?;
        out_string(g.to_string(), out)
    })
}

/// Jacobi endomorphism component `R^(i+1)_(j+1)` as a string.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_semispray_jacobi(
    s: *const SsSemispray,
    i: usize,
    j: usize,
    out: *mut *mut c_char,
) -> SsStatus {
    guard(|| {
        check_out(out)?;
        let s = &handle(s)?.0;
        let n = s.n();
        if i >= n || j >= n {
            return Err(Fail::new(SsStatus::Dimension, format!("index ({i}, {j}) out of range")));
        }
        out_string(s.jacobi()[i][j].to_string(), out)
    })
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_semispray_classify(
    s: *const SsSemispray,
    seed: u64,
    out: *mut SsClassification,
) -> SsStatus {
    guard(|| {
        check_out(out)?;
        let c = classify(&handle(s)?.0, &config(seed)).map_err(|e| Fail::new(SsStatus::Inconclusive, e))?;
        *out = SsClassification {
            is_flat: c.is_flat,
            is_isotropic: c.is_isotropic,
        };
        Ok(())
    })
}

/// Builds `θ = θ₀ dt + θᵢ δxⁱ` from `theta0` and `n` strings `theta`.
///
/// # Safety
/// `theta0` and the `n` entries of `theta` must be valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_form_new(
    n: usize,
    theta0: *const c_char,
    theta: *const *const c_char,
    out: *mut *mut SsForm,
) -> SsStatus {
    guard(|| {
        check_out(out)?;
        if n == 0 {
            return Err(Fail::new(SsStatus::Dimension, "n must be at least 1"));
        }
        let t0 = read_str(theta0)?;
        let t = read_strs(theta, n)?;
        let f = SemiBasicOneForm::parse(n, t0, &t).map_err(|e| Fail::new(SsStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(SsForm(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_form_free(f: *mut SsForm) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Verdict for a candidate form `θ`, or from the class of `S` when `theta` is null.
///
/// # Safety
/// `s` must be a live handle, `theta` null or a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_check_theta(
    s: *const SsSemispray,
    theta: *const SsForm,
    seed: u64,
    out: *mut SsVerdict,
) -> SsStatus {
    guard(|| {
        check_out(out)?;
        let s = &handle(s)?.0;
        let theta = theta.as_ref().map(|t| &t.0);
        let r = variationality_verdict(s, theta, &config(seed))?;
        *out = r.verdict.into();
        Ok(())
    })
}

/// Verdict for a Lagrangian `L` against `S`.
///
/// # Safety
/// `s` must be a live handle, `l` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_verify_lagrangian(
    s: *const SsSemispray,
    l: *const c_char,
    seed: u64,
    out: *mut SsVerdict,
) -> SsStatus {
    guard(|| {
        check_out(out)?;
        let s = &handle(s)?.0;
        let l = Lagrangian::parse(read_str(l)?, s.n()).map_err(|e| Fail::new(SsStatus::Parse, e))?;
        *out = verify_lagrangian(&l, s, &config(seed))?.verdict.into();
        Ok(())
    })
}

/// Exact symbol dimensions for one `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_symbol_dims(n: usize, out: *mut SsSymbolDims) -> SsStatus {
    guard(|| {
        check_out(out)?;
        if !(1..=16).contains(&n) {
            return Err(Fail::new(SsStatus::Dimension, "n must lie in 1..=16"));
        }
        let d = symbol_dims(n, 1);
        *out = SsSymbolDims {
            n,
            dim_g1: d.dim_g1,
            dim_g2: d.dim_g2,
            dim_k: d.dim_k,
            exact: d.exactness.holds(),
            all_match: d.all_match(),
        };
        Ok(())
    })
}

/// RK4 geodesic from `start = (t, x¹..xⁿ, y¹..yⁿ)`; writes the trajectory
/// export text to `out`.
///
/// # Safety
/// `s` must be a live handle, `start` must point to `2n + 1` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_geodesic(
    s: *const SsSemispray,
    start: *const f64,
    step: f64,
    steps: usize,
    out: *mut *mut c_char,
) -> SsStatus {
    guard(|| {
        check_out(out)?;
        let s = &handle(s)?.0;
        if start.is_null() {
            return Err(Fail::new(SsStatus::NullPointer, "null start"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Fail::new(SsStatus::InvalidArgument, "step must be positive"));
        }
        let n = s.n();
        let z = std::slice::from_raw_parts(start, 2 * n + 1);
        let p = Point::new(z[0], z[1..=n].to_vec(), z[n + 1..].to_vec());
        out_string(integrate_geodesic(s, &p, step, steps).export(), out)
    })
}
