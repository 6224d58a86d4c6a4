//! C interface to hodgelab: grids, forms, the Hodge decomposition and the
//! experiment runner behind opaque handles.
//!
//! Every fallible function returns a [`HodgelabStatus`]; on failure the
//! message is kept per thread and read with [`hodgelab_last_error`].
//! Handles are created by the library and released with the matching
//! `_free` function. Passing NULL to a `_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hodgelab::error::HodgeError;
use hodgelab::form::Form;
use hodgelab::grid::TorusGrid;
use hodgelab::harness::report::to_json;
use hodgelab::harness::{self, ExperimentReport, Settings};
use hodgelab::hodge::hodge_decompose;
use hodgelab::random::{random_form, seeded_rng};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HodgelabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degree = 3,
    Grid = 4,
    Exponent = 5,
    Resolution = 6,
    Shape = 7,
    Config = 8,
    Format = 9,
    Gate = 10,
    Io = 11,
    Panic = 12,
}

/// Opaque torus grid.
pub struct HodgelabGrid(TorusGrid);

/// Opaque differential form on a grid.
pub struct HodgelabForm(Form);

/// Opaque experiment report.
pub struct HodgelabReport(ExperimentReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &HodgeError) -> HodgelabStatus {
    match err {
        HodgeError::Degree(_) => HodgelabStatus::Degree,
        HodgeError::Grid(_) => HodgelabStatus::Grid,
        HodgeError::Exponent(_) => HodgelabStatus::Exponent,
        HodgeError::Resolution(_) => HodgelabStatus::Resolution,
        HodgeError::Shape(_) => HodgelabStatus::Shape,
        HodgeError::Config(_) => HodgelabStatus::Config,
        HodgeError::Format(_) => HodgelabStatus::Format,
        HodgeError::Gate { .. } => HodgelabStatus::Gate,
        HodgeError::Io { .. } => HodgelabStatus::Io,
    }
}

/// Failure carried out of a guarded body.
enum Failure {
    Status(HodgelabStatus, String),
    Library(HodgeError),
}

impl From<HodgeError> for Failure {
    fn from(e: HodgeError) -> Self {
        Failure::Library(e)
    }
}

fn null() -> Failure {
    Failure::Status(HodgelabStatus::NullPointer, "unexpected NULL pointer".into())
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure::Status(HodgelabStatus::InvalidArgument, message.into())
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HodgelabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HodgelabStatus::Ok
        }
        Ok(Err(Failure::Status(s, message))) => {
            set_error(message);
            s
        }
        Ok(Err(Failure::Library(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            HodgelabStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(null)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not UTF-8"))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hodgelab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn hodgelab_status_name(status: HodgelabStatus) -> *const c_char {
    let name: &'static CStr = match status {
        HodgelabStatus::Ok => c"ok",
        HodgelabStatus::NullPointer => c"null pointer",
        HodgelabStatus::InvalidArgument => c"invalid argument",
        HodgelabStatus::Degree => c"degree error",
        HodgelabStatus::Grid => c"grid error",
        HodgelabStatus::Exponent => c"exponent error",
        HodgelabStatus::Resolution => c"resolution error",
        HodgelabStatus::Shape => c"shape error",
        HodgelabStatus::Config => c"config error",
        HodgelabStatus::Format => c"format error",
        HodgelabStatus::Gate => c"gate refused",
        HodgelabStatus::Io => c"i/o error",
        HodgelabStatus::Panic => c"internal panic",
    };
    name.as_ptr()
}

/// Creates a grid with `dim` resolutions and periods; `periods` may be NULL
/// for the unit torus.
///
/// # Safety
/// `resolutions` must point to `dim` values, `periods` to `dim` values or be
/// NULL, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_grid_new(
    resolutions: *const usize,
    periods: *const f64,
    dim: usize,
    out: *mut *mut HodgelabGrid,
) -> HodgelabStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let res = slice(resolutions, dim)?.to_vec();
        let per = if periods.is_null() { vec![1.0; dim] } else { slice(periods, dim)?.to_vec() };
        *out = boxed(HodgelabGrid(TorusGrid::new(res, per)?));
        Ok(())
    })
}

/// # Safety
/// `grid` must be NULL or a handle from [`hodgelab_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_grid_free(grid: *mut HodgelabGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of grid points.
///
/// # Safety
/// `grid` must be a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_grid_len(grid: *const HodgelabGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Builds a form from its components, concatenated in multi-index order,
/// each in row-major grid order.
///
/// # Safety
/// `grid` must be a live grid handle, `data` must point to `len` values and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_new(
    grid: *const HodgelabGrid,
    degree: usize,
    data: *const f64,
    len: usize,
    out: *mut *mut HodgelabForm,
) -> HodgelabStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let g = &borrow(grid)?.0;
        let zeros = Form::zeros(g, degree)?;
        let count = zeros.components().len();
        if len != count * g.len() {
            return Err(invalid(format!("expected {} values, got {len}", count * g.len())));
        }
        let values = slice(data, len)?;
        let components = values.chunks(g.len()).map(<[f64]>::to_vec).collect();
        *out = boxed(HodgelabForm(Form::from_components(g, degree, components)?));
        Ok(())
    })
}

/// Random band-limited form with Fourier modes up to `bandwidth`.
///
/// # Safety
/// `grid` must be a live grid handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_random(
    grid: *const HodgelabGrid,
    degree: usize,
    bandwidth: usize,
    seed: u64,
    out: *mut *mut HodgelabForm,
) -> HodgelabStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let g = &borrow(grid)?.0;
        *out = boxed(HodgelabForm(random_form(g, degree, bandwidth, &mut seeded_rng(seed))?));
        Ok(())
    })
}

/// # Safety
/// `form` must be NULL or a form handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_free(form: *mut HodgelabForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Degree of the form, or `usize::MAX` for NULL.
///
/// # Safety
/// `form` must be NULL or a live form handle.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_degree(form: *const HodgelabForm) -> usize {
    form.as_ref().map_or(usize::MAX, |f| f.0.degree())
}

/// Number of values held by the form (components × grid points).
///
/// # Safety
/// `form` must be NULL or a live form handle.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_len(form: *const HodgelabForm) -> usize {
    form.as_ref().map_or(0, |f| f.0.components().len() * f.0.grid().len())
}

/// Copies the component values into `buffer`, which must hold
/// [`hodgelab_form_len`] values.
///
/// # Safety
/// `form` must be a live form handle and `buffer` must point to `len`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_copy(form: *const HodgelabForm, buffer: *mut f64, len: usize) -> HodgelabStatus {
    guard(|| {
        let f = &borrow(form)?.0;
        let need = f.components().len() * f.grid().len();
        if len != need {
            return Err(invalid(format!("buffer holds {len} values, the form has {need}")));
        }
        if buffer.is_null() && need > 0 {
            return Err(null());
        }
        for (i, c) in f.components().iter().enumerate() {
            ptr::copy_nonoverlapping(c.as_ptr(), buffer.add(i * c.len()), c.len());
        }
        Ok(())
    })
}

unsafe fn unary(
    form: *const HodgelabForm,
    out: *mut *mut HodgelabForm,
    op: impl FnOnce(&Form) -> hodgelab::error::Result<Form>,
) -> HodgelabStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = boxed(HodgelabForm(op(&borrow(form)?.0)?));
        Ok(())
    })
}

/// Exterior derivative.
///
/// # Safety
/// `form` must be a live form handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_d(form: *const HodgelabForm, out: *mut *mut HodgelabForm) -> HodgelabStatus {
    unary(form, out, Form::exterior_derivative)
}

/// Codifferential.
///
/// # Safety
/// `form` must be a live form handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_codifferential(
    form: *const HodgelabForm,
    out: *mut *mut HodgelabForm,
) -> HodgelabStatus {
    unary(form, out, Form::codifferential)
}

/// Hodge star.
///
/// # Safety
/// `form` must be a live form handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_star(form: *const HodgelabForm, out: *mut *mut HodgelabForm) -> HodgelabStatus {
    unary(form, out, |f| Ok(f.hodge_star()))
}

/// Pointwise wedge product `a ∧ b`.
///
/// # Safety
/// `a` and `b` must be live form handles on the same grid and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_wedge(
    a: *const HodgelabForm,
    b: *const HodgelabForm,
    out: *mut *mut HodgelabForm,
) -> HodgelabStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = boxed(HodgelabForm(borrow(a)?.0.wedge(&borrow(b)?.0)?));
        Ok(())
    })
}

/// `L²` norm.
///
/// # Safety
/// `form` must be a live form handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_form_l2_norm(form: *const HodgelabForm, out: *mut f64) -> HodgelabStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = borrow(form)?.0.l2_norm();
        Ok(())
    })
}

/// Splits a form into its exact, coexact and harmonic parts.
///
/// # Safety
/// `form` must be a live form handle and the three outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_hodge_decompose(
    form: *const HodgelabForm,
    exact: *mut *mut HodgelabForm,
    coexact: *mut *mut HodgelabForm,
    harmonic: *mut *mut HodgelabForm,
) -> HodgelabStatus {
    guard(|| {
        let (e, c, h) = (out_ptr(exact)?, out_ptr(coexact)?, out_ptr(harmonic)?);
        let parts = hodge_decompose(&borrow(form)?.0)?;
        *e = boxed(HodgelabForm(parts.exact));
        *c = boxed(HodgelabForm(parts.coexact));
        *h = boxed(HodgelabForm(parts.harmonic));
        Ok(())
    })
}

/// Runs a named experiment with INI overrides (`config` may be NULL).
///
/// # Safety
/// `experiment` must be a NUL-terminated string, `config` NULL or a
/// NUL-terminated string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_run_experiment(
    experiment: *const c_char,
    config: *const c_char,
    out: *mut *mut HodgelabReport,
) -> HodgelabStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let name = text(experiment)?;
        let overrides = if config.is_null() { Settings::default() } else { Settings::parse_ini(text(config)?)? };
        let settings = harness::settings_for(name, &overrides)?;
        *out = boxed(HodgelabReport(harness::run(name, &settings)?));
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_report_free(report: *mut HodgelabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Exit code of the report's verdict: 0 pass, 2 fail, 3 tainted pass; −1 for NULL.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_report_exit_code(report: *const HodgelabReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.0.verdict.exit_code())
}

/// The report as JSON; release with [`hodgelab_string_free`]. NULL on failure.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_report_json(report: *const HodgelabReport) -> *mut c_char {
    let Some(r) = report.as_ref() else {
        set_error("unexpected NULL pointer");
        return ptr::null_mut();
    };
    match CString::new(to_json(&r.0)) {
        Ok(s) => s.into_raw(),
        Err(_) => {
            set_error("report contains a NUL byte");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hodgelab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
