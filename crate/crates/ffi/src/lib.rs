//! C ABI over `uncertainty-core`.
//!
//! Grids, fields and report lists are opaque handles created and released
//! through this interface. Every function returns a [`UcStatus`]; on failure
//! the message is available from [`uc_last_error_message`] on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use uncertainty_core::complex_space::cs_equality_residuals;
use uncertainty_core::gaussian::{realize, GaussianSpec};
use uncertainty_core::identities::{
    verify_dilation_bound, verify_dilation_laplacian, verify_hardy, verify_position_momentum, verify_radial_coulomb,
};
use uncertainty_core::{ComplexVector, EqualityReport, Error, GridSpec, Scheme, StateField};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidGrid = 4,
    DomainTooSmall = 5,
    Degenerate = 6,
    Unsupported = 7,
    InternalConsistency = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcScheme {
    SpectralPeriodic = 0,
    CentralDiff2 = 1,
    CentralDiff4 = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcGaussianKind {
    Coherent = 0,
    Squeezed = 1,
    SqueezedGen = 2,
}

/// Family of identities checked by [`uc_verify`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcIdentity {
    PositionMomentum = 0,
    DilationBound = 1,
    DilationLaplacian = 2,
    Hardy = 3,
    RadialCoulomb = 4,
}

/// Uniform tensor grid.
pub struct UcGrid(GridSpec);

/// Complex samples on a grid.
pub struct UcField(StateField);

/// Verification reports with their identity strings.
pub struct UcReportList {
    reports: Vec<EqualityReport>,
    ids: Vec<CString>,
}

/// One report. `identity_id` is owned by the list and lives until the list is freed.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct UcReport {
    pub identity_id: *const c_char,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UcStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::MetricMismatch | Error::GridMismatch => UcStatus::DimensionMismatch,
        Error::InvalidGrid(_) | Error::OriginOnGrid(_) => UcStatus::InvalidGrid,
        Error::DomainTooSmall { .. } | Error::UnderResolved { .. } => UcStatus::DomainTooSmall,
        Error::ZeroVector(_) | Error::Degenerate(_) | Error::NotSquareIntegrable(_) => UcStatus::Degenerate,
        Error::Unsupported { .. } | Error::DimensionTooSmall { .. } => UcStatus::Unsupported,
        Error::InternalConsistency { .. } => UcStatus::InternalConsistency,
        _ => UcStatus::InvalidArgument,
    }
}

struct Fail(UcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UcStatus::NullPointer, format!("null pointer: {what}"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            UcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            UcStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn complex_vector(re: *const f64, im: *const f64, len: usize) -> Result<ComplexVector, Fail> {
    let re = slice(re, len, "re")?;
    let im = slice(im, len, "im")?;
    Ok(ComplexVector::new(re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect())?)
}

fn report_list(reports: Vec<EqualityReport>) -> UcReportList {
    let ids = reports
        .iter()
        .map(|r| CString::new(r.identity_id.replace('\0', " ")).unwrap_or_default())
        .collect();
    UcReportList { reports, ids }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn uc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn uc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"",
    };
    VERSION.as_ptr()
}

/// Creates a grid of `points^dim` samples on `[-half_width, half_width)^dim`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn uc_grid_new(
    dim: usize,
    points: usize,
    half_width: f64,
    offset: f64,
    scheme: UcScheme,
    out: *mut *mut UcGrid,
) -> UcStatus {
    guard(|| {
        let scheme = match scheme {
            UcScheme::SpectralPeriodic => Scheme::SpectralPeriodic,
            UcScheme::CentralDiff2 => Scheme::CentralDiff2,
            UcScheme::CentralDiff4 => Scheme::CentralDiff4,
        };
        put(out, UcGrid(GridSpec::new(dim, points, half_width, offset, scheme)?))
    })
}

/// Number of samples of the grid, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle from [`uc_grid_new`].
#[no_mangle]
pub unsafe extern "C" fn uc_grid_len(grid: *const UcGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `grid` must be null or a handle from [`uc_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_grid_free(grid: *mut UcGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Samples a Gaussian extremizer. `lambda` is ignored for coherent states and
/// `(sigma_re, sigma_im)` is used only for the generalized family.
///
/// # Safety
/// `grid` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn uc_field_gaussian(
    grid: *const UcGrid,
    kind: UcGaussianKind,
    norm: f64,
    lambda: f64,
    theta: f64,
    sigma_re: f64,
    sigma_im: f64,
    out: *mut *mut UcField,
) -> UcStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        let n = g.0.dim;
        let spec = match kind {
            UcGaussianKind::Coherent => GaussianSpec::coherent(n, norm, theta)?,
            UcGaussianKind::Squeezed => GaussianSpec::squeezed(n, norm, lambda, theta)?,
            UcGaussianKind::SqueezedGen => {
                GaussianSpec::squeezed_gen(n, norm, lambda, theta, Complex64::new(sigma_re, sigma_im))?
            }
        };
        put(out, UcField(realize(&spec, &g.0)?))
    })
}

/// Copies `len` samples (axis 0 fastest) into a new field.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles each.
#[no_mangle]
pub unsafe extern "C" fn uc_field_from_values(
    grid: *const UcGrid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut UcField,
) -> UcStatus {
    guard(|| {
        let g = get(grid, "grid")?;
        if len != g.0.len() {
            return Err(Error::DimensionMismatch { left: len, right: g.0.len() }.into());
        }
        let re = slice(re, len, "re")?;
        let im = slice(im, len, "im")?;
        let values = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        put(out, UcField(StateField::new(g.0, values)?))
    })
}

/// Copies the samples out; `len` must equal the grid size.
///
/// # Safety
/// `re_out` and `im_out` must point to `len` writable doubles each.
#[no_mangle]
pub unsafe extern "C" fn uc_field_values(
    field: *const UcField,
    re_out: *mut f64,
    im_out: *mut f64,
    len: usize,
) -> UcStatus {
    guard(|| {
        let f = get(field, "field")?;
        let v = f.0.values();
        if len != v.len() {
            return Err(Error::DimensionMismatch { left: len, right: v.len() }.into());
        }
        if re_out.is_null() || im_out.is_null() {
            return Err(null("output buffer"));
        }
        let re = std::slice::from_raw_parts_mut(re_out, len);
        let im = std::slice::from_raw_parts_mut(im_out, len);
        for (k, z) in v.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_field_free(field: *mut UcField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `(a|b)`, linear in `a` and antilinear in `b`.
///
/// # Safety
/// Handles must be live; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn uc_field_inner(
    a: *const UcField,
    b: *const UcField,
    re_out: *mut f64,
    im_out: *mut f64,
) -> UcStatus {
    guard(|| {
        let z = get(a, "a")?.0.inner(&get(b, "b")?.0)?;
        if re_out.is_null() || im_out.is_null() {
            return Err(null("output"));
        }
        *re_out = z.re;
        *im_out = z.im;
        Ok(())
    })
}

/// Runs the verifier for one identity family on a field.
///
/// # Safety
/// `field` must be live and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn uc_verify(
    field: *const UcField,
    identity: UcIdentity,
    tol: f64,
    out: *mut *mut UcReportList,
) -> UcStatus {
    guard(|| {
        let phi = &get(field, "field")?.0;
        let reports = match identity {
            UcIdentity::PositionMomentum => verify_position_momentum(phi, tol)?,
            UcIdentity::DilationBound => verify_dilation_bound(phi, tol)?,
            UcIdentity::DilationLaplacian => verify_dilation_laplacian(phi, tol)?,
            UcIdentity::Hardy => verify_hardy(phi, tol)?,
            UcIdentity::RadialCoulomb => verify_radial_coulomb(phi, tol)?,
        };
        put(out, report_list(reports))
    })
}

/// Cauchy–Schwarz equalities for two vectors of length `len`, at the angles
/// `0, π/4, π/2, 2, π`.
///
/// # Safety
/// The four input arrays must hold `len` readable doubles each.
#[no_mangle]
pub unsafe extern "C" fn uc_algebraic_check(
    u_re: *const f64,
    u_im: *const f64,
    v_re: *const f64,
    v_im: *const f64,
    len: usize,
    tol: f64,
    out: *mut *mut UcReportList,
) -> UcStatus {
    guard(|| {
        let u = complex_vector(u_re, u_im, len)?;
        let v = complex_vector(v_re, v_im, len)?;
        let thetas = [0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, 2.0, std::f64::consts::PI];
        put(out, report_list(cs_equality_residuals(&u, &v, &thetas, tol)?))
    })
}

/// Number of reports, or 0 for a null handle.
///
/// # Safety
/// `list` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn uc_report_list_len(list: *const UcReportList) -> usize {
    list.as_ref().map_or(0, |l| l.reports.len())
}

/// Whether every report passed; false for a null handle.
///
/// # Safety
/// `list` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn uc_report_list_all_passed(list: *const UcReportList) -> bool {
    list.as_ref().is_some_and(|l| l.reports.iter().all(|r| r.passed))
}

/// Copies report `index` into `out`.
///
/// # Safety
/// `list` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn uc_report_list_get(list: *const UcReportList, index: usize, out: *mut UcReport) -> UcStatus {
    guard(|| {
        let l = get(list, "list")?;
        let r = l.reports.get(index).ok_or_else(|| {
            Fail(UcStatus::InvalidArgument, format!("index {index} out of range 0..{}", l.reports.len()))
        })?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = UcReport {
            identity_id: l.ids[index].as_ptr(),
            lhs_re: r.lhs.re,
            lhs_im: r.lhs.im,
            rhs_re: r.rhs.re,
            rhs_im: r.rhs.im,
            abs_residual: r.abs_residual,
            rel_residual: r.rel_residual,
            tol: r.tol,
            passed: r.passed,
        };
        Ok(())
    })
}

/// # Safety
/// `list` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uc_report_list_free(list: *mut UcReportList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}
