use std::ffi::CStr;
use std::ptr;

use uncertainty_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(uc_last_error_message()) }.to_string_lossy().into_owned()
}

fn grid(dim: usize, points: usize, half_width: f64) -> *mut UcGrid {
    let mut g = ptr::null_mut();
    let s = unsafe { uc_grid_new(dim, points, half_width, 0.5, UcScheme::SpectralPeriodic, &mut g) };
    assert_eq!(s, UcStatus::Ok, "{}", last_error());
    g
}

fn reports(list: *const UcReportList) -> Vec<(String, UcReport)> {
    (0..unsafe { uc_report_list_len(list) })
        .map(|k| {
            let mut r = std::mem::MaybeUninit::<UcReport>::uninit();
            assert_eq!(unsafe { uc_report_list_get(list, k, r.as_mut_ptr()) }, UcStatus::Ok);
            let r = unsafe { r.assume_init() };
            (unsafe { CStr::from_ptr(r.identity_id) }.to_string_lossy().into_owned(), r)
        })
        .collect()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(uc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn coherent_state_verifies() {
    let g = grid(1, 256, 12.0);
    assert_eq!(unsafe { uc_grid_len(g) }, 256);
    let mut f = ptr::null_mut();
    let s = unsafe { uc_field_gaussian(g, UcGaussianKind::Coherent, 1.0, 1.0, 0.0, -1.0, 0.0, &mut f) };
    assert_eq!(s, UcStatus::Ok, "{}", last_error());
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { uc_field_inner(f, f, &mut re, &mut im) }, UcStatus::Ok);
    assert!((re - 1.0).abs() < 1e-12 && im == 0.0);

    let mut list = ptr::null_mut();
    assert_eq!(unsafe { uc_verify(f, UcIdentity::PositionMomentum, 1e-8, &mut list) }, UcStatus::Ok);
    let rs = reports(list);
    assert!(rs.iter().any(|(id, _)| id == "pm.trace"));
    assert!(unsafe { uc_report_list_all_passed(list) });
    unsafe {
        uc_report_list_free(list);
        uc_field_free(f);
        uc_grid_free(g);
    }
}

#[test]
fn values_roundtrip() {
    let g = grid(1, 16, 4.0);
    let re: Vec<f64> = (0..16).map(|k| k as f64).collect();
    let im: Vec<f64> = (0..16).map(|k| -(k as f64)).collect();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { uc_field_from_values(g, re.as_ptr(), im.as_ptr(), 16, &mut f) }, UcStatus::Ok);
    let (mut r2, mut i2) = (vec![0.0; 16], vec![0.0; 16]);
    assert_eq!(unsafe { uc_field_values(f, r2.as_mut_ptr(), i2.as_mut_ptr(), 16) }, UcStatus::Ok);
    assert_eq!((r2, i2), (re.clone(), im.clone()));
    assert_eq!(
        unsafe { uc_field_values(f, ptr::null_mut(), ptr::null_mut(), 16) },
        UcStatus::NullPointer
    );
    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { uc_field_from_values(g, re.as_ptr(), im.as_ptr(), 15, &mut bad) },
        UcStatus::DimensionMismatch
    );
    assert!(bad.is_null());
    unsafe {
        uc_field_free(f);
        uc_grid_free(g);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut g = ptr::null_mut();
    let s = unsafe { uc_grid_new(1, 15, 4.0, 0.5, UcScheme::SpectralPeriodic, &mut g) };
    assert_eq!(s, UcStatus::InvalidGrid);
    assert!(last_error().contains("even"), "{}", last_error());

    let small = grid(1, 64, 3.0);
    let mut f = ptr::null_mut();
    let s = unsafe { uc_field_gaussian(small, UcGaussianKind::Coherent, 1.0, 1.0, 0.0, -1.0, 0.0, &mut f) };
    assert_eq!(s, UcStatus::DomainTooSmall);

    let g1 = grid(1, 64, 8.0);
    let s = unsafe { uc_field_gaussian(g1, UcGaussianKind::Coherent, 1.0, 1.0, 0.0, -1.0, 0.0, &mut f) };
    assert_eq!(s, UcStatus::Ok);
    let mut list = ptr::null_mut();
    assert_eq!(unsafe { uc_verify(f, UcIdentity::Hardy, 1e-3, &mut list) }, UcStatus::Unsupported);
    assert_eq!(unsafe { uc_verify(ptr::null(), UcIdentity::Hardy, 1e-3, &mut list) }, UcStatus::NullPointer);
    assert_eq!(unsafe { uc_report_list_len(ptr::null()) }, 0);
    unsafe {
        uc_field_free(f);
        uc_grid_free(g1);
        uc_grid_free(small);
        uc_grid_free(ptr::null_mut());
    }
}

#[test]
fn algebraic_check_passes_and_rejects_zero() {
    let u_re = [1.0, 2.0, -0.5];
    let u_im = [0.0, 1.0, 3.0];
    let v_re = [0.3, -1.0, 2.0];
    let v_im = [1.5, 0.2, 0.0];
    let mut list = ptr::null_mut();
    let s = unsafe {
        uc_algebraic_check(u_re.as_ptr(), u_im.as_ptr(), v_re.as_ptr(), v_im.as_ptr(), 3, 1e-12, &mut list)
    };
    assert_eq!(s, UcStatus::Ok);
    let rs = reports(list);
    assert!(rs.len() >= 9);
    assert!(rs.iter().all(|(_, r)| r.passed && r.rel_residual <= 1e-12));
    let mut out = std::mem::MaybeUninit::<UcReport>::uninit();
    assert_eq!(unsafe { uc_report_list_get(list, rs.len(), out.as_mut_ptr()) }, UcStatus::InvalidArgument);
    unsafe { uc_report_list_free(list) };

    let zero = [0.0; 3];
    let s = unsafe {
        uc_algebraic_check(zero.as_ptr(), zero.as_ptr(), v_re.as_ptr(), v_im.as_ptr(), 3, 1e-12, &mut list)
    };
    assert_eq!(s, UcStatus::Degenerate);
}
