use std::ffi::{CStr, CString};
use std::ptr;

use hodgelab_ffi::*;

fn grid(dims: &[usize]) -> *mut HodgelabGrid {
    let mut g = ptr::null_mut();
    let s = unsafe { hodgelab_grid_new(dims.as_ptr(), ptr::null(), dims.len(), &mut g) };
    assert_eq!(s, HodgelabStatus::Ok);
    g
}

fn values(form: *const HodgelabForm) -> Vec<f64> {
    let len = unsafe { hodgelab_form_len(form) };
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { hodgelab_form_copy(form, buf.as_mut_ptr(), len) }, HodgelabStatus::Ok);
    buf
}

#[test]
fn round_trip_and_calculus() {
    let g = grid(&[16, 16]);
    let n = unsafe { hodgelab_grid_len(g) };
    assert_eq!(n, 256);
    let data: Vec<f64> = (0..2 * n).map(|i| (i as f64 * 0.37).sin()).collect();
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { hodgelab_form_new(g, 1, data.as_ptr(), data.len(), &mut w) }, HodgelabStatus::Ok);
    assert_eq!(unsafe { hodgelab_form_degree(w) }, 1);
    assert_eq!(values(w), data);

    let (mut dw, mut ddw) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { hodgelab_form_d(w, &mut dw) }, HodgelabStatus::Ok);
    assert_eq!(unsafe { hodgelab_form_d(dw, &mut ddw) }, HodgelabStatus::Degree);
    assert!(!hodgelab_last_error().is_null());

    let (mut s1, mut s2) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { hodgelab_form_star(w, &mut s1) }, HodgelabStatus::Ok);
    assert_eq!(unsafe { hodgelab_form_star(s1, &mut s2) }, HodgelabStatus::Ok);
    let back = values(s2);
    assert!(back.iter().zip(&data).all(|(a, b)| (a + b).abs() == 0.0));

    unsafe {
        hodgelab_form_free(s2);
        hodgelab_form_free(s1);
        hodgelab_form_free(dw);
        hodgelab_form_free(w);
        hodgelab_grid_free(g);
    }
}

#[test]
fn decomposition_parts_sum_to_the_input() {
    let g = grid(&[16, 16, 16]);
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { hodgelab_form_random(g, 1, 3, 7, &mut w) }, HodgelabStatus::Ok);
    let (mut e, mut c, mut h) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { hodgelab_hodge_decompose(w, &mut e, &mut c, &mut h) }, HodgelabStatus::Ok);
    let (we, wc, wh, ww) = (values(e), values(c), values(h), values(w));
    let err = (0..ww.len()).map(|i| (we[i] + wc[i] + wh[i] - ww[i]).abs()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
    let mut norm = 0.0;
    assert_eq!(unsafe { hodgelab_form_l2_norm(w, &mut norm) }, HodgelabStatus::Ok);
    assert!(norm > 0.0);
    unsafe {
        for f in [e, c, h, w] {
            hodgelab_form_free(f);
        }
        hodgelab_grid_free(g);
    }
}

#[test]
fn invalid_input_gives_status_codes() {
    let dims = [7usize, 8];
    let mut g = ptr::null_mut();
    let s = unsafe { hodgelab_grid_new(dims.as_ptr(), ptr::null(), 2, &mut g) };
    assert_ne!(s, HodgelabStatus::Ok);
    assert!(g.is_null());
    assert_eq!(unsafe { hodgelab_grid_new(ptr::null(), ptr::null(), 2, &mut g) }, HodgelabStatus::NullPointer);

    let g = grid(&[8, 8]);
    let mut w = ptr::null_mut();
    let short = [0.0; 3];
    let s = unsafe { hodgelab_form_new(g, 1, short.as_ptr(), short.len(), &mut w) };
    assert_eq!(s, HodgelabStatus::InvalidArgument);
    let msg = unsafe { CStr::from_ptr(hodgelab_last_error()) }.to_str().unwrap();
    assert!(msg.contains("expected 128 values"), "{msg}");
    unsafe {
        hodgelab_grid_free(g);
        hodgelab_grid_free(ptr::null_mut());
        hodgelab_form_free(ptr::null_mut());
        hodgelab_report_free(ptr::null_mut());
        hodgelab_string_free(ptr::null_mut());
    }
    let name = unsafe { CStr::from_ptr(hodgelab_status_name(HodgelabStatus::Gate)) };
    assert_eq!(name.to_str().unwrap(), "gate refused");
}

#[test]
fn experiments_run_through_the_interface() {
    let name = CString::new("decompose").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { hodgelab_run_experiment(name.as_ptr(), ptr::null(), &mut r) }, HodgelabStatus::Ok);
    assert_eq!(unsafe { hodgelab_report_exit_code(r) }, 0);
    let json = unsafe { hodgelab_report_json(r) };
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["experiment"], "decompose");
    unsafe {
        hodgelab_string_free(json);
        hodgelab_report_free(r);
    }

    let name = CString::new("immersion").unwrap();
    let cfg = CString::new("[exponents]\np = 1.2\n").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { hodgelab_run_experiment(name.as_ptr(), cfg.as_ptr(), &mut r) }, HodgelabStatus::Gate);
    assert!(r.is_null());
    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { hodgelab_run_experiment(bad.as_ptr(), ptr::null(), &mut r) }, HodgelabStatus::Config);
}
