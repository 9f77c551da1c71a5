use std::ffi::{CStr, CString};
use std::ptr;

use wavereg_ffi::*;

fn sample(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(2 * n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let a = (i as f64 + 0.5) / n as f64;
        let b = (((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64) / (1u64 << 53) as f64;
        x.push(a);
        x.push(b);
        y.push((2.0 * std::f64::consts::PI * a).sin() + (2.0 * std::f64::consts::PI * b).cos());
    }
    (x, y)
}

fn last_error() -> String {
    let p = wr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn fit_predict_save_load() {
    let (x, y) = sample(256);
    let filter = CString::new("db4tap").unwrap();
    let mut opts = wr_fit_options_default();
    opts.filter = filter.as_ptr();
    let mut model = ptr::null_mut();
    let status = unsafe { wr_fit(x.as_ptr(), 256, 2, y.as_ptr(), &opts, &mut model) };
    assert_eq!(status, WrStatus::Ok);
    assert!(wr_last_error().is_null());
    unsafe {
        assert_eq!(wr_model_predictors(model), 2);
        assert_eq!(wr_model_level(model), 3);
        assert!(wr_model_beta(model) > 0.0);
        assert!(wr_model_sigma_hat(model) >= 0.0);
    }

    let mut pred = vec![0.0; 256];
    let mut clipped = 99;
    let status = unsafe { wr_predict(model, x.as_ptr(), 256, 2, pred.as_mut_ptr(), &mut clipped) };
    assert_eq!(status, WrStatus::Ok);
    assert_eq!(clipped, 0);
    let rmse = (pred.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 256.0).sqrt();
    assert!(rmse < 0.1, "rmse {rmse}");

    let mut c = f64::NAN;
    assert_eq!(unsafe { wr_model_component(model, 1, 0.5, &mut c) }, WrStatus::Ok);
    assert!(c.is_finite());
    assert_eq!(unsafe { wr_model_component(model, 2, 0.5, &mut c) }, WrStatus::Data);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.toml").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { wr_model_save(model, path.as_ptr()) }, WrStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { wr_model_load(path.as_ptr(), &mut loaded) }, WrStatus::Ok);
    let mut again = vec![0.0; 256];
    let status = unsafe { wr_predict(loaded, x.as_ptr(), 256, 2, again.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(status, WrStatus::Ok);
    assert_eq!(pred, again);
    unsafe {
        wr_model_free(model);
        wr_model_free(loaded);
        wr_model_free(ptr::null_mut());
    }
}

#[test]
fn error_codes_and_messages() {
    let (x, y) = sample(64);
    let mut model = ptr::null_mut();

    let bad = CString::new("db8").unwrap();
    let mut opts = wr_fit_options_default();
    opts.filter = bad.as_ptr();
    assert_eq!(
        unsafe { wr_fit(x.as_ptr(), 64, 2, y.as_ptr(), &opts, &mut model) },
        WrStatus::Config
    );
    assert!(last_error().contains("db8"));
    assert!(model.is_null());

    let mut opts = wr_fit_options_default();
    opts.level = 6;
    assert_eq!(
        unsafe { wr_fit(x.as_ptr(), 64, 2, y.as_ptr(), &opts, &mut model) },
        WrStatus::Data
    );

    let mut y_nan = y.clone();
    y_nan[3] = f64::NAN;
    let status = unsafe { wr_fit(x.as_ptr(), 64, 2, y_nan.as_ptr(), ptr::null(), &mut model) };
    assert_ne!(status, WrStatus::Ok);

    assert_eq!(
        unsafe { wr_fit(ptr::null(), 64, 2, y.as_ptr(), ptr::null(), &mut model) },
        WrStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { wr_predict(ptr::null(), x.as_ptr(), 1, 2, ptr::null_mut(), ptr::null_mut()) },
        WrStatus::InvalidArgument
    );
    let missing = CString::new("/nonexistent/model.toml").unwrap();
    assert_eq!(unsafe { wr_model_load(missing.as_ptr(), &mut model) }, WrStatus::Config);
    unsafe {
        assert_eq!(wr_model_predictors(ptr::null()), 0);
        assert_eq!(wr_model_level(ptr::null()), -1);
        assert!(wr_model_beta(ptr::null()).is_nan());
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/wavereg.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "wr_fit",
        "wr_predict",
        "wr_model_save",
        "wr_model_load",
        "wr_model_free",
        "wr_last_error",
        "WR_STATUS_NUMERIC",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ WrFitOptions o = wr_fit_options_default(); WrModel *m = 0; return (int)wr_fit(0, 0, 0, 0, &o, &m); }}\n"
        ),
    )
    .unwrap();
    match std::process::Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg(&src)
        .status()
    {
        Ok(status) => assert!(status.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler found; syntax check skipped"),
    }
}
