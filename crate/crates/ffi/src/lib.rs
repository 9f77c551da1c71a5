//! C interface to `wavereg`.
//!
//! Models are opaque `WrModel` handles owned by the caller and released
//! with [`wr_model_free`]. Every fallible call returns a [`WrStatus`]; the
//! message of the most recent failure on the calling thread is available
//! from [`wr_last_error`].
//!
//! Matrices are passed row-major: element `(i, j)` of an `n × p` array
//! lives at `x[i * p + j]`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use nalgebra::DMatrix;
use wavereg::model::{self, FitConfig, FittedAdditiveModel, PredictOptions};
use wavereg::{Error, ErrorKind};

/// Status codes. The non-zero error values match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 1,
    /// Unknown filter, unreadable file, bad option.
    Config = 2,
    /// Shape, range, dimensionality or file-format problem.
    Data = 3,
    /// Non-finite values or a degenerate decomposition.
    Numeric = 4,
    /// Internal panic; the handle arguments are left untouched.
    Internal = 5,
}

/// Opaque fitted model.
pub struct WrModel {
    inner: FittedAdditiveModel,
}

/// Optional fit settings. Start from [`wr_fit_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WrFitOptions {
    /// Filter name (`haar`, `db4tap`, `coif24tap`); null selects `coif24tap`.
    pub filter: *const c_char,
    /// Resolution level; negative selects it from the sample size.
    pub level: i32,
    /// Truncation threshold; zero or negative selects it from the data.
    pub beta: f64,
    /// Ridge penalty; negative means minimum-norm least squares.
    pub ridge_lambda: f64,
    /// Quantile-box coverage in (0, 1]; zero or negative disables it.
    pub quantile_coverage: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> WrStatus {
    let status = match e.kind() {
        ErrorKind::Config => WrStatus::Config,
        ErrorKind::Data => WrStatus::Data,
        ErrorKind::Numeric => WrStatus::Numeric,
    };
    set_last_error(e.to_string());
    status
}

fn invalid(message: &str) -> WrStatus {
    set_last_error(message.to_string());
    WrStatus::InvalidArgument
}

fn guard(f: impl FnOnce() -> WrStatus) -> WrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == WrStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            WrStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, WrStatus> {
    if s.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

unsafe fn matrix_arg(x: *const f64, n: usize, p: usize) -> Result<DMatrix<f64>, WrStatus> {
    if x.is_null() {
        return Err(invalid("x is null"));
    }
    let len = n.checked_mul(p).ok_or_else(|| invalid("n * p overflows"))?;
    Ok(DMatrix::from_row_slice(n, p, std::slice::from_raw_parts(x, len)))
}

/// Defaults: automatic level and threshold, plain least squares, all rows.
#[no_mangle]
pub extern "C" fn wr_fit_options_default() -> WrFitOptions {
    WrFitOptions {
        filter: ptr::null(),
        level: -1,
        beta: 0.0,
        ridge_lambda: -1.0,
        quantile_coverage: 0.0,
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Fits a model to `x` (`n × p`, row-major) and `y` (`n`).
///
/// # Safety
/// `x` must point to `n * p` doubles, `y` to `n` doubles, `out` to a
/// writable handle slot. `options` may be null.
#[no_mangle]
pub unsafe extern "C" fn wr_fit(
    x: *const f64,
    n: usize,
    p: usize,
    y: *const f64,
    options: *const WrFitOptions,
    out: *mut *mut WrModel,
) -> WrStatus {
    guard(|| {
        if out.is_null() || y.is_null() {
            return invalid("out or y is null");
        }
        let x = match matrix_arg(x, n, p) {
            Ok(x) => x,
            Err(s) => return s,
        };
        let y = std::slice::from_raw_parts(y, n);
        let opts = if options.is_null() {
            wr_fit_options_default()
        } else {
            *options
        };
        let mut config = FitConfig::default();
        if !opts.filter.is_null() {
            match str_arg(opts.filter, "filter") {
                Ok(f) => config.filter = f.to_string(),
                Err(s) => return s,
            }
        }
        config.level = u32::try_from(opts.level).ok();
        config.beta = (opts.beta > 0.0).then_some(opts.beta);
        config.ridge_lambda = (opts.ridge_lambda >= 0.0).then_some(opts.ridge_lambda);
        config.quantile_restrict = (opts.quantile_coverage > 0.0).then_some(opts.quantile_coverage);
        match model::fit(&x, y, &config) {
            Ok((inner, _)) => {
                *out = Box::into_raw(Box::new(WrModel { inner }));
                WrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Predicts `n` rows of `x` (`n × p`, row-major) into `out`. Rows outside
/// the training range are clipped; their count goes to `clipped` if it is
/// not null.
///
/// # Safety
/// `model` must be a live handle, `x` must point to `n * p` doubles and
/// `out` to room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn wr_predict(
    model: *const WrModel,
    x: *const f64,
    n: usize,
    p: usize,
    out: *mut f64,
    clipped: *mut usize,
) -> WrStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return invalid("model is null");
        };
        if out.is_null() {
            return invalid("out is null");
        }
        let x = match matrix_arg(x, n, p) {
            Ok(x) => x,
            Err(s) => return s,
        };
        match m.inner.predict_with(&x, PredictOptions { strict: false }) {
            Ok(pred) => {
                std::slice::from_raw_parts_mut(out, n).copy_from_slice(&pred.values);
                if !clipped.is_null() {
                    *clipped = pred.clipped_rows;
                }
                WrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Centered component `j` (zero based) at raw value `x`, standardized scale.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wr_model_component(model: *const WrModel, j: usize, x: f64, out: *mut f64) -> WrStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return invalid("model is null");
        };
        if out.is_null() {
            return invalid("out is null");
        }
        let lo = m.inner.x_min().get(j).copied().unwrap_or(0.0);
        let hi = m.inner.x_max().get(j).copied().unwrap_or(1.0);
        let u = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        match m.inner.component(j, u) {
            Ok(v) => {
                *out = v;
                WrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes the model file.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wr_model_save(model: *const WrModel, path: *const c_char) -> WrStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return invalid("model is null");
        };
        let path = match str_arg(path, "path") {
            Ok(p) => PathBuf::from(p),
            Err(s) => return s,
        };
        match model::save_model(&m.inner, &path) {
            Ok(()) => WrStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Reads a model file into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn wr_model_load(path: *const c_char, out: *mut *mut WrModel) -> WrStatus {
    guard(|| {
        if out.is_null() {
            return invalid("out is null");
        }
        let path = match str_arg(path, "path") {
            Ok(p) => PathBuf::from(p),
            Err(s) => return s,
        };
        match model::load_model(&path) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(WrModel { inner }));
                WrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wr_model_free(model: *mut WrModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of predictors, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wr_model_predictors(model: *const WrModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.predictors())
}

/// Resolution level, or -1 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wr_model_level(model: *const WrModel) -> i32 {
    model.as_ref().map_or(-1, |m| m.inner.level() as i32)
}

/// Truncation threshold on the standardized scale, NaN for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wr_model_beta(model: *const WrModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.inner.beta_n())
}

/// Noise estimate on the standardized scale, NaN for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wr_model_sigma_hat(model: *const WrModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.inner.sigma_hat())
}
