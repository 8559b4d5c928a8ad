//! C ABI over `circulant-clt`.
//!
//! Every fallible function returns a [`CcltStatus`]; on failure the message is
//! available from [`cclt_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function. Strings returned through
//! `char **out` are owned by the caller and released with [`cclt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_traits::ToPrimitive;

use circulant_clt::{
    chatterjee_tv_bound, count_slice_exact, emit_report, f_density, limiting_variance,
    parse_config, run_clt_experiment, CirculantSample, EnsembleSpec, Error, Family,
    RandomStream, ReportFormat, SummaryDocument, TestPolynomial,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcltStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExceeded = 3,
    NotSmooth = 4,
    NotSymmetric = 5,
    Numerical = 6,
    Config = 7,
    Io = 8,
    Panic = 9,
}

/// Input ensembles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcltFamily {
    Gaussian = 0,
    Rademacher = 1,
    UniformSymmetric = 2,
    CustomSmooth = 3,
}

/// Opaque polynomial `Σ_{k>=2} a_k x^k`.
pub struct CcltPolynomial(TestPolynomial);

/// Opaque circulant sample.
pub struct CcltSample(CirculantSample);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CcltStatus {
    match e {
        Error::BudgetExceeded { .. } => CcltStatus::BudgetExceeded,
        Error::ImaginaryResidual { .. } => CcltStatus::Numerical,
        Error::NotSmooth(_) => CcltStatus::NotSmooth,
        Error::NotSymmetric(_) => CcltStatus::NotSymmetric,
        Error::InvalidArgument(_) => CcltStatus::InvalidArgument,
        Error::Config(_) => CcltStatus::Config,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => CcltStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CcltStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcltStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed for `{what}`"));
            CcltStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            CcltStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn in_slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn in_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidArgument(format!("`{what}` is not valid UTF-8"))))
}

fn give_string(out: &mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s)
        .map_err(|_| Failure::Lib(Error::InvalidArgument("output contains a nul byte".into())))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cclt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cclt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cclt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `f_p(s)` as a double.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_f_density(p: u32, s: u32, out: *mut f64) -> CcltStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let f = f_density(p, s)?;
        *out = f.to_f64().unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Exact `|A_{p,s}|` at box size `n`, as a decimal string.
///
/// # Safety
/// `out` must be valid for writes; free the result with `cclt_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cclt_slice_count(p: u32, s: u32, n: u64, out: *mut *mut c_char) -> CcltStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        give_string(out, count_slice_exact(p, s, n)?.to_string())
    })
}

/// Creates a polynomial from dense coefficients `a_0, a_1, …, a_d`;
/// `a_0` and `a_1` must be zero.
///
/// # Safety
/// `coeffs` must point to `len` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_polynomial_new(
    coeffs: *const f64,
    len: usize,
    out: *mut *mut CcltPolynomial,
) -> CcltStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let dense = in_slice(coeffs, len, "coeffs")?;
        let poly = TestPolynomial::from_dense(dense)?;
        *out = Box::into_raw(Box::new(CcltPolynomial(poly)));
        Ok(())
    })
}

/// # Safety
/// `poly` must come from `cclt_polynomial_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cclt_polynomial_free(poly: *mut CcltPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Limiting variance `Σ a_ℓ² ℓ! Σ_s f_ℓ(s)`.
///
/// # Safety
/// `poly` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_limiting_variance(poly: *const CcltPolynomial, out: *mut f64) -> CcltStatus {
    guard(|| {
        let poly = in_ref(poly, "poly")?;
        let out = out_ref(out, "out")?;
        *out = limiting_variance(&poly.0)?.value;
        Ok(())
    })
}

fn spec_of(family: CcltFamily, blend: f64) -> Result<EnsembleSpec, Error> {
    match family {
        CcltFamily::Gaussian => Ok(EnsembleSpec::from_family(Family::Gaussian)),
        CcltFamily::Rademacher => Ok(EnsembleSpec::from_family(Family::Rademacher)),
        CcltFamily::UniformSymmetric => Ok(EnsembleSpec::from_family(Family::UniformSymmetric)),
        CcltFamily::CustomSmooth => EnsembleSpec::custom_smooth(blend),
    }
}

/// Draws an `n × n` circulant sample. `blend` is read only for
/// `CCLT_FAMILY_CUSTOM_SMOOTH`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_new(
    family: CcltFamily,
    blend: f64,
    n: usize,
    master_seed: u64,
    replica_index: u64,
    out: *mut *mut CcltSample,
) -> CcltStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = spec_of(family, blend)?;
        let sample = CirculantSample::build(&spec, n, RandomStream::new(master_seed, replica_index))?;
        *out = Box::into_raw(Box::new(CcltSample(sample)));
        Ok(())
    })
}

/// Wraps raw inputs `X_0, …, X_{n-1}`; the first row is `X / √n`.
///
/// # Safety
/// `raw` must point to `n` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_from_raw(raw: *const f64, n: usize, out: *mut *mut CcltSample) -> CcltStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let raw = in_slice(raw, n, "raw")?;
        if raw.is_empty() {
            return Err(Error::InvalidArgument("sample needs n >= 1".into()).into());
        }
        *out = Box::into_raw(Box::new(CcltSample(CirculantSample::from_raw(raw.to_vec()))));
        Ok(())
    })
}

/// # Safety
/// `sample` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_free(sample: *mut CcltSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Matrix dimension, or 0 for NULL.
///
/// # Safety
/// `sample` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_dim(sample: *const CcltSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the raw inputs into `buf`, which must hold `dim` doubles.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_raw_inputs(sample: *const CcltSample, buf: *mut f64, len: usize) -> CcltStatus {
    guard(|| {
        let sample = in_ref(sample, "sample")?;
        copy_out(sample.0.raw_inputs(), buf, len)
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if len != src.len() {
        return Err(Error::InvalidArgument(format!("buffer holds {len} values, need {}", src.len())).into());
    }
    if buf.is_null() {
        return Err(Failure::Null("buf"));
    }
    std::slice::from_raw_parts_mut(buf, len).copy_from_slice(src);
    Ok(())
}

/// `Tr C^p` through the spectrum.
///
/// # Safety
/// `sample` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_trace_power(sample: *const CcltSample, p: u32, out: *mut f64) -> CcltStatus {
    guard(|| {
        let sample = in_ref(sample, "sample")?;
        let out = out_ref(out, "out")?;
        *out = sample.0.trace_power_spectral(p)?;
        Ok(())
    })
}

/// `Tr C^p` by direct index enumeration, refused above `budget` tuples.
///
/// # Safety
/// `sample` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_trace_power_direct(
    sample: *const CcltSample,
    p: u32,
    budget: u64,
    out: *mut f64,
) -> CcltStatus {
    guard(|| {
        let sample = in_ref(sample, "sample")?;
        let out = out_ref(out, "out")?;
        *out = sample.0.trace_power_direct(p, budget)?;
        Ok(())
    })
}

/// `Tr P(C)`.
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_trace_polynomial(
    sample: *const CcltSample,
    poly: *const CcltPolynomial,
    out: *mut f64,
) -> CcltStatus {
    guard(|| {
        let sample = in_ref(sample, "sample")?;
        let poly = in_ref(poly, "poly")?;
        let out = out_ref(out, "out")?;
        *out = sample.0.trace_polynomial(&poly.0)?;
        Ok(())
    })
}

/// Spectral norm `max_t |λ_t|`.
///
/// # Safety
/// `sample` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_spectral_norm(sample: *const CcltSample, out: *mut f64) -> CcltStatus {
    guard(|| {
        let sample = in_ref(sample, "sample")?;
        let out = out_ref(out, "out")?;
        *out = sample.0.spectral_norm();
        Ok(())
    })
}

/// Gradient of `X ↦ Tr P(C)` with respect to the raw inputs, written to `buf`
/// (`len` must equal the dimension).
///
/// # Safety
/// Handles must be live; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cclt_sample_gradient(
    sample: *const CcltSample,
    poly: *const CcltPolynomial,
    buf: *mut f64,
    len: usize,
) -> CcltStatus {
    guard(|| {
        let sample = in_ref(sample, "sample")?;
        let poly = in_ref(poly, "poly")?;
        let grad = sample.0.gradient_trace_polynomial(&poly.0)?;
        copy_out(&grad, buf, len)
    })
}

/// Runs a Monte Carlo experiment described by a TOML config and returns the
/// JSON summary.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out_json` must be valid
/// for writes. Free the result with `cclt_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cclt_run_experiment(config_toml: *const c_char, out_json: *mut *mut c_char) -> CcltStatus {
    guard(|| {
        let text = in_str(config_toml, "config_toml")?;
        let out = out_ref(out_json, "out_json")?;
        let config = parse_config(text)?;
        let doc = SummaryDocument::new(&config).with_summary(run_clt_experiment(&config)?);
        json_out(out, &doc)
    })
}

/// Total-variation bound estimate for a TOML config, as JSON.
///
/// # Safety
/// As for `cclt_run_experiment`.
#[no_mangle]
pub unsafe extern "C" fn cclt_tv_bound(config_toml: *const c_char, out_json: *mut *mut c_char) -> CcltStatus {
    guard(|| {
        let text = in_str(config_toml, "config_toml")?;
        let out = out_ref(out_json, "out_json")?;
        let config = parse_config(text)?;
        let doc = SummaryDocument::new(&config).with_stein(chatterjee_tv_bound(&config)?);
        json_out(out, &doc)
    })
}

fn json_out(out: &mut *mut c_char, doc: &SummaryDocument) -> Result<(), Failure> {
    let bytes = emit_report(doc, ReportFormat::Json)?;
    give_string(out, String::from_utf8(bytes).expect("json is utf-8"))
}
