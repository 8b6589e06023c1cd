//! C ABI over `charpoly`.
//!
//! Every fallible call returns a [`CpStatus`]; on failure the message is kept
//! per thread and read with [`cp_last_error`]. Ensembles are opaque handles
//! created by [`cp_ensemble_new`] and released by [`cp_ensemble_free`].
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use charpoly::asymptotics::{gamma_k, kernel_goe, kernel_sine};
use charpoly::dual::{dual_correlator, DualIntegralRequest, DualMethod};
use charpoly::ensembles::{mc_correlator, wick_oracle, EnsembleKind, EnsembleSpec, LambdaPoints};
use charpoly::hiz::{chi_eval, TauTable};
use charpoly::linalg::{pfaffian, ComplexSquareMatrix};
use charpoly::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    InvalidArgument = 1,
    DimensionMismatch = 2,
    Degenerate = 3,
    Budget = 4,
    Numerical = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CpComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for CpComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpEnsembleKind {
    Goe = 0,
    Gue = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpDualMethod {
    Monomial = 0,
    Quadrature = 1,
}

/// Opaque ensemble handle.
pub struct CpEnsemble {
    spec: EnsembleSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CpStatus {
    match e {
        Error::InvalidArgument(_) => CpStatus::InvalidArgument,
        Error::DimensionMismatch { .. } => CpStatus::DimensionMismatch,
        Error::Degenerate(_) => CpStatus::Degenerate,
        Error::Budget { .. } => CpStatus::Budget,
        Error::Numerical(_) => CpStatus::Numerical,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CpStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            CpStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            CpStatus::Panic
        }
    }
}

/// Borrows `len` values; a zero length accepts a null pointer.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn ensemble<'a>(h: *const CpEnsemble) -> Result<&'a CpEnsemble, Failure> {
    h.as_ref().ok_or(Failure::Null("ensemble"))
}

// Enum-typed parameters arrive as plain integers so that an out-of-range value
// from C is an error rather than undefined behavior.
fn to_kind(k: u32) -> Result<EnsembleKind, Failure> {
    match k {
        k if k == CpEnsembleKind::Goe as u32 => Ok(EnsembleKind::Goe),
        k if k == CpEnsembleKind::Gue as u32 => Ok(EnsembleKind::Gue),
        other => Err(Error::InvalidArgument(format!("unknown ensemble kind {other}")).into()),
    }
}

fn to_method(m: u32) -> Result<DualMethod, Failure> {
    match m {
        m if m == CpDualMethod::Monomial as u32 => Ok(DualMethod::MonomialExact),
        m if m == CpDualMethod::Quadrature as u32 => Ok(DualMethod::Quadrature),
        other => Err(Error::InvalidArgument(format!("unknown dual method {other}")).into()),
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an ensemble of dimension `dim`; `kind` is a `CpEnsembleKind` value. `source` is null or points to `dim` values.
///
/// # Safety
/// `source` must be null or valid for `dim` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cp_ensemble_new(
    kind: u32,
    dim: usize,
    source: *const f64,
    out: *mut *mut CpEnsemble,
) -> CpStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        out.write(ptr::null_mut());
        let src = if source.is_null() {
            None
        } else {
            Some(slice(source, dim, "source")?.to_vec())
        };
        let spec = EnsembleSpec::with_source(to_kind(kind)?, dim, src)?;
        out.write(Box::into_raw(Box::new(CpEnsemble { spec })));
        Ok(())
    })
}

/// Releases a handle from [`cp_ensemble_new`]. Null is ignored.
///
/// # Safety
/// `h` must come from `cp_ensemble_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cp_ensemble_free(h: *mut CpEnsemble) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Monte Carlo estimate of `E[∏ det(λ_i − X)]`.
///
/// # Safety
/// `lambdas` valid for `k` reads; outputs writable (`out_stderr` may be null).
#[no_mangle]
pub unsafe extern "C" fn cp_mc_correlator(
    h: *const CpEnsemble,
    lambdas: *const f64,
    k: usize,
    samples: u64,
    seed: u64,
    out: *mut CpComplex,
    out_stderr: *mut f64,
) -> CpStatus {
    guard(|| {
        let e = ensemble(h)?;
        let l = LambdaPoints::new(slice(lambdas, k, "lambdas")?.to_vec())?;
        let est = mc_correlator(&e.spec, &l, samples, seed)?;
        write(out, est.mean.into(), "out")?;
        if !out_stderr.is_null() {
            out_stderr.write(est.stderr);
        }
        Ok(())
    })
}

/// Exact small-N expectation (N ≤ 3, k ≤ 4).
///
/// # Safety
/// `lambdas` valid for `k` reads; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_wick_oracle(h: *const CpEnsemble, lambdas: *const f64, k: usize, out: *mut CpComplex) -> CpStatus {
    guard(|| {
        let e = ensemble(h)?;
        let l = LambdaPoints::new(slice(lambdas, k, "lambdas")?.to_vec())?;
        write(out, wick_oracle(&e.spec, &l)?.into(), "out")
    })
}

/// Exact dual-integral evaluation; `method` is a `CpDualMethod` value.
///
/// # Safety
/// `lambdas` valid for `k` reads; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_dual_correlator(
    h: *const CpEnsemble,
    lambdas: *const f64,
    k: usize,
    method: u32,
    out: *mut CpComplex,
) -> CpStatus {
    guard(|| {
        let e = ensemble(h)?;
        let l = LambdaPoints::new(slice(lambdas, k, "lambdas")?.to_vec())?;
        let m = to_method(method)?;
        let v = dual_correlator(&DualIntegralRequest::new(e.spec.clone(), l).with_method(m))?;
        write(out, v.value.into(), "out")
    })
}

/// Pfaffian of an antisymmetric `dim × dim` matrix given row-major.
///
/// # Safety
/// `entries` valid for `dim²` reads; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_pfaffian(entries: *const CpComplex, dim: usize, out: *mut CpComplex) -> CpStatus {
    guard(|| {
        let len = dim.checked_mul(dim).ok_or(Error::InvalidArgument("dimension overflows".into()))?;
        let data = slice(entries, len, "entries")?.iter().map(|z| Complex64::new(z.re, z.im)).collect();
        let m = ComplexSquareMatrix::new(dim, data)?;
        write(out, pfaffian(&m)?.into(), "out")
    })
}

/// γ_k rounded to double; `kind` is a `CpEnsembleKind` value.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_gamma_k(kind: u32, k: usize, out: *mut f64) -> CpStatus {
    guard(|| write(out, gamma_k(to_kind(kind)?, k)?.to_f64(), "out"))
}

/// `cos x/x² − sin x/x³`.
#[no_mangle]
pub extern "C" fn cp_kernel_goe(x: f64) -> f64 {
    kernel_goe(x)
}

/// `sin x / x`.
#[no_mangle]
pub extern "C" fn cp_kernel_sine(x: f64) -> f64 {
    kernel_sine(x)
}

/// χ_k at the `k(k−1)/2` values τ_12, τ_13, …, τ_{k−1,k}.
///
/// # Safety
/// `tau` valid for `k(k−1)/2` reads; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cp_chi_eval(k: usize, tau: *const CpComplex, out: *mut CpComplex) -> CpStatus {
    guard(|| {
        let pairs = k.saturating_mul(k.saturating_sub(1)) / 2;
        let t = slice(tau, pairs, "tau")?.iter().map(|z| Complex64::new(z.re, z.im)).collect();
        write(out, chi_eval(k, &TauTable::new(k, t)?)?.into(), "out")
    })
}
