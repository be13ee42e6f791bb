//! C ABI over the `gelfand-orbit` engine.
//!
//! Pairs are exposed as opaque `GorbPair` handles. Every fallible function
//! returns a [`GorbStatus`]; on failure a message is available from
//! [`gorb_last_error`] on the same thread. Strings returned through `char **`
//! out-parameters must be released with [`gorb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gelfand_orbit::fock::{eigenvalue_type1, eigenvalue_type2, FockModel};
use gelfand_orbit::moment::spherical_point_type1;
use gelfand_orbit::pairs::{builtin, load_pair, pair_from_json, pair_to_json, validate_pair, PairSpec, Point};
use gelfand_orbit::spectrum::{orbit_signature, phi_embed, SphericalParam};
use gelfand_orbit::Error;
use num::complex::Complex64;
use num::rational::BigRational;

/// Opaque pair handle.
pub struct GorbPair {
    spec: PairSpec,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GorbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Schema = 3,
    Validation = 4,
    Numeric = 5,
    Io = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GorbStatus {
    match e {
        Error::Schema(_) | Error::Json(_) | Error::UnknownPair(_) => GorbStatus::Schema,
        Error::Validation(_) => GorbStatus::Validation,
        Error::Io(_) | Error::Csv(_) => GorbStatus::Io,
        Error::NoConvergence { .. }
        | Error::ComplexEigenvalue { .. }
        | Error::InterpolationResidual { .. }
        | Error::DegreeBound { .. }
        | Error::NotEigenvector { .. }
        | Error::WellAdaptedViolation { .. }
        | Error::DegenerateForm { .. } => GorbStatus::Numeric,
        _ => GorbStatus::InvalidArgument,
    }
}

struct Fail(GorbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(GorbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GorbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GorbStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GorbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(GorbStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn pair_arg<'a>(p: *const GorbPair) -> Result<&'a PairSpec, Fail> {
    p.as_ref().map(|h| &h.spec).ok_or_else(|| null("pair"))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len < need {
        return Err(Fail(GorbStatus::InvalidArgument, format!("{what} holds {len} values, {need} required")));
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn complex_from_interleaved(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

unsafe fn put_pair(out: *mut *mut GorbPair, spec: PairSpec) -> Result<(), Fail> {
    write_out(out, Box::into_raw(Box::new(GorbPair { spec })), "out")
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(GorbStatus::Io, "string contains NUL".into()))?;
    write_out(out, c.into_raw(), "out")
}

/// Creates a handle for a builtin pair (`heisenberg1`..`heisenberg4`, `u2su2`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gorb_pair_builtin(name: *const c_char, out: *mut *mut GorbPair) -> GorbStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        put_pair(out, builtin(name)?)
    })
}

/// Loads and validates a pair file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gorb_pair_load(path: *const c_char, out: *mut *mut GorbPair) -> GorbStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put_pair(out, load_pair(path)?)
    })
}

/// Parses a pair from JSON text without running validation.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gorb_pair_from_json(json: *const c_char, out: *mut *mut GorbPair) -> GorbStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        put_pair(out, pair_from_json(text)?)
    })
}

/// Releases a handle. Passing null is a no-op.
///
/// # Safety
/// `pair` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gorb_pair_free(pair: *mut GorbPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Serializes a pair to JSON; free the result with [`gorb_string_free`].
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gorb_pair_to_json(pair: *const GorbPair, out: *mut *mut c_char) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        put_string(out, pair_to_json(p))
    })
}

/// Runs all structural checks. `passed` receives 1 or 0; on 0 the first
/// failing check is available from [`gorb_last_error`].
///
/// # Safety
/// `pair` must be a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gorb_pair_validate(pair: *const GorbPair, passed: *mut c_int) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        let report = validate_pair(p);
        if let Some(c) = report.first_failure() {
            set_error(format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()));
        }
        write_out(passed, c_int::from(report.passed()), "passed")
    })
}

/// Writes `n = dim_C V`, `d = dim z` and the rank `r`; the invariant count is `r + 1`.
///
/// # Safety
/// `pair` must be a live handle; each out pointer must be valid.
#[no_mangle]
pub unsafe extern "C" fn gorb_pair_dims(pair: *const GorbPair, n: *mut usize, d: *mut usize, r: *mut usize) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        write_out(n, p.n, "n")?;
        write_out(d, p.d, "d")?;
        write_out(r, p.rank(), "r")
    })
}

/// Exact type I eigenvalue of invariant `index` at `λ = lambda_num / lambda_den`.
/// The value is returned as a string such as `-5`, `1/2i` or `(1/2-3i)`, and
/// numerically through `re` and `im` (either may be null).
///
/// # Safety
/// `m` must point to `m_len` values; `out` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn gorb_eigenvalue_type1(
    pair: *const GorbPair,
    index: usize,
    lambda_num: i64,
    lambda_den: i64,
    m: *const u32,
    m_len: usize,
    re: *mut f64,
    im: *mut f64,
    out: *mut *mut c_char,
) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        if lambda_den == 0 {
            return Err(Fail(GorbStatus::InvalidArgument, "lambda denominator is zero".into()));
        }
        let lambda = BigRational::new(lambda_num.into(), lambda_den.into());
        let m = slice_arg(m, m_len, "m")?;
        if m.len() != p.rank() {
            return Err(Error::Arity { what: "m", expected: p.rank(), got: m.len() }.into());
        }
        let value = eigenvalue_type1(p, index, &lambda, m)?;
        let c = value.to_complex();
        if !re.is_null() {
            re.write(c.re);
        }
        if !im.is_null() {
            im.write(c.im);
        }
        if !out.is_null() {
            put_string(out, value.to_string())?;
        }
        Ok(())
    })
}

/// Type II eigenvalue `p(ib, 0)`; `b` holds `2n` interleaved real and imaginary parts.
///
/// # Safety
/// `b` must point to `b_len` values; `re` and `im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gorb_eigenvalue_type2(
    pair: *const GorbPair,
    index: usize,
    b: *const f64,
    b_len: usize,
    re: *mut f64,
    im: *mut f64,
) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        let b = slice_arg(b, b_len, "b")?;
        if b.len() != 2 * p.n {
            return Err(Error::Arity { what: "b", expected: 2 * p.n, got: b.len() }.into());
        }
        let value = eigenvalue_type2(p, index, &complex_from_interleaved(b))?;
        write_out(re, value.re, "re")?;
        write_out(im, value.im, "im")
    })
}

unsafe fn write_phi(p: &PairSpec, param: &SphericalParam, out: *mut f64, out_len: usize) -> Result<(), Fail> {
    let dst = out_slice(out, out_len, p.invariants.len(), "out")?;
    let model = FockModel::new(p);
    let phi = phi_embed(&model, param)?;
    dst.copy_from_slice(&phi.values);
    Ok(())
}

/// Eigenvalue vector of the type I parameter `(λ, m)`; `out` receives `r + 1` values.
///
/// # Safety
/// `m` must point to `m_len` values and `out` to at least `out_len`.
#[no_mangle]
pub unsafe extern "C" fn gorb_phi_embed_type1(
    pair: *const GorbPair,
    lambda: f64,
    m: *const u32,
    m_len: usize,
    out: *mut f64,
    out_len: usize,
) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        let m = slice_arg(m, m_len, "m")?.to_vec();
        write_phi(p, &SphericalParam::type1(lambda, m)?, out, out_len)
    })
}

/// Eigenvalue vector of the type II parameter `b` (`2n` interleaved values).
///
/// # Safety
/// `b` must point to `b_len` values and `out` to at least `out_len`.
#[no_mangle]
pub unsafe extern "C" fn gorb_phi_embed_type2(
    pair: *const GorbPair,
    b: *const f64,
    b_len: usize,
    out: *mut f64,
    out_len: usize,
) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        let b = slice_arg(b, b_len, "b")?;
        if b.len() != 2 * p.n {
            return Err(Error::Arity { what: "b", expected: 2 * p.n, got: b.len() }.into());
        }
        write_phi(p, &SphericalParam::TypeII { b: complex_from_interleaved(b) }, out, out_len)
    })
}

/// Solves for the spherical point of `(λ, m)`. `v_out` receives `2n`
/// interleaved values; the `z` component is `λA`.
///
/// # Safety
/// `m` must point to `m_len` values, `v_out` to at least `v_len`, and
/// `residual` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn gorb_spherical_point(
    pair: *const GorbPair,
    lambda: f64,
    m: *const u32,
    m_len: usize,
    seed: u64,
    v_out: *mut f64,
    v_len: usize,
    residual: *mut f64,
) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        let m = slice_arg(m, m_len, "m")?;
        if m.len() != p.rank() {
            return Err(Error::Arity { what: "m", expected: p.rank(), got: m.len() }.into());
        }
        let dst = out_slice(v_out, v_len, 2 * p.n, "v_out")?;
        let sp = spherical_point_type1(p, lambda, m, seed)?;
        for (k, x) in sp.v.iter().enumerate() {
            dst[2 * k] = x.re;
            dst[2 * k + 1] = x.im;
        }
        if !residual.is_null() {
            residual.write(sp.residual);
        }
        Ok(())
    })
}

/// Invariant values at the point `(v, t)`; `v` holds `2n` interleaved values
/// and `t` holds `d`.
///
/// # Safety
/// Input pointers must cover their lengths and `out` at least `out_len`.
#[no_mangle]
pub unsafe extern "C" fn gorb_orbit_signature(
    pair: *const GorbPair,
    v: *const f64,
    v_len: usize,
    t: *const f64,
    t_len: usize,
    out: *mut f64,
    out_len: usize,
) -> GorbStatus {
    guard(|| {
        let p = pair_arg(pair)?;
        let v = slice_arg(v, v_len, "v")?;
        let t = slice_arg(t, t_len, "t")?;
        if v.len() != 2 * p.n || t.len() != p.d {
            return Err(Fail(
                GorbStatus::InvalidArgument,
                format!("expected {} values for v and {} for t", 2 * p.n, p.d),
            ));
        }
        let dst = out_slice(out, out_len, p.invariants.len(), "out")?;
        let sig = orbit_signature(p, &Point::new(complex_from_interleaved(v), t.to_vec()));
        dst.copy_from_slice(&sig.values);
        Ok(())
    })
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gorb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gorb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
