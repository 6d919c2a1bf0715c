//! C ABI over `torus-crit`.
//!
//! Every fallible function returns a status code (`TC_OK` on success) and
//! writes results through out-pointers. Solutions are opaque handles owned by
//! the caller and released with `tc_solution_free`; strings returned by the
//! library are released with `tc_string_free`. After a failure,
//! `tc_last_error` describes it until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use torus_crit::exact_algebra::{format_rational, parse_rational};
use torus_crit::geometry::TorusShape;
use torus_crit::report::{Inputs, Report};
use torus_crit::solver::{self, SolutionReport};
use torus_crit::Error;

pub const TC_OK: i32 = 0;
pub const TC_INCONSISTENT: i32 = 2;
pub const TC_TOLERANCE: i32 = 3;
pub const TC_BAD_INPUT: i32 = 4;
pub const TC_DOMAIN: i32 = 5;
pub const TC_IO: i32 = 6;
pub const TC_NULL_POINTER: i32 = 7;
pub const TC_PANIC: i32 = 8;

/// Opaque solution family.
pub struct TcSolution {
    inner: SolutionReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::BadInput(_) | Error::Json(_) => TC_BAD_INPUT,
        Error::Domain(_) => TC_DOMAIN,
        Error::Inconsistent(_) => TC_INCONSISTENT,
        Error::Tolerance(_) => TC_TOLERANCE,
        Error::Io(_) => TC_IO,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), i32>) -> i32 {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TC_OK,
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic".into());
            TC_PANIC
        }
    }
}

fn fail(e: Error) -> i32 {
    let code = code_of(&e);
    set_error(e.to_string());
    code
}

fn null(what: &str) -> i32 {
    set_error(format!("{what} is null"));
    TC_NULL_POINTER
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, i32> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(Error::BadInput(format!("{what} is not UTF-8"))))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), i32> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = v;
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn box_solution(s: SolutionReport) -> *mut TcSolution {
    Box::into_raw(Box::new(TcSolution { inner: s }))
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Critical ratio `a²/r²` of the degree-`n` pure-H density, as a fraction.
///
/// # Safety
/// `num` and `den` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_constraint_ratio(n: u32, num: *mut i64, den: *mut i64) -> i32 {
    guard(|| {
        let q = solver::constraint_ratio(n).map_err(fail)?;
        let to_i64 = |x: &torus_crit::exact_algebra::Rational| -> Result<(i64, i64), i32> {
            let n = x
                .numer()
                .try_into()
                .map_err(|_| fail(Error::Domain("overflow".into())))?;
            let d = x
                .denom()
                .try_into()
                .map_err(|_| fail(Error::Domain("overflow".into())))?;
            Ok((n, d))
        };
        let (n, d) = to_i64(&q)?;
        write(num, n, "num")?;
        write(den, d, "den")
    })
}

/// Solves the degree-`n` pure-H family for the small radius `r` (`"p/q"`).
///
/// # Safety
/// `r` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_solve_pure_h(
    n: u32,
    r: *const c_char,
    out: *mut *mut TcSolution,
) -> i32 {
    guard(|| {
        let r = parse_rational(read_str(r, "r")?).map_err(fail)?;
        let s = solver::solve_pure_h(n, &r).map_err(fail)?;
        write(out, box_solution(s), "out")
    })
}

/// Solves the degree-`n` family with K-terms at fixed radii. `terms` holds
/// `n_terms` pairs `(k, m)` for `H^k K^m`; pass NULL and 0 for the default
/// term set. A family in which `a1` is forced to zero is still returned,
/// with status `TC_INCONSISTENT`.
///
/// # Safety
/// `a2` and `r` must be NUL-terminated strings, `terms` must point to
/// `2 * n_terms` readable values when non-null, and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_solve_with_gauss(
    n: u32,
    a2: *const c_char,
    r: *const c_char,
    terms: *const u32,
    n_terms: usize,
    out: *mut *mut TcSolution,
) -> i32 {
    guard(|| {
        let a2 = parse_rational(read_str(a2, "a2")?).map_err(fail)?;
        let r = parse_rational(read_str(r, "r")?).map_err(fail)?;
        let terms = if terms.is_null() {
            solver::default_gauss_terms(n)
        } else {
            std::slice::from_raw_parts(terms, 2 * n_terms)
                .chunks_exact(2)
                .map(|c| (c[0], c[1]))
                .collect()
        };
        let s = solver::solve_with_gauss(n, &a2, &r, &terms).map_err(fail)?;
        let consistent = s.consistent;
        write(out, box_solution(s), "out")?;
        if consistent {
            Ok(())
        } else {
            set_error("a1 is forced to zero at these radii".into());
            Err(TC_INCONSISTENT)
        }
    })
}

/// 1 if `a1` is free in the family, 0 if it is forced to zero, -1 on NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_is_consistent(s: *const TcSolution) -> i32 {
    match s.as_ref() {
        Some(s) => i32::from(s.inner.consistent),
        None => -1,
    }
}

/// Number of free parameters, or -1 on NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_free_count(s: *const TcSolution) -> i64 {
    s.as_ref()
        .map_or(-1, |s| s.inner.free_parameters.len() as i64)
}

/// The forced ratio as `"p/q"`, or NULL when the family has none.
///
/// # Safety
/// `s` must be NULL or a live handle. Free the result with `tc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_constraint(s: *const TcSolution) -> *mut c_char {
    s.as_ref()
        .and_then(|s| s.inner.constraint.as_ref())
        .map_or(ptr::null_mut(), |q| into_c_string(format_rational(q)))
}

/// The family as a JSON report.
///
/// # Safety
/// `s` must be a live handle and `out` valid for writes. Free the string
/// with `tc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_to_json(s: *const TcSolution, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        let inputs = Inputs {
            degree: Some(s.inner.degree),
            a2: s.inner.a2.as_ref().map(format_rational),
            r: Some(format_rational(&s.inner.r)),
            ratio: None,
            terms: s.inner.gauss_terms.iter().map(|&(k, m)| [k, m]).collect(),
            with_gauss: s.inner.a2.is_some(),
            grid: torus_crit::geometry::DEFAULT_GRID,
        };
        let json = Report::new("solve", inputs)
            .with_solution(&s.inner)
            .to_json()
            .map_err(fail)?;
        write(out, into_c_string(json), "out")
    })
}

/// Verifies the family on its own torus with free parameters `1, 2, 3, …`.
/// Returns `TC_TOLERANCE` when the residual is not exactly zero or the grid
/// residual exceeds `1e-8`.
///
/// # Safety
/// `s` must be a live handle; `exact` and `numeric` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_verify(
    s: *const TcSolution,
    exact: *mut i32,
    numeric: *mut f64,
) -> i32 {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        let v = solver::verify_report(&s.inner, &s.inner.sample_free_values()).map_err(fail)?;
        write(exact, i32::from(v.exact), "exact")?;
        write(numeric, v.numeric_max_residual, "numeric")?;
        if v.exact && v.numeric_max_residual < 1e-8 {
            Ok(())
        } else {
            set_error(format!("residual check failed: exact = {}", v.exact));
            Err(TC_TOLERANCE)
        }
    })
}

/// Mean and Gaussian curvature of the torus `(a, r)` at angle `u`.
///
/// # Safety
/// `h` and `k` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_curvatures(a: f64, r: f64, u: f64, h: *mut f64, k: *mut f64) -> i32 {
    guard(|| {
        let t = TorusShape::new(a, r).map_err(fail)?;
        let (hv, kv) = t.curvatures(u);
        write(h, hv, "h")?;
        write(k, kv, "k")
    })
}

/// Energy of the zero-pressure degree-`n` family with `a1 = 1` on the torus
/// with `a² = ratio · r²`, by quadrature on `grid` nodes.
///
/// # Safety
/// `ratio` and `r` must be NUL-terminated strings; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_family_energy(
    n: u32,
    ratio: *const c_char,
    r: *const c_char,
    grid: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let rho = parse_rational(read_str(ratio, "ratio")?).map_err(fail)?;
        let r = parse_rational(read_str(r, "r")?).map_err(fail)?;
        let r2 = &r * &r;
        let t = TorusShape::from_exact(&(rho * &r2), &r2).map_err(fail)?;
        let e = torus_crit::energetics::family_energy(n, &t, grid).map_err(fail)?;
        write(out, e.total, "out")
    })
}

/// Releases a solution handle. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_free(s: *mut TcSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `p` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}
