//! C ABI over the polypick library.
//!
//! Conventions:
//! - Constructors return an opaque handle, or null on failure; call
//!   [`ppk_last_error`] on the same thread for the message.
//! - Functions returning [`PpkStatus`] write results through out-pointers
//!   only on `PPK_STATUS_OK`.
//! - Strings returned by `*_to_json` are owned by the caller and must be
//!   released with [`ppk_string_free`].
//! - Handles must be released with their matching `*_free`; passing a handle
//!   to any other library is undefined behavior.
//!
//! The header `include/polypick.h` is regenerated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polypick::schema::{
    self, CertificateJson, CurveJson, InnerJson, ProblemJson,
};
use polypick::{
    build_pick_matrix, certify, construct_problem, extend_value, CertifyConfig, Error,
    ExtensionPoint, KernelConfig, ParamCurve, PickProblem, RationalInner, UniquenessCertificate,
    C64,
};

/// Result codes of fallible calls.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PpkStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input failed validation (schema, tolerance, domain).
    InvalidInput = 3,
    /// A numerical step failed (pole, eigensolver, ill-posed extension).
    Numeric = 4,
    /// The operation does not apply to this handle (e.g. ambient kernel).
    Unsupported = 5,
    /// An internal panic was caught; state may be inconsistent.
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let cstring = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &Error) -> PpkStatus {
    match err {
        Error::InvalidInput(_) | Error::Json(_) | Error::Io(_) => PpkStatus::InvalidInput,
        Error::NotCurveKernel => PpkStatus::Unsupported,
        Error::DimMismatch { .. }
        | Error::ZeroPolynomial
        | Error::ReflectionDegree { .. }
        | Error::NotUnimodular(_)
        | Error::DenominatorVanishesAtOrigin
        | Error::BlaschkeZeroOnBoundary(_)
        | Error::OutsideClosedDisc(_)
        | Error::OutsideOpenDisc(_)
        | Error::OutsidePolydisc
        | Error::TargetOutsideDisc { .. }
        | Error::DuplicateNode(_, _)
        | Error::NodeOffCurve { .. }
        | Error::InsufficientNodes { .. }
        | Error::QuadratureTooCoarse { .. }
        | Error::PerturbationDegree { .. }
        | Error::SimpleDegreeMismatch { .. } => PpkStatus::InvalidInput,
        _ => PpkStatus::Numeric,
    }
}

fn record(err: Error) -> PpkStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn ppk_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr())
    })
}

/// Release a string returned by a `*_to_json` function.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn ppk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

unsafe fn parse_utf8<'a>(ptr: *const c_char) -> Result<&'a str, PpkStatus> {
    if ptr.is_null() {
        set_error("null pointer argument".into());
        return Err(PpkStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        PpkStatus::InvalidUtf8
    })
}

fn guarded_handle<T, F: FnOnce() -> Result<T, Error>>(body: F) -> *mut T {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match outcome {
        Ok(Ok(value)) => Box::into_raw(Box::new(value)),
        Ok(Err(err)) => {
            record(err);
            ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic".into());
            ptr::null_mut()
        }
    }
}

fn guarded_status<F: FnOnce() -> Result<(), Error>>(body: F) -> PpkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PpkStatus::Ok,
        Ok(Err(err)) => record(err),
        Err(_) => {
            set_error("internal panic".into());
            PpkStatus::Panic
        }
    }
}

/// Rationally parameterized inner curve (opaque).
pub struct PpkCurve(ParamCurve);
/// Rational inner function in Rudin form (opaque).
pub struct PpkFunction(RationalInner);
/// Pick problem with its kernel source (opaque).
pub struct PpkProblem(PickProblem);
/// Uniqueness certificate (opaque).
pub struct PpkCertificate {
    problem: ProblemJson,
    cert: UniquenessCertificate,
}

/// Parse a curve from its JSON encoding; null on error.
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ppk_curve_from_json(json: *const c_char) -> *mut PpkCurve {
    let Ok(text) = (unsafe { parse_utf8(json) }) else { return ptr::null_mut() };
    guarded_handle(|| {
        let j: CurveJson = serde_json::from_str(text)?;
        Ok(PpkCurve(ParamCurve::try_from(&j)?))
    })
}

/// # Safety
/// `curve` must come from [`ppk_curve_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ppk_curve_free(curve: *mut PpkCurve) {
    if !curve.is_null() {
        drop(unsafe { Box::from_raw(curve) });
    }
}

/// Parse a rational inner function from its JSON encoding; null on error.
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ppk_function_from_json(json: *const c_char) -> *mut PpkFunction {
    let Ok(text) = (unsafe { parse_utf8(json) }) else { return ptr::null_mut() };
    guarded_handle(|| {
        let j: InnerJson = serde_json::from_str(text)?;
        Ok(PpkFunction(RationalInner::try_from(&j)?))
    })
}

/// # Safety
/// `function` must come from [`ppk_function_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ppk_function_free(function: *mut PpkFunction) {
    if !function.is_null() {
        drop(unsafe { Box::from_raw(function) });
    }
}

/// Degree of the function on the curve (rank/degree formula, cross-checked
/// against the winding oracle).
///
/// # Safety
/// All handles must be valid; `out_degree` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn ppk_degree_on_curve(
    curve: *const PpkCurve,
    function: *const PpkFunction,
    out_degree: *mut u64,
) -> PpkStatus {
    if curve.is_null() || function.is_null() || out_degree.is_null() {
        set_error("null pointer argument".into());
        return PpkStatus::NullPointer;
    }
    let curve = unsafe { &(*curve).0 };
    let function = unsafe { &(*function).0 };
    guarded_status(|| {
        let deg = polypick::degree_on_curve(curve, function)?;
        unsafe { *out_degree = deg as u64 };
        Ok(())
    })
}

/// Sample `n_nodes` curve points on the circle `|t| = radius`, target them
/// with the function, and pose the problem against the curve kernel of the
/// given truncation degree and quadrature size. Null on error.
///
/// # Safety
/// All handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn ppk_construct_problem(
    curve: *const PpkCurve,
    function: *const PpkFunction,
    n_nodes: u64,
    radius: f64,
    degree: u64,
    quad: u64,
) -> *mut PpkProblem {
    if curve.is_null() || function.is_null() {
        set_error("null pointer argument".into());
        return ptr::null_mut();
    }
    let curve = unsafe { &(*curve).0 };
    let function = unsafe { &(*function).0 };
    guarded_handle(|| {
        let cfg = KernelConfig { max_total_degree: degree as usize, quad_points: quad as usize };
        let constructed = construct_problem(curve, function, n_nodes as usize, radius, cfg)?;
        Ok(PpkProblem(constructed.problem))
    })
}

/// Parse a problem file; rebuilds the kernel space, so this requadratures.
/// Null on error.
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ppk_problem_from_json(json: *const c_char) -> *mut PpkProblem {
    let Ok(text) = (unsafe { parse_utf8(json) }) else { return ptr::null_mut() };
    guarded_handle(|| {
        let j: ProblemJson = serde_json::from_str(text)?;
        Ok(PpkProblem(schema::problem_from_json(&j, None)?))
    })
}

/// Serialize the problem; release with [`ppk_string_free`]. Null on error.
///
/// # Safety
/// `problem` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ppk_problem_to_json(problem: *const PpkProblem) -> *mut c_char {
    if problem.is_null() {
        set_error("null pointer argument".into());
        return ptr::null_mut();
    }
    let problem = unsafe { &(*problem).0 };
    match catch_unwind(AssertUnwindSafe(|| {
        let j = ProblemJson::from(problem);
        serde_json::to_string_pretty(&j)
    })) {
        Ok(Ok(text)) => CString::new(text).map_or(ptr::null_mut(), CString::into_raw),
        Ok(Err(e)) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic".into());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `problem` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ppk_problem_free(problem: *mut PpkProblem) {
    if !problem.is_null() {
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Run all uniqueness checks. `epsilon > 0` fixes the perturbation size,
/// any other value searches the decreasing sequence. Null on error; a
/// certificate with failing clauses is still returned (inspect
/// [`ppk_certificate_all_pass`]).
///
/// # Safety
/// All handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn ppk_certify(
    problem: *const PpkProblem,
    function: *const PpkFunction,
    seed: u64,
    epsilon: f64,
) -> *mut PpkCertificate {
    if problem.is_null() || function.is_null() {
        set_error("null pointer argument".into());
        return ptr::null_mut();
    }
    let problem = unsafe { &(*problem).0 };
    let function = unsafe { &(*function).0 };
    guarded_handle(|| {
        let config = CertifyConfig {
            seed,
            epsilon: if epsilon > 0.0 { Some(epsilon) } else { None },
            ..CertifyConfig::default()
        };
        let cert = certify(problem, function, &config)?;
        Ok(PpkCertificate { problem: ProblemJson::from(problem), cert })
    })
}

/// 1 if every clause passed, 0 if some clause failed, -1 on null input.
///
/// # Safety
/// `cert` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn ppk_certificate_all_pass(cert: *const PpkCertificate) -> i32 {
    if cert.is_null() {
        return -1;
    }
    let cert = unsafe { &*cert };
    i32::from(cert.cert.all_pass())
}

/// Serialize the certificate; release with [`ppk_string_free`]. Null on error.
///
/// # Safety
/// `cert` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ppk_certificate_to_json(cert: *const PpkCertificate) -> *mut c_char {
    if cert.is_null() {
        set_error("null pointer argument".into());
        return ptr::null_mut();
    }
    let cert = unsafe { &*cert };
    let json: CertificateJson = schema::certificate_to_json_parts(&cert.problem, &cert.cert);
    match serde_json::to_string_pretty(&json) {
        Ok(text) => CString::new(text).map_or(ptr::null_mut(), CString::into_raw),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `cert` must come from [`ppk_certify`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ppk_certificate_free(cert: *mut PpkCertificate) {
    if !cert.is_null() {
        drop(unsafe { Box::from_raw(cert) });
    }
}

fn extension_value(
    problem: &PickProblem,
    at: ExtensionPoint,
    out_re: *mut f64,
    out_im: *mut f64,
) -> Result<(), Error> {
    let pm = build_pick_matrix(problem)?;
    let config = CertifyConfig::default();
    let gamma = pm.null_vector(config.null_rel_tol).ok_or_else(|| {
        let top = pm.svals().first().copied().unwrap_or(1.0);
        let bottom = pm.svals().last().copied().unwrap_or(0.0);
        Error::NoNullVector(bottom / top.max(f64::MIN_POSITIVE))
    })?;
    let value = extend_value(problem, &gamma, &at, config.denom_tol)?;
    unsafe {
        *out_re = value.re;
        *out_im = value.im;
    }
    Ok(())
}

/// Forced value of every solution at a curve parameter `t_re + i t_im`
/// (curve-kernel problems only).
///
/// # Safety
/// `problem` must be valid; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ppk_extend_at_parameter(
    problem: *const PpkProblem,
    t_re: f64,
    t_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PpkStatus {
    if problem.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null pointer argument".into());
        return PpkStatus::NullPointer;
    }
    let problem = unsafe { &(*problem).0 };
    guarded_status(|| {
        extension_value(problem, ExtensionPoint::Parameter(C64::new(t_re, t_im)), out_re, out_im)
    })
}

/// Forced value of every solution at an ambient point (Szegő-kernel
/// problems). `point` holds `2 * dim` doubles, interleaved re, im.
///
/// # Safety
/// `problem` must be valid; `point` must hold `2 * dim` doubles; out-pointers
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ppk_extend_at_point(
    problem: *const PpkProblem,
    point: *const f64,
    dim: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PpkStatus {
    if problem.is_null() || point.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null pointer argument".into());
        return PpkStatus::NullPointer;
    }
    let problem = unsafe { &(*problem).0 };
    let coords = unsafe { std::slice::from_raw_parts(point, 2 * dim as usize) };
    let z: Vec<C64> = coords.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
    guarded_status(|| extension_value(problem, ExtensionPoint::Point(z), out_re, out_im))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NEIL_CURVE: &str = r#"{
      "coords": [
        {"tau": [1.0, 0.0], "power": 2, "zeros": []},
        {"tau": [1.0, 0.0], "power": 3, "zeros": []}
      ],
      "defining_polys": [
        {"dim": 2, "terms": [{"exp": [0, 2], "re": -1.0, "im": 0.0}, {"exp": [3, 0], "re": 1.0, "im": 0.0}]}
      ]
    }"#;

    const NEIL_FUNCTION: &str = r#"{
      "tau": [1.0, 0.0],
      "m": [3, 2],
      "q": {"dim": 2, "terms": [{"exp": [0, 0], "re": 1.0, "im": 0.0}]}
    }"#;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn parse_and_degree() {
        let curve = unsafe { ppk_curve_from_json(cstr(NEIL_CURVE).as_ptr()) };
        assert!(!curve.is_null());
        let f = unsafe { ppk_function_from_json(cstr(NEIL_FUNCTION).as_ptr()) };
        assert!(!f.is_null());
        let mut deg = 0u64;
        let status = unsafe { ppk_degree_on_curve(curve, f, &mut deg) };
        assert_eq!(status, PpkStatus::Ok);
        assert_eq!(deg, 12);
        unsafe {
            ppk_curve_free(curve);
            ppk_function_free(f);
        }
    }

    #[test]
    fn null_and_bad_inputs_set_errors() {
        let mut deg = 0u64;
        let status = unsafe { ppk_degree_on_curve(ptr::null(), ptr::null(), &mut deg) };
        assert_eq!(status, PpkStatus::NullPointer);
        assert!(!ppk_last_error().is_null());

        let bad = unsafe { ppk_curve_from_json(cstr("{ not json").as_ptr()) };
        assert!(bad.is_null());
        let msg = unsafe { CStr::from_ptr(ppk_last_error()) }.to_str().unwrap();
        assert!(!msg.is_empty());
    }
}
