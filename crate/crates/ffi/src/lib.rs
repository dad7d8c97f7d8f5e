//! C ABI for the qverify library: opaque family handles, status codes and
//! flat buffers, so other languages can drive the verification checks.
//!
//! Every function returns a [`QvStatus`]; out-parameters are written only
//! on `QV_OK`. Handles are created and released with `qv_family_new` /
//! `qv_family_mub` and `qv_family_free`. A textual description of the most
//! recent error is kept per thread and read with `qv_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qverify::families::{check_method, ControlledFamily, Method};
use qverify::meanking::{build_scheme, check_mk_equation, simulate};
use qverify::numerics::{c, ComplexMatrix};
use qverify::qkd::{check_bb84, check_e91};

/// Status code returned by every FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QvStatus {
    /// Success; out-parameters are valid.
    QvOk = 0,
    /// A pointer argument was null.
    QvNullPointer = 1,
    /// An argument was out of range or otherwise invalid.
    QvInvalidArgument = 2,
    /// The requested dimension is not shipped.
    QvUnsupportedDimension = 3,
    /// Input data could not be parsed or validated as a family.
    QvInvalidFamily = 4,
    /// Internal failure (a panic was caught at the boundary).
    QvInternal = 5,
}

/// Complementarity characterization selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QvMethod {
    QvMethodDirect = 0,
    QvMethodDoubled = 1,
    QvMethodAlpha = 2,
    QvMethodReflected = 3,
    QvMethodControlled4 = 4,
}

impl From<QvMethod> for Method {
    fn from(m: QvMethod) -> Method {
        match m {
            QvMethod::QvMethodDirect => Method::Direct,
            QvMethod::QvMethodDoubled => Method::Doubled,
            QvMethod::QvMethodAlpha => Method::Alpha,
            QvMethod::QvMethodReflected => Method::Reflected,
            QvMethod::QvMethodControlled4 => Method::Controlled4,
        }
    }
}

/// Key-distribution protocol selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QvProtocol {
    QvProtocolBb84 = 0,
    QvProtocolE91 = 1,
}

/// Opaque handle to a validated controlled family.
pub struct QvFamily {
    inner: ControlledFamily,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = CString::new(msg.to_string()).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &qverify::Error) -> QvStatus {
    set_error(err);
    match err {
        qverify::Error::UnsupportedDimension(_) => QvStatus::QvUnsupportedDimension,
        qverify::Error::ParseFamily(_) | qverify::Error::NonUnitaryBasis { .. } => {
            QvStatus::QvInvalidFamily
        }
        _ => QvStatus::QvInvalidArgument,
    }
}

fn guarded(f: impl FnOnce() -> QvStatus + std::panic::UnwindSafe) -> QvStatus {
    match catch_unwind(f) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            QvStatus::QvInternal
        }
    }
}

/// Description of the most recent error on this thread. The pointer stays
/// valid until the next failing call from the same thread.
#[no_mangle]
pub extern "C" fn qv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn qv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build the shipped unbiased basis family for a dimension. On success the
/// new handle is written to `out` and must be released with
/// `qv_family_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qv_family_mub(dim: usize, out: *mut *mut QvFamily) -> QvStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return QvStatus::QvNullPointer;
    }
    guarded(AssertUnwindSafe(|| match qverify::gf::mub_family(dim) {
        Ok(family) => {
            *out = Box::into_raw(Box::new(QvFamily { inner: family }));
            QvStatus::QvOk
        }
        Err(e) => status_of(&e),
    }))
}

/// Build a family from interleaved complex entries. `entries` holds
/// `count * dim * dim * 2` doubles: for basis `a` and vector `i`, component
/// `r` lives at `(((a * dim) + i) * dim + r) * 2` (real part first).
/// Every basis must be unitary.
///
/// # Safety
/// `entries` must point to `count * dim * dim * 2` readable doubles and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qv_family_new(
    dim: usize,
    count: usize,
    entries: *const f64,
    out: *mut *mut QvFamily,
) -> QvStatus {
    if out.is_null() || entries.is_null() {
        set_error("null pointer argument");
        return QvStatus::QvNullPointer;
    }
    if dim == 0 || count == 0 {
        set_error("dimension and count must be positive");
        return QvStatus::QvInvalidArgument;
    }
    let data = std::slice::from_raw_parts(entries, count * dim * dim * 2);
    guarded(AssertUnwindSafe(|| {
        let mut bases = Vec::with_capacity(count);
        for a in 0..count {
            let mut basis = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for r in 0..dim {
                    let at = (((a * dim) + i) * dim + r) * 2;
                    basis.set(r, i, c(data[at], data[at + 1]));
                }
            }
            bases.push(basis);
        }
        match ControlledFamily::new(dim, bases) {
            Ok(family) => {
                *out = Box::into_raw(Box::new(QvFamily { inner: family }));
                QvStatus::QvOk
            }
            Err(e) => {
                set_error(&e);
                QvStatus::QvInvalidFamily
            }
        }
    }))
}

/// Release a family handle. Null is accepted and ignored.
///
/// # Safety
/// `family` must be null or a pointer from `qv_family_mub`/`qv_family_new`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qv_family_free(family: *mut QvFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Hilbert-space dimension of a family.
///
/// # Safety
/// `family` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qv_family_dim(family: *const QvFamily) -> usize {
    if family.is_null() {
        return 0;
    }
    (*family).inner.dim()
}

/// Number of bases in a family.
///
/// # Safety
/// `family` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qv_family_count(family: *const QvFamily) -> usize {
    if family.is_null() {
        return 0;
    }
    (*family).inner.count()
}

/// Run one complementarity characterization. Writes the verdict and the
/// worst violation.
///
/// # Safety
/// `family`, `out_passed` and `out_violation` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qv_check_complementary(
    family: *const QvFamily,
    method: QvMethod,
    tol: f64,
    out_passed: *mut bool,
    out_violation: *mut f64,
) -> QvStatus {
    if family.is_null() || out_passed.is_null() || out_violation.is_null() {
        set_error("null pointer argument");
        return QvStatus::QvNullPointer;
    }
    let fam = &(*family).inner;
    guarded(AssertUnwindSafe(|| {
        match check_method(fam, method.into(), tol) {
            Ok(rep) => {
                *out_passed = rep.passed;
                *out_violation = rep.worst_violation;
                QvStatus::QvOk
            }
            Err(e) => status_of(&e),
        }
    }))
}

/// Run a key-distribution check. Writes the verdict and the worst
/// violation.
///
/// # Safety
/// `family`, `out_passed` and `out_violation` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qv_check_qkd(
    family: *const QvFamily,
    protocol: QvProtocol,
    tol: f64,
    out_passed: *mut bool,
    out_violation: *mut f64,
) -> QvStatus {
    if family.is_null() || out_passed.is_null() || out_violation.is_null() {
        set_error("null pointer argument");
        return QvStatus::QvNullPointer;
    }
    let fam = &(*family).inner;
    guarded(AssertUnwindSafe(|| {
        let rep = match protocol {
            QvProtocol::QvProtocolBb84 => check_bb84(fam, tol),
            QvProtocol::QvProtocolE91 => check_e91(fam, tol),
        };
        match rep {
            Ok(rep) => {
                *out_passed = rep.passed;
                *out_violation = rep.worst_violation;
                QvStatus::QvOk
            }
            Err(e) => status_of(&e),
        }
    }))
}

/// Build and verify the standard Mean King scheme for a dimension. Writes
/// the verdict and the exact success probability.
///
/// # Safety
/// `out_passed` and `out_success` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qv_mean_king_verify(
    dim: usize,
    tol: f64,
    out_passed: *mut bool,
    out_success: *mut f64,
) -> QvStatus {
    if out_passed.is_null() || out_success.is_null() {
        set_error("null pointer argument");
        return QvStatus::QvNullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let scheme = match build_scheme(dim) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        match check_mk_equation(&scheme, tol) {
            Ok(rep) => {
                *out_passed = rep.support_ok && rep.equation_ok;
                *out_success = rep.success_probability;
                QvStatus::QvOk
            }
            Err(e) => status_of(&e),
        }
    }))
}

/// Exact conditional distribution of the standard scheme given the King's
/// basis and outcome. Fills `dim * dim` probabilities and guesses, indexed
/// by Alice's outcome.
///
/// # Safety
/// `probabilities` and `guesses` must point to `dim * dim` writable slots.
#[no_mangle]
pub unsafe extern "C" fn qv_mean_king_simulate(
    dim: usize,
    king_basis: usize,
    king_outcome: usize,
    probabilities: *mut f64,
    guesses: *mut usize,
) -> QvStatus {
    if probabilities.is_null() || guesses.is_null() {
        set_error("null pointer argument");
        return QvStatus::QvNullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let scheme = match build_scheme(dim) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        match simulate(&scheme, king_basis, king_outcome) {
            Ok(rows) => {
                let probs = std::slice::from_raw_parts_mut(probabilities, dim * dim);
                let out_guess = std::slice::from_raw_parts_mut(guesses, dim * dim);
                for row in rows {
                    probs[row.alice_outcome] = row.probability;
                    out_guess[row.alice_outcome] = row.alice_guess;
                }
                QvStatus::QvOk
            }
            Err(e) => status_of(&e),
        }
    }))
}
