//! C interface over the operator engine: opaque handles, integer status
//! codes, caller-owned output parameters. Every function is panic-safe and
//! returns [`ApplabStatus`]; results land in `out` pointers only on
//! `APPLAB_OK`.

use std::ffi::{c_char, c_uint};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use applab::appell::{AppellError, AppellPair};
use applab::engine::{EngineError, EvalOptions, OperatorSpec};
use applab::functions::{FunctionHandle, PiecewisePoly};
use applab::kernel::{KernelError, KernelParams};
use applab::moments::{
    central_from_raw, limit_estimate, raw_moment_oracle, raw_moments_oracle, MomentOrder,
};

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplabStatus {
    /// Success; `out` holds the result.
    ApplabOk = 0,
    /// A required pointer argument was null.
    ApplabNullPointer = 1,
    /// The coefficient lists violate the class constraints.
    ApplabInvalidPair = 2,
    /// A scalar argument is out of domain (n, rho, x, order, ...).
    ApplabBadArgument = 3,
    /// The requested moment or integral diverges at these parameters.
    ApplabDivergent = 4,
    /// An iterative computation failed to converge.
    ApplabNoConvergence = 5,
    /// Unexpected internal failure.
    ApplabInternal = 6,
}

use ApplabStatus::*;

/// Smoothed operator at fixed (coefficients, n, rho, c); create with
/// `applab_operator_new`, release with `applab_operator_free`.
pub struct ApplabOperator {
    spec: OperatorSpec,
    opts: EvalOptions,
}

fn status_of(e: &EngineError) -> ApplabStatus {
    match e {
        EngineError::Appell(AppellError::HorizonExceeded { .. }) => ApplabNoConvergence,
        EngineError::Appell(AppellError::BadPoint { .. }) => ApplabBadArgument,
        EngineError::Appell(_) => ApplabInvalidPair,
        EngineError::Kernel(KernelError::DivergentMoment { .. })
        | EngineError::Kernel(KernelError::DivergentIntegral { .. }) => ApplabDivergent,
        EngineError::Kernel(KernelError::Numerics(_)) | EngineError::Numerics(_) => {
            ApplabNoConvergence
        }
        EngineError::Kernel(_) => ApplabBadArgument,
        EngineError::OutsideGrid { .. } => ApplabBadArgument,
    }
}

fn guarded<F: FnOnce() -> ApplabStatus>(f: F) -> ApplabStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(ApplabInternal)
}

unsafe fn ptr_slice<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

/// Builds an operator from coefficient lists `a[0..a_len]`, `b[0..b_len]`
/// (b may be empty), sample density `n`, smoothing exponent `rho`, and tail
/// parameter `c`. On success writes the new handle to `out`.
///
/// # Safety
/// `a` and `b` must point to readable arrays of the stated lengths (null is
/// accepted for a zero length); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn applab_operator_new(
    a: *const f64,
    a_len: usize,
    b: *const f64,
    b_len: usize,
    n: f64,
    rho: f64,
    c: c_uint,
    out: *mut *mut ApplabOperator,
) -> ApplabStatus {
    if out.is_null() {
        return ApplabNullPointer;
    }
    let (Some(a), Some(b)) = (ptr_slice(a, a_len), ptr_slice(b, b_len)) else {
        return ApplabNullPointer;
    };
    let (a, b) = (a.to_vec(), b.to_vec());
    guarded(|| {
        let pair = match AppellPair::new(a, b) {
            Ok(p) => p,
            Err(_) => return ApplabInvalidPair,
        };
        let kernel = match KernelParams::new(n, rho, c) {
            Ok(k) => k,
            Err(_) => return ApplabBadArgument,
        };
        let op = Box::new(ApplabOperator {
            spec: OperatorSpec::new(pair, kernel),
            opts: EvalOptions::default(),
        });
        *out = Box::into_raw(op);
        ApplabOk
    })
}

/// Releases a handle from `applab_operator_new`. Null is a no-op.
///
/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn applab_operator_free(op: *mut ApplabOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Re-checks the class constraints and basis positivity over `xs`; writes 1
/// to `out_ok` when every check passes, 0 otherwise.
///
/// # Safety
/// `op` must be a live handle; `xs` must hold `xs_len` readable values
/// (null accepted for zero length); `out_ok` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn applab_operator_validate(
    op: *const ApplabOperator,
    xs: *const f64,
    xs_len: usize,
    max_index: usize,
    out_ok: *mut i32,
) -> ApplabStatus {
    if op.is_null() || out_ok.is_null() {
        return ApplabNullPointer;
    }
    let Some(xs) = ptr_slice(xs, xs_len) else {
        return ApplabNullPointer;
    };
    let op = &*op;
    guarded(|| {
        let args: Vec<f64> = xs.iter().map(|&x| op.spec.n() * x).collect();
        let report = op.spec.pair().validate(&args, max_index);
        *out_ok = i32::from(report.ok());
        ApplabOk
    })
}

/// Raw moment S(zeta^r; x) by the closed-form route, r = 0..4.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn applab_raw_moment(
    op: *const ApplabOperator,
    x: f64,
    r: c_uint,
    out: *mut f64,
) -> ApplabStatus {
    if op.is_null() || out.is_null() {
        return ApplabNullPointer;
    }
    let op = &*op;
    guarded(|| {
        if r > 4 || !(x >= 0.0) {
            return ApplabBadArgument;
        }
        match raw_moment_oracle(&op.spec, x, r) {
            Ok(v) => {
                *out = v;
                ApplabOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Central moment S((zeta - x)^r; x), r in {1, 2, 4}.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn applab_central_moment(
    op: *const ApplabOperator,
    x: f64,
    r: c_uint,
    out: *mut f64,
) -> ApplabStatus {
    if op.is_null() || out.is_null() {
        return ApplabNullPointer;
    }
    let op = &*op;
    guarded(|| {
        if !(x >= 0.0) {
            return ApplabBadArgument;
        }
        let cm = match raw_moments_oracle(&op.spec, x) {
            Ok(mv) => central_from_raw(&mv, x),
            Err(e) => return status_of(&e),
        };
        let v = match r {
            1 => cm.mu1,
            2 => cm.mu2,
            4 => cm.mu4,
            _ => return ApplabBadArgument,
        };
        *out = v;
        ApplabOk
    })
}

/// S(zeta^r; x) through weight summation against the closed kernel moments.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn applab_apply_monomial(
    op: *const ApplabOperator,
    r: c_uint,
    x: f64,
    out: *mut f64,
) -> ApplabStatus {
    if op.is_null() || out.is_null() {
        return ApplabNullPointer;
    }
    let op = &*op;
    guarded(|| {
        if !(x >= 0.0) {
            return ApplabBadArgument;
        }
        match op.spec.apply_monomial(r, x, &op.opts) {
            Ok(v) => {
                *out = v;
                ApplabOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// S(p; x) for the polynomial p(zeta) = coeffs[0] + coeffs[1] zeta + ...,
/// integrated by kernel quadrature.
///
/// # Safety
/// `op` must be a live handle, `coeffs` must hold `len` readable values,
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn applab_apply_poly(
    op: *const ApplabOperator,
    coeffs: *const f64,
    len: usize,
    x: f64,
    out: *mut f64,
) -> ApplabStatus {
    if op.is_null() || out.is_null() {
        return ApplabNullPointer;
    }
    let Some(cs) = ptr_slice(coeffs, len) else {
        return ApplabNullPointer;
    };
    if cs.is_empty() {
        return ApplabBadArgument;
    }
    let cs = cs.to_vec();
    let op = &*op;
    guarded(|| {
        if !(x >= 0.0) {
            return ApplabBadArgument;
        }
        let poly = match PiecewisePoly::global(cs) {
            Ok(p) => p,
            Err(_) => return ApplabBadArgument,
        };
        let f = FunctionHandle::piecewise(poly);
        match op.spec.apply(&f, x, &op.opts) {
            Ok(v) => {
                *out = v;
                ApplabOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Extrapolated limit of n^k times the central moment of the given order
/// (order 1 and 2 scale by n, order 4 by n^2); the limit depends on the
/// operator shape but not on its n.
///
/// # Safety
/// `op` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn applab_moment_limit(
    op: *const ApplabOperator,
    x: f64,
    order: c_uint,
    out: *mut f64,
) -> ApplabStatus {
    if op.is_null() || out.is_null() {
        return ApplabNullPointer;
    }
    let op = &*op;
    guarded(|| {
        if !(x >= 0.0) {
            return ApplabBadArgument;
        }
        let order = match order {
            1 => MomentOrder::One,
            2 => MomentOrder::Two,
            4 => MomentOrder::Four,
            _ => return ApplabBadArgument,
        };
        let k = op.spec.kernel();
        match limit_estimate(op.spec.pair(), k.rho, k.c, x, order) {
            Ok(fit) => {
                *out = fit.estimate;
                ApplabOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn applab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn applab_status_message(status: ApplabStatus) -> *const c_char {
    let text: &'static str = match status {
        ApplabOk => "ok\0",
        ApplabNullPointer => "a required pointer argument was null\0",
        ApplabInvalidPair => "coefficient lists violate the class constraints\0",
        ApplabBadArgument => "argument out of domain\0",
        ApplabDivergent => "moment or integral diverges at these parameters\0",
        ApplabNoConvergence => "computation failed to converge\0",
        ApplabInternal => "internal error\0",
    };
    text.as_ptr() as *const c_char
}
