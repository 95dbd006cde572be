//! C ABI over the construction kernels: opaque state handles, integer error
//! codes, and string-based exchange of exact rationals.
//!
//! Conventions:
//! - Every fallible call returns a `BaStatus` code; `BA_OK` is 0.
//! - Outputs go through pointers; nothing is returned through errno.
//! - On failure, a thread-local message is readable via
//!   `ba_last_error_message` until the next failing call on that thread.
//! - Exact rationals cross the boundary as NUL-terminated `"num/den"`
//!   strings; cube positions as comma-separated decimal per-axis indices.

use badapprox::cube::GridCube;
use badapprox::error::Error;
use badapprox::params::ConstructionParams;
use badapprox::pruning::PruningState;
use badapprox::rational::format_rational;
use num_bigint::BigUint;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaStatus {
    BaOk = 0,
    /// A pointer argument was NULL or a string was not valid UTF-8.
    BaErrArgument = 1,
    /// Construction parameters failed validation.
    BaErrInvalidParams = 2,
    /// A sweep or comparison exceeded its work budget.
    BaErrBudget = 3,
    /// The provided output buffer is too small.
    BaErrBuffer = 4,
    /// Any other failure; see `ba_last_error_message`.
    BaErrInternal = 5,
}

/// Opaque handle to a lazily resolved pruning state.
pub struct BaState {
    inner: PruningState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: BaStatus, message: &str) -> BaStatus {
    let msg = CString::new(message.replace('\0', "?")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
    status
}

fn fail_err(e: Error) -> BaStatus {
    let status = match &e {
        Error::InvalidParams(_) | Error::StageOutOfRange { .. } => BaStatus::BaErrInvalidParams,
        Error::BudgetExceeded { .. } | Error::EnumerationBudget { .. } => BaStatus::BaErrBudget,
        _ => BaStatus::BaErrInternal,
    };
    fail(status, &e.to_string())
}

/// Message of the last failure on this thread (valid until the next failure).
#[no_mangle]
pub extern "C" fn ba_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ba_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Create a pruning state. On success `*out` owns the handle; release it
/// with `ba_state_free`.
#[no_mangle]
pub extern "C" fn ba_state_new(
    d: u32,
    tau_num: u32,
    tau_den: u32,
    m: u32,
    t: u32,
    u: u32,
    max_stage: u32,
    out: *mut *mut BaState,
) -> BaStatus {
    if out.is_null() {
        return fail(BaStatus::BaErrArgument, "out pointer is NULL");
    }
    let params = ConstructionParams {
        d: d as usize,
        tau_num,
        tau_den,
        m,
        t,
        u,
        max_stage,
    };
    match PruningState::new(params) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(BaState { inner })) };
            BaStatus::BaOk
        }
        Err(e) => fail_err(e),
    }
}

/// Release a state handle. NULL is a no-op.
#[no_mangle]
pub extern "C" fn ba_state_free(state: *mut BaState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Grid level pruned at the given stage.
#[no_mangle]
pub extern "C" fn ba_prune_level(state: *const BaState, stage: u32, out: *mut u32) -> BaStatus {
    let Some(state) = (unsafe { state.as_ref() }) else {
        return fail(BaStatus::BaErrArgument, "state is NULL");
    };
    if out.is_null() {
        return fail(BaStatus::BaErrArgument, "out pointer is NULL");
    }
    match state.inner.schedule(stage) {
        Ok(s) => {
            unsafe { *out = s.prune_level };
            BaStatus::BaOk
        }
        Err(e) => fail_err(e),
    }
}

fn parse_index(index: *const c_char, d: usize) -> Result<Vec<BigUint>, BaStatus> {
    if index.is_null() {
        return Err(fail(BaStatus::BaErrArgument, "index is NULL"));
    }
    let s = unsafe { CStr::from_ptr(index) }
        .to_str()
        .map_err(|_| fail(BaStatus::BaErrArgument, "index is not UTF-8"))?;
    let parts: Vec<BigUint> = s
        .split(',')
        .map(|p| p.trim().parse::<BigUint>())
        .collect::<Result<_, _>>()
        .map_err(|_| fail(BaStatus::BaErrArgument, "index must be comma-separated decimals"))?;
    if parts.len() != d {
        return Err(fail(
            BaStatus::BaErrArgument,
            &format!("index has {} axes, state expects {}", parts.len(), d),
        ));
    }
    Ok(parts)
}

/// Whether the level-`l(stage)` cube at `index` ("i1,...,id" in decimal)
/// survives the given pruning stage. `*out` becomes 1 or 0.
#[no_mangle]
pub extern "C" fn ba_cube_survives(
    state: *const BaState,
    stage: u32,
    index: *const c_char,
    out: *mut i32,
) -> BaStatus {
    let Some(state) = (unsafe { state.as_ref() }) else {
        return fail(BaStatus::BaErrArgument, "state is NULL");
    };
    if out.is_null() {
        return fail(BaStatus::BaErrArgument, "out pointer is NULL");
    }
    let idx = match parse_index(index, state.inner.params().d) {
        Ok(v) => v,
        Err(status) => return status,
    };
    let cube = GridCube { level: state.inner.params().prune_level(stage), index: idx };
    match state.inner.survives(&cube, stage) {
        Ok(v) => {
            unsafe { *out = v as i32 };
            BaStatus::BaOk
        }
        Err(e) => fail_err(e),
    }
}

fn write_str(buf: *mut c_char, buf_len: usize, s: &str) -> BaStatus {
    if buf.is_null() {
        return fail(BaStatus::BaErrArgument, "buffer is NULL");
    }
    let bytes = s.as_bytes();
    if bytes.len() + 1 > buf_len {
        return fail(
            BaStatus::BaErrBuffer,
            &format!("need {} bytes, buffer holds {buf_len}", bytes.len() + 1),
        );
    }
    unsafe {
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
        *buf.add(bytes.len()) = 0;
    }
    BaStatus::BaOk
}

/// Certified lower bound on the measure surviving the given stage, written
/// as `"num/den"`.
#[no_mangle]
pub extern "C" fn ba_measure_lower_bound(
    state: *const BaState,
    stage: u32,
    buf: *mut c_char,
    buf_len: usize,
) -> BaStatus {
    let Some(state) = (unsafe { state.as_ref() }) else {
        return fail(BaStatus::BaErrArgument, "state is NULL");
    };
    match state.inner.surviving_measure_lower_bound(stage) {
        Ok(v) => write_str(buf, buf_len, &format_rational(&v)),
        Err(e) => fail_err(e),
    }
}

/// Exhaustive dangerous-ball avoidance check over denominators up to
/// `q_cap`; `*violations` receives the number of rationals whose dangerous
/// ball still meets the surviving union.
#[no_mangle]
pub extern "C" fn ba_avoidance_violations(
    state: *const BaState,
    stage: u32,
    q_cap: u64,
    violations: *mut u64,
) -> BaStatus {
    let Some(state) = (unsafe { state.as_ref() }) else {
        return fail(BaStatus::BaErrArgument, "state is NULL");
    };
    if violations.is_null() {
        return fail(BaStatus::BaErrArgument, "violations pointer is NULL");
    }
    match state.inner.check_dangerous_avoidance(stage, &BigUint::from(q_cap)) {
        Ok(rep) => {
            unsafe { *violations = rep.violations.len() as u64 };
            BaStatus::BaOk
        }
        Err(e) => fail_err(e),
    }
}
