//! C ABI over the `submax` library.
//!
//! Instances and results are opaque heap handles released with the matching
//! `*_free` function. Every fallible call returns a [`SubmaxStatus`]; on a
//! nonzero status, [`submax_last_error`] describes the failure on the calling
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use submax::adaptive::{maximize, Mode};
use submax::baselines::{greedy, lazy_greedy, threshold_greedy};
use submax::model::{ElementSet, InstrumentedOracle, SetFunction};
use submax::objectives::{gen_random_coverage, gen_random_facility_location, load_instance, SubmodularInstance};
use submax::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubmaxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidInstance = 3,
    Parse = 4,
    Io = 5,
    Degenerate = 6,
    SizeLimit = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubmaxAlgorithm {
    Adaptive = 0,
    Greedy = 1,
    Lazy = 2,
    Threshold = 3,
}

pub struct SubmaxInstance(SubmodularInstance);

pub struct SubmaxResult {
    elements: Vec<usize>,
    value: f64,
    queries: u64,
    rounds: u64,
    failed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> SubmaxStatus {
    match err {
        Error::InvalidInstance(_) => SubmaxStatus::InvalidInstance,
        Error::Parse { .. } => SubmaxStatus::Parse,
        Error::Io { .. } => SubmaxStatus::Io,
        Error::Degenerate(_) => SubmaxStatus::Degenerate,
        Error::SizeLimit { .. } => SubmaxStatus::SizeLimit,
        Error::Contract(_) | Error::Parameter(_) | Error::Config(_) => SubmaxStatus::InvalidArgument,
    }
}

fn guard(body: impl FnOnce() -> Result<(), (SubmaxStatus, String)>) -> SubmaxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SubmaxStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SubmaxStatus::Panic
        }
    }
}

fn lib(err: Error) -> (SubmaxStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (SubmaxStatus, String) {
    (SubmaxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn submax_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads an instance file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn submax_instance_load(path: *const c_char, out: *mut *mut SubmaxInstance) -> SubmaxStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (SubmaxStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let inst = load_instance(path).map_err(lib)?;
        write_out(out, SubmaxInstance(inst));
        Ok(())
    })
}

/// Random coverage instance.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn submax_instance_gen_coverage(
    n_sets: usize,
    n_universe: usize,
    density: f64,
    weight_max: f64,
    seed: u64,
    out: *mut *mut SubmaxInstance,
) -> SubmaxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = gen_random_coverage(n_sets, n_universe, density, weight_max, seed).map_err(lib)?;
        write_out(out, SubmaxInstance(inst.into()));
        Ok(())
    })
}

/// Random facility location instance.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn submax_instance_gen_facility(
    n_items: usize,
    n_clients: usize,
    seed: u64,
    out: *mut *mut SubmaxInstance,
) -> SubmaxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = gen_random_facility_location(n_items, n_clients, seed).map_err(lib)?;
        write_out(out, SubmaxInstance(inst.into()));
        Ok(())
    })
}

/// Number of ground elements, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn submax_instance_size(inst: *const SubmaxInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.ground_size())
}

/// `f(S)` for the `len` element indices at `elements`.
///
/// # Safety
/// `inst` must be a live handle, `elements` must point to `len` values (or
/// be null with `len == 0`) and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn submax_instance_value(
    inst: *const SubmaxInstance,
    elements: *const usize,
    len: usize,
    out: *mut f64,
) -> SubmaxStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let slice = if len == 0 {
            &[][..]
        } else if elements.is_null() {
            return Err(null("elements"));
        } else {
            std::slice::from_raw_parts(elements, len)
        };
        let set = ElementSet::from_indices(inst.0.ground_size(), slice.iter().copied()).map_err(lib)?;
        *out = inst.0.value(&set);
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn submax_instance_free(inst: *mut SubmaxInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Maximizes `f(S)` subject to `|S| ≤ k`. `eps` and `theory_mode` apply to
/// the adaptive algorithm; `eps` also sets the threshold schedule. `seed`
/// drives all randomness.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn submax_solve(
    inst: *const SubmaxInstance,
    algorithm: SubmaxAlgorithm,
    k: usize,
    eps: f64,
    theory_mode: bool,
    seed: u64,
    out: *mut *mut SubmaxResult,
) -> SubmaxStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut oracle = InstrumentedOracle::new(&inst.0);
        let mode = if theory_mode { Mode::Theory } else { Mode::Practical };
        let r = match algorithm {
            SubmaxAlgorithm::Adaptive => maximize(&mut oracle, k, eps, mode, seed),
            SubmaxAlgorithm::Greedy => greedy(&mut oracle, k),
            SubmaxAlgorithm::Lazy => lazy_greedy(&mut oracle, k),
            SubmaxAlgorithm::Threshold => threshold_greedy(&mut oracle, k, eps),
        }
        .map_err(lib)?;
        write_out(
            out,
            SubmaxResult {
                elements: r.set.to_vec(),
                value: r.value,
                queries: r.queries,
                rounds: r.rounds,
                failed: r.failed,
            },
        );
        Ok(())
    })
}

/// # Safety
/// `res` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn submax_result_value(res: *const SubmaxResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.value)
}

/// # Safety
/// `res` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn submax_result_queries(res: *const SubmaxResult) -> u64 {
    res.as_ref().map_or(0, |r| r.queries)
}

/// # Safety
/// `res` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn submax_result_rounds(res: *const SubmaxResult) -> u64 {
    res.as_ref().map_or(0, |r| r.rounds)
}

/// # Safety
/// `res` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn submax_result_failed(res: *const SubmaxResult) -> bool {
    res.as_ref().is_some_and(|r| r.failed)
}

/// # Safety
/// `res` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn submax_result_len(res: *const SubmaxResult) -> usize {
    res.as_ref().map_or(0, |r| r.elements.len())
}

/// Copies up to `capacity` selected elements (ascending) into `buf` and
/// returns how many were written.
///
/// # Safety
/// `res` must be a live handle and `buf` must have room for `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn submax_result_elements(res: *const SubmaxResult, buf: *mut usize, capacity: usize) -> usize {
    let Some(r) = res.as_ref() else { return 0 };
    if buf.is_null() {
        return 0;
    }
    let count = r.elements.len().min(capacity);
    ptr::copy_nonoverlapping(r.elements.as_ptr(), buf, count);
    count
}

/// # Safety
/// `res` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn submax_result_free(res: *mut SubmaxResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}
