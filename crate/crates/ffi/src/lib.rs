//! C ABI over `sbc-core`.
//!
//! Instances and partitions are opaque heap handles created by the
//! `*_new`/`*_from_*` functions and released by the matching `*_free`.
//! Every fallible call returns an [`SbcStatus`]; on failure a message is kept
//! per thread and can be read with [`sbc_last_error`]. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`sbc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sbc_core::dynamics::{self, DynamicsError};
use sbc_core::equilibria::{verify, EquilibriumKind};
use sbc_core::io;
use sbc_core::model::{social_welfare, Instance, ModelError, Partition};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON, bad sizes or a list that is not a partition.
    InvalidInput = 3,
    /// The partition violates a precondition of the call.
    ContractViolation = 4,
    /// An iteration limit stopped the dynamics.
    BudgetExhausted = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbcKind {
    Ne = 0,
    Fne1 = 1,
    Fne2 = 2,
    Fne3 = 3,
    Msne = 4,
    Sne = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbcMethod {
    Ffd = 0,
    FfdLpt = 1,
    BrFne1 = 2,
    Sne = 3,
    ImproveFne3 = 4,
    ImproveMsne = 5,
}

pub struct SbcInstance(Instance);

pub struct SbcPartition(Partition);

impl From<SbcKind> for EquilibriumKind {
    fn from(k: SbcKind) -> Self {
        match k {
            SbcKind::Ne => EquilibriumKind::Ne,
            SbcKind::Fne1 => EquilibriumKind::Fne1,
            SbcKind::Fne2 => EquilibriumKind::Fne2,
            SbcKind::Fne3 => EquilibriumKind::Fne3,
            SbcKind::Msne => EquilibriumKind::Msne,
            SbcKind::Sne => EquilibriumKind::Sne,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SbcStatus, String);

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure(SbcStatus::ContractViolation, e.to_string())
    }
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        Failure(SbcStatus::InvalidInput, e.to_string())
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Contract(m) => m.into(),
            e @ DynamicsError::BudgetExhausted { .. } => Failure(SbcStatus::BudgetExhausted, e.to_string()),
        }
    }
}

fn null() -> Failure {
    Failure(SbcStatus::NullPointer, "null pointer argument".into())
}

/// Runs `f`, converting failures and panics into a status and stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SbcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SbcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SbcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(SbcStatus::InvalidUtf8, e.to_string()))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn sbc_status_message(status: SbcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SbcStatus::Ok => c"ok",
        SbcStatus::NullPointer => c"null pointer argument",
        SbcStatus::InvalidUtf8 => c"string is not valid UTF-8",
        SbcStatus::InvalidInput => c"invalid input",
        SbcStatus::ContractViolation => c"precondition violated",
        SbcStatus::BudgetExhausted => c"iteration budget exhausted",
        SbcStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sbc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `sizes` must point to `n` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_instance_new(
    sizes: *const u64,
    n: usize,
    bin_volume: u64,
    out: *mut *mut SbcInstance,
) -> SbcStatus {
    guard(|| {
        if sizes.is_null() && n > 0 {
            return Err(null());
        }
        let slice = if n == 0 { &[][..] } else { std::slice::from_raw_parts(sizes, n) };
        let inst = Instance::new(slice.to_vec(), bin_volume)
            .map_err(|e| Failure(SbcStatus::InvalidInput, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(SbcInstance(inst))))
    })
}

/// Parses `{"bin_volume": b, "sizes": [...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_instance_from_json(json: *const c_char, out: *mut *mut SbcInstance) -> SbcStatus {
    guard(|| {
        let inst = io::parse_instance(read_str(json)?)?;
        write_out(out, Box::into_raw(Box::new(SbcInstance(inst))))
    })
}

/// Number of items, 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbc_instance_len(inst: *const SbcInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.len())
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sbc_instance_free(inst: *mut SbcInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Builds a partition from one bin label per item; labels need not be
/// contiguous.
///
/// # Safety
/// `labels` must point to `n` readable values, `inst` be live and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_partition_from_labels(
    inst: *const SbcInstance,
    labels: *const usize,
    n: usize,
    out: *mut *mut SbcPartition,
) -> SbcStatus {
    guard(|| {
        let inst = &deref(inst)?.0;
        if labels.is_null() && n > 0 {
            return Err(null());
        }
        if n != inst.len() {
            return Err(Failure(
                SbcStatus::InvalidInput,
                format!("{n} labels for an instance of {} items", inst.len()),
            ));
        }
        let labels = if n == 0 { &[][..] } else { std::slice::from_raw_parts(labels, n) };
        write_out(out, Box::into_raw(Box::new(SbcPartition(Partition::from_labels(labels)))))
    })
}

/// Parses `{"bins": [[...], ...]}` against `inst`.
///
/// # Safety
/// `inst` must be live, `json` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_partition_from_json(
    inst: *const SbcInstance,
    json: *const c_char,
    out: *mut *mut SbcPartition,
) -> SbcStatus {
    guard(|| {
        let p = io::parse_partition(read_str(json)?, &deref(inst)?.0)?;
        write_out(out, Box::into_raw(Box::new(SbcPartition(p))))
    })
}

/// Writes the partition as JSON; free the string with [`sbc_string_free`].
///
/// # Safety
/// `p` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_partition_to_json(p: *const SbcPartition, out: *mut *mut c_char) -> SbcStatus {
    guard(|| write_out(out, c_string(io::partition_json(&deref(p)?.0))))
}

/// Number of bins, 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sbc_partition_num_bins(p: *const SbcPartition) -> usize {
    p.as_ref().map_or(0, |p| p.0.num_bins())
}

/// Copies the bin index of each item into `labels[0..n]`.
///
/// # Safety
/// `p` must be live and `labels` writable for `n` values.
#[no_mangle]
pub unsafe extern "C" fn sbc_partition_labels(p: *const SbcPartition, labels: *mut usize, n: usize) -> SbcStatus {
    guard(|| {
        let p = &deref(p)?.0;
        if n != p.num_items() {
            return Err(Failure(
                SbcStatus::InvalidInput,
                format!("buffer of {n} for {} items", p.num_items()),
            ));
        }
        if labels.is_null() && n > 0 {
            return Err(null());
        }
        if n > 0 {
            std::slice::from_raw_parts_mut(labels, n).copy_from_slice(p.labels());
        }
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sbc_partition_free(p: *mut SbcPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn same_items(inst: &Instance, p: &Partition) -> Result<(), Failure> {
    if p.num_items() != inst.len() {
        return Err(Failure(
            SbcStatus::InvalidInput,
            format!("partition of {} items for an instance of {}", p.num_items(), inst.len()),
        ));
    }
    Ok(())
}

unsafe fn matched<'a>(
    inst: *const SbcInstance,
    p: *const SbcPartition,
) -> Result<(&'a Instance, &'a Partition), Failure> {
    let (inst, p) = (&deref(inst)?.0, &deref(p)?.0);
    same_items(inst, p)?;
    Ok((inst, p))
}

/// Number of covered bins.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_welfare(inst: *const SbcInstance, p: *const SbcPartition, out: *mut usize) -> SbcStatus {
    guard(|| {
        let (inst, p) = matched(inst, p)?;
        write_out(out, social_welfare(p, inst))
    })
}

/// Checks one equilibrium notion. `witness_json` may be null; otherwise it
/// receives the verdict as JSON, to be freed with [`sbc_string_free`].
///
/// # Safety
/// Handles must be live, `holds` writable, `witness_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_verify(
    inst: *const SbcInstance,
    p: *const SbcPartition,
    kind: SbcKind,
    holds: *mut bool,
    witness_json: *mut *mut c_char,
) -> SbcStatus {
    guard(|| {
        let (inst, p) = matched(inst, p)?;
        let verdict = verify(kind.into(), p, inst)?;
        write_out(holds, verdict.holds)?;
        if !witness_json.is_null() {
            witness_json.write(c_string(io::to_json(&verdict)));
        }
        Ok(())
    })
}

/// Runs a construction or dynamics. `start` may be null, in which case the
/// first-fit decreasing partition is used; `max_iterations` 0 means no limit.
///
/// # Safety
/// `inst` must be live, `start` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sbc_solve(
    inst: *const SbcInstance,
    start: *const SbcPartition,
    method: SbcMethod,
    max_iterations: usize,
    out: *mut *mut SbcPartition,
) -> SbcStatus {
    guard(|| {
        let inst = &deref(inst)?.0;
        let start = match start.as_ref() {
            Some(s) => {
                same_items(inst, &s.0)?;
                s.0.clone()
            }
            None => dynamics::ffd(inst),
        };
        let cap = (max_iterations > 0).then_some(max_iterations);
        let result = match method {
            SbcMethod::Ffd => dynamics::ffd(inst),
            SbcMethod::Sne => dynamics::construct_sne(inst),
            SbcMethod::FfdLpt => dynamics::ffd_lpt(&start, inst)?.0,
            SbcMethod::BrFne1 => dynamics::best_response_fne1(&start, inst)?.0,
            SbcMethod::ImproveFne3 => dynamics::improve_to_fne3(&start, inst, cap)?.0,
            SbcMethod::ImproveMsne => dynamics::improve_to_msne(&start, inst, cap)?.0,
        };
        write_out(out, Box::into_raw(Box::new(SbcPartition(result))))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sbc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
