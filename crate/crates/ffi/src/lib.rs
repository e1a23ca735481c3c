//! C ABI for catswap.
//!
//! Every fallible call returns a [`CsStatus`]; on failure the message is
//! available from [`cs_last_error`] on the same thread. States are opaque
//! [`CsState`] handles released with [`cs_state_free`]; strings returned by
//! the library are released with [`cs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use catswap::catalg::{cat_state, identify_cat, CatLabel};
use catswap::qstate::{Gate, Sign, StateVector, PIPELINE_TOL};
use catswap::report::{emit_report, Format};
use catswap::rng::substream;
use catswap::scenario::{run_scenario, ScenarioConfig};
use catswap::timing::{direct_time, hierarchical_time, relay_time, LinkModel};
use catswap::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    TooManyQubits = 4,
    InvalidUtf8 = 5,
    InvalidConfig = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque state-vector handle.
pub struct CsState {
    inner: StateVector,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::TooManyQubits { .. } => CsStatus::TooManyQubits,
        Error::QubitOutOfRange { .. } | Error::OutOfRange { .. } => CsStatus::OutOfRange,
        Error::Config { .. } => CsStatus::InvalidConfig,
        _ => CsStatus::InvalidArgument,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CsStatus, String)>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CsStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CsStatus::Panic
        }
    }
}

fn lib(e: Error) -> (CsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CsStatus, String) {
    (CsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn state_ref<'a>(p: *const CsState) -> Result<&'a StateVector, (CsStatus, String)> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

unsafe fn state_mut<'a>(p: *mut CsState) -> Result<&'a mut StateVector, (CsStatus, String)> {
    p.as_mut().map(|s| &mut s.inner).ok_or_else(|| null("state"))
}

unsafe fn indices<'a>(p: *const usize, len: usize) -> Result<&'a [usize], (CsStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null("qubit list"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn give(out: *mut *mut CsState, state: StateVector) -> Result<(), (CsStatus, String)> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(CsState { inner: state }));
    Ok(())
}

fn sign_of(sign: c_int) -> Result<Sign, (CsStatus, String)> {
    match sign {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err((CsStatus::InvalidArgument, format!("sign must be 1 or -1, got {other}"))),
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Basis state from a bitstring whose rightmost character is qubit 0.
///
/// # Safety
/// `bits` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_state_new_basis(num_qubits: usize, bits: *const c_char, out: *mut *mut CsState) -> CsStatus {
    guard(|| {
        let bits = text(bits, "bits")?;
        give(out, StateVector::new_basis_state(num_qubits, bits).map_err(lib)?)
    })
}

/// Cat state `(|p⟩ ± |p̄⟩)/√2` on qubits `0..len(pattern)`; `pattern[k]` is
/// qubit `k` and `sign` is `1` or `-1`.
///
/// # Safety
/// `pattern` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_state_new_cat(pattern: *const c_char, sign: c_int, out: *mut *mut CsState) -> CsStatus {
    guard(|| {
        let pattern = text(pattern, "pattern")?;
        let n = pattern.chars().count();
        let label = CatLabel::parse((0..n).collect(), pattern, sign_of(sign)?).map_err(lib)?;
        give(out, cat_state(&label).map_err(lib)?)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_state_free(state: *mut CsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of qubits, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_state_num_qubits(state: *const CsState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.num_qubits())
}

unsafe fn apply(state: *mut CsState, gate: Gate) -> CsStatus {
    guard(|| {
        let s = state_mut(state)?;
        *s = s.apply_gate(gate).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_state_apply_h(state: *mut CsState, qubit: usize) -> CsStatus {
    apply(state, Gate::H(qubit))
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_state_apply_x(state: *mut CsState, qubit: usize) -> CsStatus {
    apply(state, Gate::X(qubit))
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_state_apply_z(state: *mut CsState, qubit: usize) -> CsStatus {
    apply(state, Gate::Z(qubit))
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_state_apply_cnot(state: *mut CsState, control: usize, target: usize) -> CsStatus {
    apply(state, Gate::Cnot { control, target })
}

/// Copies the `2^n` amplitudes into `re` and `im`, each of length `len`.
///
/// # Safety
/// `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_state_amplitudes(state: *const CsState, re: *mut f64, im: *mut f64, len: usize) -> CsStatus {
    guard(|| {
        let s = state_ref(state)?;
        if re.is_null() || im.is_null() {
            return Err(null("amplitude buffer"));
        }
        if len < s.dim() {
            return Err((CsStatus::BufferTooSmall, format!("need {} amplitudes, buffer holds {len}", s.dim())));
        }
        for (i, a) in s.amplitudes().iter().enumerate() {
            *re.add(i) = a.re;
            *im.add(i) = a.im;
        }
        Ok(())
    })
}

/// Von Neumann entropy (bits) of the qubits in `subset`.
///
/// # Safety
/// `subset` must hold `len` indices and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_state_entropy(state: *const CsState, subset: *const usize, len: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let s = state_ref(state)?;
        let subset = indices(subset, len)?;
        if out.is_null() {
            return Err(null("output"));
        }
        *out = s.subsystem_entropy(subset).map_err(lib)?;
        Ok(())
    })
}

/// Applies `⟨projector|` to `subset` (projector qubit `i` ↔ `subset[i]`).
/// `*residual` is set to a new handle, or null when the probability is zero.
///
/// # Safety
/// Pointers must be valid; `subset` must hold `len` indices.
#[no_mangle]
pub unsafe extern "C" fn cs_state_project(
    state: *const CsState,
    subset: *const usize,
    len: usize,
    projector: *const CsState,
    probability: *mut f64,
    residual: *mut *mut CsState,
) -> CsStatus {
    guard(|| {
        let s = state_ref(state)?;
        let p = state_ref(projector)?;
        let subset = indices(subset, len)?;
        if probability.is_null() || residual.is_null() {
            return Err(null("output"));
        }
        let projection = s.project_subset(subset, p).map_err(lib)?;
        *probability = projection.probability;
        *residual = ptr::null_mut();
        if let Some(r) = projection.residual {
            give(residual, r)?;
        }
        Ok(())
    })
}

/// Measures `qubit` in the computational basis with randomness from `seed`
/// and returns the remaining qubits as a new handle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_state_measure(
    state: *const CsState,
    qubit: usize,
    seed: u64,
    bit: *mut c_int,
    residual: *mut *mut CsState,
) -> CsStatus {
    guard(|| {
        let s = state_ref(state)?;
        if bit.is_null() {
            return Err(null("output"));
        }
        let mut rng = substream(seed, 0);
        let (b, r) = s.measure_qubit(qubit, &mut rng).map_err(lib)?;
        *bit = c_int::from(b);
        give(residual, r)
    })
}

/// Recognizes a cat state on all qubits. Sets `*found` to 1 and fills
/// `pattern` (qubit 0 first, NUL-terminated) and `*sign` when it is one.
///
/// # Safety
/// `pattern` must hold `pattern_len` bytes; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_state_identify_cat(
    state: *const CsState,
    found: *mut c_int,
    pattern: *mut c_char,
    pattern_len: usize,
    sign: *mut c_int,
) -> CsStatus {
    guard(|| {
        let s = state_ref(state)?;
        if found.is_null() || pattern.is_null() || sign.is_null() {
            return Err(null("output"));
        }
        let n = s.num_qubits();
        if pattern_len < n + 1 {
            return Err((CsStatus::BufferTooSmall, format!("pattern buffer needs {} bytes", n + 1)));
        }
        let id = identify_cat(s, &(0..n).collect::<Vec<_>>(), PIPELINE_TOL).map_err(lib)?;
        *found = c_int::from(id.is_some());
        *pattern = 0;
        if let Some(id) = id {
            let text = id.label.pattern().to_string();
            ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), pattern, n);
            *pattern.add(n) = 0;
            *sign = if id.label.sign() == Sign::Plus { 1 } else { -1 };
        }
        Ok(())
    })
}

/// Runs a TOML scenario. `format` is 0 for JSON, 1 for a table. `*report`
/// receives a string to release with [`cs_string_free`]; `*passed` is 1 when
/// every check passed.
///
/// # Safety
/// `config` must be NUL-terminated; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_run_scenario(
    config: *const c_char,
    format: c_int,
    report: *mut *mut c_char,
    passed: *mut c_int,
) -> CsStatus {
    guard(|| {
        let config = text(config, "config")?;
        if report.is_null() || passed.is_null() {
            return Err(null("output"));
        }
        let format = match format {
            0 => Format::Json,
            1 => Format::Table,
            other => return Err((CsStatus::InvalidArgument, format!("unknown format {other}"))),
        };
        let config = ScenarioConfig::from_toml(config).map_err(lib)?;
        let r = run_scenario(&config).map_err(lib)?;
        let body = CString::new(emit_report(&r, format)).map_err(|e| (CsStatus::InvalidArgument, e.to_string()))?;
        *passed = c_int::from(r.passed());
        *report = body.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn link(length: f64, speed: f64, classical_speed: f64, measurement_time: f64) -> Result<LinkModel, (CsStatus, String)> {
    LinkModel::new(length, speed, classical_speed, measurement_time).map_err(lib)
}

/// `L / 2v`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_direct_time(
    length: f64,
    speed: f64,
    classical_speed: f64,
    measurement_time: f64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let m = link(length, speed, classical_speed, measurement_time)?;
        let out = out.as_mut().ok_or_else(|| null("output"))?;
        *out = direct_time(&m);
        Ok(())
    })
}

/// Single-relay time; `*advantageous` is 1 when `t_m < L/4v`.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_relay_time(
    length: f64,
    speed: f64,
    classical_speed: f64,
    measurement_time: f64,
    include_classical: bool,
    out: *mut f64,
    advantageous: *mut c_int,
) -> CsStatus {
    guard(|| {
        let m = link(length, speed, classical_speed, measurement_time)?;
        if out.is_null() || advantageous.is_null() {
            return Err(null("output"));
        }
        let r = relay_time(&m, include_classical);
        *out = r.total;
        *advantageous = c_int::from(r.advantageous);
        Ok(())
    })
}

/// Time with `levels` layers of relays.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_hierarchical_time(
    length: f64,
    speed: f64,
    classical_speed: f64,
    measurement_time: f64,
    levels: u32,
    include_classical: bool,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let m = link(length, speed, classical_speed, measurement_time)?;
        let out = out.as_mut().ok_or_else(|| null("output"))?;
        *out = hierarchical_time(&m, levels, include_classical).map_err(lib)?;
        Ok(())
    })
}
