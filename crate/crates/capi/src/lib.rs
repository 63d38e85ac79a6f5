//! C ABI for the entcost entanglement-measure library.
//!
//! Density matrices travel as opaque handles owned by the library; every
//! function returns a status code and writes results through out-pointers.
//! Strings returned by the library are released with
//! [`entcost_string_free`], handles with [`entcost_density_free`]. The
//! header `include/entcost.h` is generated at build time.

use std::ffi::{c_char, CStr, CString};

use entcost::channels::{eb_certify, trace_out_map, EbVerdict};
use entcost::ef::{ef_upper_bound, OptimizerConfig};
use entcost::error::Error;
use entcost::measures;
use entcost::states::{bell_mix, subspace_basis, BellMixParam, DensityMatrix, StateJson};

/// Opaque handle to a validated bipartite density matrix.
pub struct EntcostDensity(DensityMatrix);

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EntcostStatus {
    Ok = 0,
    NullArgument,
    InvalidUtf8,
    ParseError,
    DomainError,
    DimensionError,
    TooLarge,
    NotHermitian,
    NotPsd,
    InvariantViolation,
    NoConvergence,
}

/// Verdict of the entanglement-breaking decision procedure.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EntcostVerdict {
    Breaking = 0,
    NotBreaking = 1,
    Indeterminate = 2,
}

fn status_from(err: &Error) -> EntcostStatus {
    match err {
        Error::Parse(_) => EntcostStatus::ParseError,
        Error::Domain(_) => EntcostStatus::DomainError,
        Error::Dimension(_) => EntcostStatus::DimensionError,
        Error::TooLarge { .. } => EntcostStatus::TooLarge,
        Error::NotHermitian(_) => EntcostStatus::NotHermitian,
        Error::NotPsd(_) => EntcostStatus::NotPsd,
        Error::Invariant(_) => EntcostStatus::InvariantViolation,
        Error::NoConvergence(_) => EntcostStatus::NoConvergence,
    }
}

fn write_handle(out: *mut *mut EntcostDensity, state: DensityMatrix) -> EntcostStatus {
    unsafe { *out = Box::into_raw(Box::new(EntcostDensity(state))) };
    EntcostStatus::Ok
}

fn write_string(out: *mut *mut c_char, text: String) -> EntcostStatus {
    match CString::new(text) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            EntcostStatus::Ok
        }
        Err(_) => EntcostStatus::InvalidUtf8,
    }
}

/// Library version as a static string; never freed by the caller.
#[no_mangle]
pub extern "C" fn entcost_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Cost, distillation and formation values of the two-component Bell
/// mixture with weight `p` in [0, 1/2]. Any out-pointer may be null.
///
/// # Safety
/// Non-null out-pointers must be valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn entcost_bell_mix_measures(
    p: f64,
    out_ec: *mut f64,
    out_ed: *mut f64,
    out_ef: *mut f64,
) -> EntcostStatus {
    let param = match BellMixParam::new(p) {
        Ok(param) => param,
        Err(e) => return status_from(&e),
    };
    let ef = match measures::ef_two_qubit(&bell_mix(param)) {
        Ok(v) => v.value(),
        Err(e) => return status_from(&e),
    };
    if !out_ec.is_null() {
        *out_ec = measures::ec_bell_mix(param).value();
    }
    if !out_ed.is_null() {
        *out_ed = measures::ed_hashing(param).value();
    }
    if !out_ef.is_null() {
        *out_ef = ef;
    }
    EntcostStatus::Ok
}

/// New handle holding the two-component Bell mixture with weight `p`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn entcost_density_bell_mix(
    p: f64,
    out: *mut *mut EntcostDensity,
) -> EntcostStatus {
    if out.is_null() {
        return EntcostStatus::NullArgument;
    }
    match BellMixParam::new(p) {
        Ok(param) => write_handle(out, bell_mix(param)),
        Err(e) => status_from(&e),
    }
}

/// Parses a state document `{"dims": [dA, dB], "re": [[..]], "im": [[..]]}`
/// into a new handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string, `out` valid for writing
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn entcost_density_from_json(
    json: *const c_char,
    out: *mut *mut EntcostDensity,
) -> EntcostStatus {
    if json.is_null() || out.is_null() {
        return EntcostStatus::NullArgument;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(text) => text,
        Err(_) => return EntcostStatus::InvalidUtf8,
    };
    let doc: StateJson = match serde_json::from_str(text) {
        Ok(doc) => doc,
        Err(_) => return EntcostStatus::ParseError,
    };
    match DensityMatrix::from_json(&doc) {
        Ok(state) => write_handle(out, state),
        Err(e) => status_from(&e),
    }
}

/// Serializes the state back to its JSON document.
///
/// # Safety
/// `state` must be a live handle, `out` valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn entcost_density_to_json(
    state: *const EntcostDensity,
    out: *mut *mut c_char,
) -> EntcostStatus {
    if state.is_null() || out.is_null() {
        return EntcostStatus::NullArgument;
    }
    let doc = (*state).0.to_json();
    match serde_json::to_string(&doc) {
        Ok(text) => write_string(out, text),
        Err(_) => EntcostStatus::InvariantViolation,
    }
}

/// Bipartite dimensions of the state.
///
/// # Safety
/// `state` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcost_density_dims(
    state: *const EntcostDensity,
    out_da: *mut usize,
    out_db: *mut usize,
) -> EntcostStatus {
    if state.is_null() {
        return EntcostStatus::NullArgument;
    }
    let split = (*state).0.split();
    if !out_da.is_null() {
        *out_da = split.da;
    }
    if !out_db.is_null() {
        *out_db = split.db;
    }
    EntcostStatus::Ok
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `state` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn entcost_density_free(state: *mut EntcostDensity) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn entcost_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Von Neumann entropy of the state in bits.
///
/// # Safety
/// `state` must be a live handle, `out` valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn entcost_von_neumann_entropy(
    state: *const EntcostDensity,
    out: *mut f64,
) -> EntcostStatus {
    if state.is_null() || out.is_null() {
        return EntcostStatus::NullArgument;
    }
    match measures::von_neumann_entropy(&(*state).0) {
        Ok(v) => {
            *out = v.value();
            EntcostStatus::Ok
        }
        Err(e) => status_from(&e),
    }
}

/// Closed-form entanglement of formation of a two-qubit state, in ebits.
///
/// # Safety
/// `state` must be a live handle, `out` valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn entcost_ef_two_qubit(
    state: *const EntcostDensity,
    out: *mut f64,
) -> EntcostStatus {
    if state.is_null() || out.is_null() {
        return EntcostStatus::NullArgument;
    }
    match measures::ef_two_qubit(&(*state).0) {
        Ok(v) => {
            *out = v.value();
            EntcostStatus::Ok
        }
        Err(e) => status_from(&e),
    }
}

/// Variational upper bound on the entanglement of formation.
///
/// `ensemble_size = 0` selects the rank-squared default. `out_value`
/// receives the bound; when `out_json` is non-null it receives the full
/// result document (value, history and the realizing decomposition).
///
/// # Safety
/// `state` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcost_ef_upper_bound(
    state: *const EntcostDensity,
    ensemble_size: usize,
    restarts: u32,
    max_iters: u32,
    seed: u64,
    out_value: *mut f64,
    out_json: *mut *mut c_char,
) -> EntcostStatus {
    if state.is_null() || out_value.is_null() {
        return EntcostStatus::NullArgument;
    }
    let cfg = OptimizerConfig {
        ensemble_size: (ensemble_size > 0).then_some(ensemble_size),
        restarts: restarts as usize,
        max_iters: max_iters as usize,
        seed,
        ..OptimizerConfig::default()
    };
    match ef_upper_bound(&(*state).0, &cfg) {
        Ok(result) => {
            *out_value = result.value.value();
            if !out_json.is_null() {
                match serde_json::to_string(&result.to_json()) {
                    Ok(text) => return write_string(out_json, text),
                    Err(_) => return EntcostStatus::InvariantViolation,
                }
            }
            EntcostStatus::Ok
        }
        Err(e) => status_from(&e),
    }
}

/// Entanglement-breaking verdict for the trace-out channel of one of the
/// four reference subspaces (`id` in 1..=4). `out_min_pt_eig` receives the
/// minimum partial-transpose eigenvalue of the Choi state; `out_json`, if
/// non-null, the full certificate document.
///
/// # Safety
/// Non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcost_eb_certify_subspace(
    id: u8,
    out_verdict: *mut EntcostVerdict,
    out_min_pt_eig: *mut f64,
    out_json: *mut *mut c_char,
) -> EntcostStatus {
    if out_verdict.is_null() {
        return EntcostStatus::NullArgument;
    }
    let basis = match subspace_basis(id) {
        Ok(basis) => basis,
        Err(e) => return status_from(&e),
    };
    let channel = match trace_out_map(&basis) {
        Ok(channel) => channel,
        Err(e) => return status_from(&e),
    };
    let cert = match eb_certify(&channel) {
        Ok(cert) => cert,
        Err(e) => return status_from(&e),
    };
    *out_verdict = match cert.verdict {
        EbVerdict::Breaking => EntcostVerdict::Breaking,
        EbVerdict::NotBreaking => EntcostVerdict::NotBreaking,
        EbVerdict::Indeterminate => EntcostVerdict::Indeterminate,
    };
    if !out_min_pt_eig.is_null() {
        *out_min_pt_eig = cert.min_pt_eig;
    }
    if !out_json.is_null() {
        match serde_json::to_string(&cert) {
            Ok(text) => return write_string(out_json, text),
            Err(_) => return EntcostStatus::InvariantViolation,
        }
    }
    EntcostStatus::Ok
}
