//! C ABI for the phaselab workbench.
//!
//! Conventions: phases travel as opaque handles created by
//! [`phaselab_parse`] and released with [`phaselab_phase_free`]; every
//! returned string is owned by the caller and must be released with
//! [`phaselab_string_free`]; fallible calls return a [`PhaselabStatus`] and
//! leave a description retrievable via [`phaselab_last_error`].

use libc::c_char;
use phaselab::dsl::{self, ParsedPhase};
use phaselab::error::PhaselabError;
use phaselab::morphism::Mode;
use phaselab::report::{to_canonical_json, AnalyzeReport};
use phaselab::verifier::{self, CheckConfig, TheoremId};
use std::cell::RefCell;
use std::ffi::{CStr, CString};

/// Result of a fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PhaselabStatus {
    Ok = 0,
    /// A check ran and found a counterexample.
    Counterexample = 1,
    /// Parse, validation, or argument errors.
    InvalidInput = 2,
    /// A search or enumeration budget was exceeded.
    BudgetExceeded = 3,
    /// Null pointer or malformed UTF-8 at the boundary.
    BadPointer = 4,
}

/// Morphism grading discipline.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PhaselabMode {
    Lax = 0,
    Strict = 1,
}

impl From<PhaselabMode> for Mode {
    fn from(mode: PhaselabMode) -> Mode {
        match mode {
            PhaselabMode::Lax => Mode::Lax,
            PhaselabMode::Strict => Mode::Strict,
        }
    }
}

/// Opaque handle to a parsed, validated phase (plus its optional order
/// block).
pub struct PhaselabPhase {
    inner: ParsedPhase,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

fn status_of(e: &PhaselabError) -> PhaselabStatus {
    match e.exit_code() {
        3 => PhaselabStatus::BudgetExceeded,
        _ => PhaselabStatus::InvalidInput,
    }
}

fn own_string(s: String) -> *mut c_char {
    CString::new(s).map_or(std::ptr::null_mut(), CString::into_raw)
}

/// Last error message for this thread, or NULL when none was recorded.
/// The caller owns the returned string.
#[no_mangle]
pub extern "C" fn phaselab_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(std::ptr::null_mut(), |s| own_string(s.to_string_lossy().into_owned()))
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a phaselab function and not
/// yet freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn phaselab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a `.phase` document. On success writes a handle to `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phaselab_parse(
    text: *const c_char,
    out: *mut *mut PhaselabPhase,
) -> PhaselabStatus {
    if text.is_null() || out.is_null() {
        set_error("null pointer");
        return PhaselabStatus::BadPointer;
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_error("input is not valid UTF-8");
        return PhaselabStatus::BadPointer;
    };
    match dsl::parse(text) {
        Ok(parsed) => {
            *out = Box::into_raw(Box::new(PhaselabPhase { inner: parsed }));
            PhaselabStatus::Ok
        }
        Err(e) => {
            set_error(format!("{}: {}", e.span, e.kind));
            PhaselabStatus::InvalidInput
        }
    }
}

/// Release a phase handle.
///
/// # Safety
/// `p` must come from this library and not be freed twice; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn phaselab_phase_free(p: *mut PhaselabPhase) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of carrier elements.
///
/// # Safety
/// `p` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn phaselab_element_count(p: *const PhaselabPhase) -> usize {
    if p.is_null() {
        return 0;
    }
    (*p).inner.phase.n()
}

/// Render the phase back to its canonical `.phase` text.
///
/// # Safety
/// `p` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn phaselab_render(p: *const PhaselabPhase) -> *mut c_char {
    if p.is_null() {
        return std::ptr::null_mut();
    }
    own_string(dsl::render_parsed(&(*p).inner))
}

/// Structural digest (isomorphism-invariant hex string).
///
/// # Safety
/// `p` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn phaselab_digest(p: *const PhaselabPhase) -> *mut c_char {
    if p.is_null() {
        return std::ptr::null_mut();
    }
    match phaselab::canon::digest(&(*p).inner.phase) {
        Ok(digest) => own_string(digest),
        Err(e) => {
            set_error(e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Stratification, admissibility flags, and invariants as canonical JSON.
///
/// # Safety
/// `p` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn phaselab_analyze_json(p: *const PhaselabPhase) -> *mut c_char {
    if p.is_null() {
        return std::ptr::null_mut();
    }
    match AnalyzeReport::build(&(*p).inner.phase) {
        Ok(report) => own_string(to_canonical_json(&report)),
        Err(e) => {
            set_error(e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Boundary of the phase as a new handle.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phaselab_boundary(
    p: *const PhaselabPhase,
    out: *mut *mut PhaselabPhase,
) -> PhaselabStatus {
    if p.is_null() || out.is_null() {
        set_error("null pointer");
        return PhaselabStatus::BadPointer;
    }
    match phaselab::quotient::boundary(&(*p).inner.phase) {
        Ok(b) => {
            *out = Box::into_raw(Box::new(PhaselabPhase {
                inner: ParsedPhase { phase: b, order: None },
            }));
            PhaselabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Completion of the phase: a new handle plus (optionally) the JSON sidecar
/// describing the collapsed partition.
///
/// # Safety
/// `p` must be a live handle, `out` a valid pointer; `json_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn phaselab_complete(
    p: *const PhaselabPhase,
    out: *mut *mut PhaselabPhase,
    json_out: *mut *mut c_char,
) -> PhaselabStatus {
    if p.is_null() || out.is_null() {
        set_error("null pointer");
        return PhaselabStatus::BadPointer;
    }
    let source = &(*p).inner.phase;
    match phaselab::quotient::completion(source) {
        Ok(result) => {
            if !json_out.is_null() {
                match phaselab::report::CompletionSidecar::build(source, &result) {
                    Ok(sidecar) => *json_out = own_string(to_canonical_json(&sidecar)),
                    Err(e) => {
                        set_error(e.to_string());
                        return status_of(&e);
                    }
                }
            }
            *out = Box::into_raw(Box::new(PhaselabPhase {
                inner: ParsedPhase { phase: result.completed, order: None },
            }));
            PhaselabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Count the morphisms from `source` into `target`.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phaselab_hom_count(
    source: *const PhaselabPhase,
    target: *const PhaselabPhase,
    mode: PhaselabMode,
    budget: u64,
    out: *mut u64,
) -> PhaselabStatus {
    if source.is_null() || target.is_null() || out.is_null() {
        set_error("null pointer");
        return PhaselabStatus::BadPointer;
    }
    let budget = if budget == 0 { phaselab::morphism::DEFAULT_NODE_BUDGET } else { budget };
    match phaselab::morphism::core_seeded_homs(
        &(*source).inner.phase,
        &(*target).inner.phase,
        mode.into(),
        budget,
    ) {
        Ok(homs) => {
            *out = homs.maps.len() as u64;
            PhaselabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Strict isomorphism search; writes 1 or 0 to `out`.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phaselab_isomorphic(
    left: *const PhaselabPhase,
    right: *const PhaselabPhase,
    out: *mut bool,
) -> PhaselabStatus {
    if left.is_null() || right.is_null() || out.is_null() {
        set_error("null pointer");
        return PhaselabStatus::BadPointer;
    }
    match phaselab::equivalence::strong_equivalent(&(*left).inner.phase, &(*right).inner.phase) {
        Ok(iso) => {
            *out = iso.is_some();
            PhaselabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Run one theorem check (by its id string, e.g. "RIGIDITY") over an array
/// of phase handles; writes the verdict JSON to `json_out`. Returns
/// `Counterexample` when the check found one.
///
/// # Safety
/// `theorem` must be a valid NUL-terminated string, `phases` an array of
/// `len` live handles, and `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phaselab_run_check(
    theorem: *const c_char,
    phases: *const *const PhaselabPhase,
    len: usize,
    json_out: *mut *mut c_char,
) -> PhaselabStatus {
    if theorem.is_null() || phases.is_null() || json_out.is_null() {
        set_error("null pointer");
        return PhaselabStatus::BadPointer;
    }
    let Ok(theorem) = CStr::from_ptr(theorem).to_str() else {
        set_error("theorem id is not valid UTF-8");
        return PhaselabStatus::BadPointer;
    };
    let id: TheoremId = match theorem.parse() {
        Ok(id) => id,
        Err(e) => {
            set_error(e.to_string());
            return PhaselabStatus::InvalidInput;
        }
    };
    let mut inputs = Vec::with_capacity(len);
    for i in 0..len {
        let handle = *phases.add(i);
        if handle.is_null() {
            set_error("null phase handle");
            return PhaselabStatus::BadPointer;
        }
        inputs.push((*handle).inner.clone());
    }
    match verifier::run_check(id, &inputs, &CheckConfig::default()) {
        Ok(verdict) => {
            let counterexample = verdict.outcome == verifier::Outcome::Counterexample;
            *json_out = own_string(to_canonical_json(&verdict));
            if counterexample {
                PhaselabStatus::Counterexample
            } else {
                PhaselabStatus::Ok
            }
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}
