//! C ABI over `nli-core`.
//!
//! Scenarios and reports are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an [`NliStatus`];
//! on failure [`nli_last_error_message`] describes the error. Strings handed
//! out by the library are released with [`nli_string_free`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nli_core::budget::{osnr_nl, NliReport as CoreReport};
use nli_core::egn::{phi_constant, CorrectionCoefficients};
use nli_core::link_model::{LinkScenario, ModulationFormat};
use nli_core::scenario_gen::{generate_scenario, GenerationConfig};
use nli_core::schema::{scenario_from_json, scenario_to_json, ModeName, OptionsEntry};
use nli_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NliStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Schema = 4,
    Validation = 5,
    ZeroDispersion = 6,
    CorrectionDomain = 7,
    Convergence = 8,
    Generation = 9,
    GainBelowUnity = 10,
    OutOfRange = 11,
    Panic = 12,
}

/// Correction mode for [`nli_estimate`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NliMode {
    /// Whatever the scenario's `options` entry says (EGN if absent).
    FromScenario = 0,
    Gn = 1,
    Egn = 2,
}

/// Parsed, validated link scenario.
pub struct NliScenario {
    scenario: LinkScenario,
    options: OptionsEntry,
}

/// Per-channel results of one estimate.
pub struct NliReport {
    report: CoreReport,
}

/// One channel of an [`NliReport`]. Powers in W, frequency in Hz.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NliChannelResult {
    pub channel_index: usize,
    pub center_frequency: f64,
    pub launch_power: f64,
    pub ase_power: f64,
    pub nli_power: f64,
    /// NLI PSD at the channel center, W/Hz.
    pub nli_psd: f64,
    pub osnr_nl_db: f64,
    /// Nonzero when a low-dispersion warning applies.
    pub low_dispersion: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: NliStatus, msg: impl Into<String>) -> NliStatus {
    set_error(msg.into());
    status
}

fn status_of(err: &Error) -> NliStatus {
    match err {
        Error::InvalidInput(_) => NliStatus::InvalidInput,
        Error::Validation(_) => NliStatus::Validation,
        Error::ZeroDispersion { .. } => NliStatus::ZeroDispersion,
        Error::CorrectionDomain { .. } => NliStatus::CorrectionDomain,
        Error::Convergence { .. } => NliStatus::Convergence,
        Error::Generation { .. } => NliStatus::Generation,
        Error::GainBelowUnity { .. } => NliStatus::GainBelowUnity,
        Error::Schema { .. } => NliStatus::Schema,
    }
}

fn from_core(err: Error) -> NliStatus {
    fail(status_of(&err), err.to_string())
}

/// Runs `f`, turning a panic into [`NliStatus::Panic`].
fn guarded(f: impl FnOnce() -> NliStatus) -> NliStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(NliStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, NliStatus> {
    if p.is_null() {
        return Err(fail(NliStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(NliStatus::InvalidUtf8, e.to_string()))
}

fn into_c_string(s: String) -> Result<*mut c_char, NliStatus> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| fail(NliStatus::InvalidInput, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn nli_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and validates a scenario JSON document.
#[no_mangle]
pub unsafe extern "C" fn nli_scenario_from_json(
    json: *const c_char,
    out: *mut *mut NliScenario,
) -> NliStatus {
    guarded(|| {
        if out.is_null() {
            return fail(NliStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match scenario_from_json(text) {
            Ok((scenario, options)) => {
                *out = Box::into_raw(Box::new(NliScenario { scenario, options }));
                NliStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Releases a scenario; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nli_scenario_free(scenario: *mut NliScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of spans, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn nli_scenario_span_count(scenario: *const NliScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.scenario.span_count())
}

/// Per-channel OSNR_NL of every channel active in all spans.
///
/// `coherence`: negative keeps the scenario's setting, 0 disables the
/// span-to-span coherence term, positive enables it.
#[no_mangle]
pub unsafe extern "C" fn nli_estimate(
    scenario: *const NliScenario,
    mode: NliMode,
    coherence: i32,
    out: *mut *mut NliReport,
) -> NliStatus {
    guarded(|| {
        if out.is_null() {
            return fail(NliStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(s) = scenario.as_ref() else {
            return fail(NliStatus::NullPointer, "null scenario");
        };
        let mut entry = s.options.clone();
        match mode {
            NliMode::FromScenario => {}
            NliMode::Gn => entry.mode = Some(ModeName::Gn),
            NliMode::Egn => entry.mode = Some(ModeName::Egn),
        }
        if coherence >= 0 {
            entry.coherence = Some(coherence > 0);
        }
        let opts = entry.to_options(CorrectionCoefficients::default());
        match osnr_nl(&s.scenario, &opts) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(NliReport { report }));
                NliStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Number of channel records, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn nli_report_len(report: *const NliReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.channels.len())
}

/// Copies record `i` (in report order, not channel index) into `out`.
#[no_mangle]
pub unsafe extern "C" fn nli_report_get(
    report: *const NliReport,
    i: usize,
    out: *mut NliChannelResult,
) -> NliStatus {
    guarded(|| {
        let (Some(r), false) = (report.as_ref(), out.is_null()) else {
            return fail(NliStatus::NullPointer, "null report or output pointer");
        };
        let Some(c) = r.report.channels.get(i) else {
            return fail(
                NliStatus::OutOfRange,
                format!(
                    "record {i} out of range ({} records)",
                    r.report.channels.len()
                ),
            );
        };
        *out = NliChannelResult {
            channel_index: c.index,
            center_frequency: c.center_frequency,
            launch_power: c.p_ch,
            ase_power: c.p_ase,
            nli_power: c.p_nli,
            nli_psd: c.nli_psd,
            osnr_nl_db: c.osnr_nl_db,
            low_dispersion: c.is_low_dispersion() as u8,
        };
        NliStatus::Ok
    })
}

/// Releases a report; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nli_report_free(report: *mut NliReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Φ of a modulation format given by name, e.g. `"PM-16QAM"`.
#[no_mangle]
pub unsafe extern "C" fn nli_phi_constant(format: *const c_char, out: *mut f64) -> NliStatus {
    guarded(|| {
        if out.is_null() {
            return fail(NliStatus::NullPointer, "null output pointer");
        }
        let name = match read_str(format) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match name.parse::<ModulationFormat>() {
            Ok(f) => {
                *out = phi_constant(f);
                NliStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Scenario `index` of the test set described by `config_json` (null for the
/// default config), as a JSON document to release with [`nli_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nli_generate_scenario_json(
    config_json: *const c_char,
    index: usize,
    out: *mut *mut c_char,
) -> NliStatus {
    guarded(|| {
        if out.is_null() {
            return fail(NliStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let cfg = if config_json.is_null() {
            GenerationConfig::default()
        } else {
            let text = match read_str(config_json) {
                Ok(t) => t,
                Err(s) => return s,
            };
            match GenerationConfig::from_json(text) {
                Ok(c) => c,
                Err(e) => return from_core(e),
            }
        };
        let result = cfg.validate().and_then(|_| generate_scenario(&cfg, index));
        match result {
            Ok(s) => match into_c_string(scenario_to_json(&s)) {
                Ok(p) => {
                    *out = p;
                    NliStatus::Ok
                }
                Err(status) => status,
            },
            Err(e) => from_core(e),
        }
    })
}

/// Releases a string returned by this library; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nli_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
