//! C ABI over the synthesizer.
//!
//! Datasets and results are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns an
//! [`OsStatus`]; on failure [`os_last_error`] describes the problem for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io::Cursor;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use optsynth::constants::SplitPolicy;
use optsynth::data::{load_dataset, read_dataset, Dataset, TaskKind};
use optsynth::objectives::Objective;
use optsynth::run::{run_on, RunConfig, RunReport};
use optsynth::search::{Algorithm, LowerBoundMode};
use optsynth::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Data = 4,
    Parse = 5,
    Io = 6,
    Search = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsDsl {
    Near = 0,
    Quivr = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsObjective {
    Accuracy = 0,
    F1 = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsAlgorithm {
    Astar = 0,
    Bfs = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsLowerBound {
    Midpoint = 0,
    Abstract = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsSplitPolicy {
    Bisect = 0,
    Isolate = 1,
}

/// Run settings. Start from `os_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OsConfig {
    pub dsl: OsDsl,
    pub objective: OsObjective,
    pub algorithm: OsAlgorithm,
    pub epsilon: f64,
    pub cost_bound: u32,
    pub max_predicates: u32,
    pub max_parameters: u32,
    /// Negative means unlimited.
    pub max_seconds: f64,
    /// Negative means unlimited.
    pub max_expansions: i64,
    pub max_split_depth: u32,
    pub lower_bound: OsLowerBound,
    pub split_policy: OsSplitPolicy,
    pub workers: u32,
    /// Optional root program text; may be NULL.
    pub sketch: *const c_char,
}

/// Opaque dataset handle.
pub struct OsDataset(Dataset);

/// Opaque result handle.
pub struct OsResult {
    report: RunReport,
    program: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OsStatus {
    match e {
        Error::Config(_) | Error::FeatureOutOfRange { .. } => OsStatus::Config,
        Error::Data { .. } | Error::EmptyDataset | Error::Json(_) | Error::Csv(_) => OsStatus::Data,
        Error::Parse { .. } | Error::UnknownPredicate(_) => OsStatus::Parse,
        Error::Io(_) => OsStatus::Io,
        _ => OsStatus::Search,
    }
}

/// Runs `f`, turning errors and panics into a status and the last error.
fn guard(f: impl FnOnce() -> Result<(), (OsStatus, String)>) -> OsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OsStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (OsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (OsStatus, String) {
    (OsStatus::NullPointer, format!("`{what}` is NULL"))
}

/// # Safety
/// `s` is NULL or a valid NUL-terminated string.
unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (OsStatus, String)> {
    if s.is_null() {
        return Err(null_err(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (OsStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

fn kind_of(dsl: OsDsl) -> TaskKind {
    match dsl {
        OsDsl::Near => TaskKind::Labeling,
        OsDsl::Quivr => TaskKind::Query,
    }
}

fn store<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for NULL first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn os_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn os_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a JSONL dataset file.
///
/// # Safety
/// `path` is a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn os_dataset_load(path: *const c_char, dsl: OsDsl, out: *mut *mut OsDataset) -> OsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let path = str_arg(path, "path")?;
        let d = load_dataset(Path::new(path), kind_of(dsl)).map_err(lib_err)?;
        store(out, OsDataset(d));
        Ok(())
    })
}

/// Parses a dataset from JSONL text.
///
/// # Safety
/// `text` is a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn os_dataset_from_jsonl(text: *const c_char, dsl: OsDsl, out: *mut *mut OsDataset) -> OsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let text = str_arg(text, "text")?;
        let d = read_dataset(Cursor::new(text), kind_of(dsl), Path::new("<memory>")).map_err(lib_err)?;
        store(out, OsDataset(d));
        Ok(())
    })
}

/// Number of examples; 0 for NULL.
///
/// # Safety
/// `dataset` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_dataset_len(dataset: *const OsDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `dataset` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn os_dataset_free(dataset: *mut OsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Defaults for `dsl`: A*, F1, epsilon 0, no budget.
#[no_mangle]
pub extern "C" fn os_config_default(dsl: OsDsl) -> OsConfig {
    let d = RunConfig::default();
    OsConfig {
        dsl,
        objective: OsObjective::F1,
        algorithm: OsAlgorithm::Astar,
        epsilon: d.epsilon,
        cost_bound: d.cost_bound,
        max_predicates: d.max_predicates as u32,
        max_parameters: d.max_parameters as u32,
        max_seconds: -1.0,
        max_expansions: -1,
        max_split_depth: d.max_split_depth,
        lower_bound: OsLowerBound::Midpoint,
        split_policy: OsSplitPolicy::Bisect,
        workers: d.workers as u32,
        sketch: ptr::null(),
    }
}

/// # Safety
/// `c.sketch` is NULL or a valid C string.
unsafe fn run_config(c: &OsConfig) -> Result<RunConfig, (OsStatus, String)> {
    let sketch = if c.sketch.is_null() {
        None
    } else {
        Some(str_arg(c.sketch, "sketch")?.to_string())
    };
    Ok(RunConfig {
        dsl: kind_of(c.dsl),
        objective: match c.objective {
            OsObjective::Accuracy => Objective::Accuracy,
            OsObjective::F1 => Objective::F1,
        },
        algorithm: match c.algorithm {
            OsAlgorithm::Astar => Algorithm::Astar,
            OsAlgorithm::Bfs => Algorithm::Bfs,
        },
        epsilon: c.epsilon,
        cost_bound: c.cost_bound,
        max_predicates: c.max_predicates as usize,
        max_parameters: c.max_parameters as usize,
        max_seconds: (c.max_seconds >= 0.0).then_some(c.max_seconds),
        max_expansions: u64::try_from(c.max_expansions).ok(),
        max_split_depth: c.max_split_depth,
        lower_bound: match c.lower_bound {
            OsLowerBound::Midpoint => LowerBoundMode::Midpoint,
            OsLowerBound::Abstract => LowerBoundMode::Abstract,
        },
        split_policy: match c.split_policy {
            OsSplitPolicy::Bisect => SplitPolicy::Bisect,
            OsSplitPolicy::Isolate => SplitPolicy::Isolate,
        },
        sketch,
        checkpoints: Vec::new(),
        workers: c.workers as usize,
        ..RunConfig::default()
    })
}

/// Runs one synthesis. A run that stops on its budget still succeeds; check
/// `os_result_converged`.
///
/// # Safety
/// `dataset` is a live handle, `config` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn os_synthesize(
    dataset: *const OsDataset,
    config: *const OsConfig,
    out: *mut *mut OsResult,
) -> OsStatus {
    guard(|| {
        let data = dataset.as_ref().ok_or_else(|| null_err("dataset"))?;
        let config = config.as_ref().ok_or_else(|| null_err("config"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let cfg = run_config(config)?;
        let report = run_on(&cfg, &data.0).map_err(lib_err)?;
        let program = report
            .best_program
            .as_deref()
            .map(|p| CString::new(p).expect("program text has no NUL"));
        store(out, OsResult { report, program });
        Ok(())
    })
}

/// # Safety
/// `result` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_result_converged(result: *const OsResult) -> bool {
    result.as_ref().is_some_and(|r| r.report.converged)
}

/// NaN for NULL.
///
/// # Safety
/// `result` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_result_lower(result: *const OsResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.report.certified_lower)
}

/// NaN for NULL.
///
/// # Safety
/// `result` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_result_upper(result: *const OsResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.report.certified_upper)
}

/// # Safety
/// `result` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_result_nodes_expanded(result: *const OsResult) -> u64 {
    result.as_ref().map_or(0, |r| r.report.nodes_expanded)
}

/// Best program text, or NULL when none was found. Owned by the result.
///
/// # Safety
/// `result` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_result_program(result: *const OsResult) -> *const c_char {
    result
        .as_ref()
        .and_then(|r| r.program.as_ref())
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// The full report as JSON. Release with `os_string_free`; NULL on failure.
///
/// # Safety
/// `result` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_result_json(result: *const OsResult) -> *mut c_char {
    let Some(r) = result.as_ref() else {
        set_error("`result` is NULL".into());
        return ptr::null_mut();
    };
    match serde_json::to_string(&r.report) {
        Ok(s) => CString::new(s).map_or(ptr::null_mut(), CString::into_raw),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `result` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn os_result_free(result: *mut OsResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn os_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Config("x".into())), OsStatus::Config);
        assert_eq!(status_of(&Error::EmptyDataset), OsStatus::Data);
        assert_eq!(status_of(&Error::EmptyFrontier), OsStatus::Search);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, OsStatus::Panic);
        let msg = unsafe { CStr::from_ptr(os_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn negative_budgets_mean_unlimited() {
        let c = os_config_default(OsDsl::Near);
        let r = unsafe { run_config(&c) }.unwrap();
        assert_eq!(r.max_seconds, None);
        assert_eq!(r.max_expansions, None);
        assert_eq!(r.dsl, TaskKind::Labeling);
    }
}
