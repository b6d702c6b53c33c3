//! C ABI for `solverfolio`.
//!
//! Datasets live behind an opaque [`SfDataset`] handle. Every function
//! returns an [`SfStatus`]; on failure [`sf_last_error_message`] describes
//! what went wrong on the calling thread. Strings handed out by the library
//! must be released with [`sf_string_free`].
//!
//! Solver sets are passed as comma-separated solver ids. A null pointer
//! stands for every solver in the dataset; an empty string is the empty set.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use solverfolio::mincover;
use solverfolio::numeric::{to_f64, to_fraction};
use solverfolio::pairscore;
use solverfolio::portfolio;
use solverfolio::runstore::{self, Dataset, Schema, SolverSet};
use solverfolio::shapley::{self, ShapleyMode};
use solverfolio::tradeoff;
use solverfolio::{Error, Millis};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Bad input data or arguments.
    Validation = 3,
    Io = 4,
    Internal = 5,
    /// The library panicked; the handle involved should not be reused.
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfShapleyMode {
    ExactWeighted = 0,
    UnweightedSum = 1,
    Sampled = 2,
}

/// Opaque handle to an ingested dataset.
pub struct SfDataset {
    inner: Dataset,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(SfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io(_) => SfStatus::Io,
            Error::Json(_) => SfStatus::Internal,
            _ if e.is_validation() => SfStatus::Validation,
            _ => SfStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SfStatus::NullArgument, format!("`{what}` is null"))
}

/// Runs `body`, recording any failure or panic in the thread's error slot.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {message}"));
            SfStatus::Panic
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(SfStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn dataset<'a>(ptr: *const SfDataset) -> Result<&'a Dataset, Failure> {
    ptr.as_ref().map(|d| &d.inner).ok_or_else(|| null("dataset"))
}

unsafe fn solver_arg(ds: &Dataset, ptr: *const c_char, what: &str) -> Result<SolverSet, Failure> {
    if ptr.is_null() {
        return Ok(ds.solver_ids());
    }
    Ok(text(ptr, what)?
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect())
}

unsafe fn hand_out(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|e| Failure(SfStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn json_out<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> Result<(), Failure> {
    let s = serde_json::to_string(value).map_err(|e| Failure(SfStatus::Internal, e.to_string()))?;
    hand_out(s, out)
}

fn store(ds: Dataset, out: *mut *mut SfDataset) {
    // SAFETY: callers check `out` first.
    unsafe { *out = Box::into_raw(Box::new(SfDataset { inner: ds })) };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses canonical CSV text into a new dataset.
///
/// # Safety
/// `csv` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_dataset_from_csv(csv: *const c_char, out: *mut *mut SfDataset) -> SfStatus {
    guard(|| {
        let csv = text(csv, "csv")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ingested = runstore::ingest(csv.as_bytes(), &Schema::canonical(','))?;
        store(ingested.dataset, out);
        Ok(())
    })
}

/// Reads a canonical CSV file into a new dataset.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_dataset_open(path: *const c_char, out: *mut *mut SfDataset) -> SfStatus {
    guard(|| {
        let path = text(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ingested = runstore::ingest_path(Path::new(path), &Schema::canonical(','))?;
        store(ingested.dataset, out);
        Ok(())
    })
}

/// Releases a dataset. Null is ignored.
///
/// # Safety
/// `ds` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_dataset_free(ds: *mut SfDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_dataset_solver_count(ds: *const SfDataset, out: *mut usize) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        *out.as_mut().ok_or_else(|| null("out"))? = ds.solvers().len();
        Ok(())
    })
}

/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_dataset_instance_count(ds: *const SfDataset, out: *mut usize) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        *out.as_mut().ok_or_else(|| null("out"))? = ds.instances().len();
        Ok(())
    })
}

/// Id of the solver at `index` in sorted order; free with [`sf_string_free`].
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_dataset_solver_id(ds: *const SfDataset, index: usize, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let solver = ds
            .solvers()
            .get(index)
            .ok_or_else(|| Failure(SfStatus::Validation, format!("solver index {index} out of range")))?;
        hand_out(solver.id.clone(), out)
    })
}

/// Performance ratio of `portfolio` against `baseline` as a double.
///
/// # Safety
/// `ds` must be a live handle; string arguments NUL-terminated or null;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_perf(
    ds: *const SfDataset,
    portfolio: *const c_char,
    baseline: *const c_char,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let (a, b) = (solver_arg(ds, portfolio, "portfolio")?, solver_arg(ds, baseline, "baseline")?);
        let ratio = portfolio::perf(ds, &a, &b)?;
        *out.as_mut().ok_or_else(|| null("out"))? = to_f64(&ratio.value);
        Ok(())
    })
}

/// Performance ratio as an exact `p/q` string; free with [`sf_string_free`].
///
/// # Safety
/// As for [`sf_perf`].
#[no_mangle]
pub unsafe extern "C" fn sf_perf_exact(
    ds: *const SfDataset,
    portfolio: *const c_char,
    baseline: *const c_char,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let (a, b) = (solver_arg(ds, portfolio, "portfolio")?, solver_arg(ds, baseline, "baseline")?);
        let ratio = portfolio::perf(ds, &a, &b)?;
        hand_out(to_fraction(&ratio.value), out)
    })
}

/// Borda ranking over `solvers` as a JSON array.
///
/// # Safety
/// `ds` must be a live handle; `solvers` NUL-terminated or null; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_borda_json(ds: *const SfDataset, solvers: *const c_char, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let keep = solver_arg(ds, solvers, "solvers")?;
        let matrix = pairscore::borda(&ds.filter(&keep)?)?;
        json_out(&matrix.ranking(), out)
    })
}

/// Minimum portfolios over `solvers` as JSON with `coverage` and `solution`.
///
/// # Safety
/// As for [`sf_borda_json`].
#[no_mangle]
pub unsafe extern "C" fn sf_min_cover_json(
    ds: *const SfDataset,
    solvers: *const c_char,
    epsilon_ms: u64,
    cap: usize,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let set = solver_arg(ds, solvers, "solvers")?;
        let coverage = mincover::build_coverage(ds, &set, Millis::from_millis(epsilon_ms))?;
        let solution = mincover::min_cover(&coverage, cap)?;
        json_out(&serde_json::json!({ "coverage": coverage, "solution": solution }), out)
    })
}

/// Best subset of `space` for every size, measured against `baseline`.
///
/// # Safety
/// As for [`sf_perf`], with a string out-parameter.
#[no_mangle]
pub unsafe extern "C" fn sf_tradeoff_json(
    ds: *const SfDataset,
    space: *const c_char,
    baseline: *const c_char,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let (s, b) = (solver_arg(ds, space, "space")?, solver_arg(ds, baseline, "baseline")?);
        json_out(&tradeoff::best_subsets(ds, &s, &b)?, out)
    })
}

/// Shapley values of `portfolio` members against `baseline`. `samples` and
/// `seed` are used only in sampled mode.
///
/// # Safety
/// As for [`sf_perf`], with a string out-parameter.
#[no_mangle]
pub unsafe extern "C" fn sf_shapley_json(
    ds: *const SfDataset,
    portfolio: *const c_char,
    baseline: *const c_char,
    mode: SfShapleyMode,
    samples: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let ds = dataset(ds)?;
        let (a, b) = (solver_arg(ds, portfolio, "portfolio")?, solver_arg(ds, baseline, "baseline")?);
        let report = match mode {
            SfShapleyMode::ExactWeighted => shapley::shapley_exact(ds, &a, &b, ShapleyMode::ExactWeighted)?,
            SfShapleyMode::UnweightedSum => shapley::shapley_exact(ds, &a, &b, ShapleyMode::PaperUnweightedSum)?,
            SfShapleyMode::Sampled => shapley::shapley_sampled(ds, &a, &b, samples, seed)?,
        };
        json_out(&report, out)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
