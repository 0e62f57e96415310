//! C ABI for consensus-hpo.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `chpo_*_new`/`chpo_*_build` style function and released by the matching
//! `chpo_*_free`. Functions return a [`ChpoStatus`]; on failure the message
//! is available from [`chpo_last_error`] on the same thread. Results are
//! written through out-pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use consensus_hpo::algorithms::{AlgorithmParams, HyperparamConfig, Linkage};
use consensus_hpo::consensus::consensus_clustering;
use consensus_hpo::dataset::{load_csv, Dataset};
use consensus_hpo::experiments::ExperimentSpec;
use consensus_hpo::labeling::Labeling;
use consensus_hpo::metrics;
use consensus_hpo::search::{build_ensemble, select_anmi, select_best_match, Ensemble, Grid, SelectionResult};
use consensus_hpo::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChpoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Degenerate = 4,
    Undefined = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChpoLinkage {
    Single = 0,
    Average = 1,
    Complete = 2,
}

fn linkage_arg(raw: u32) -> FfiResult<Linkage> {
    match raw {
        x if x == ChpoLinkage::Single as u32 => Ok(Linkage::Single),
        x if x == ChpoLinkage::Average as u32 => Ok(Linkage::Average),
        x if x == ChpoLinkage::Complete as u32 => Ok(Linkage::Complete),
        other => Err(Failure(ChpoStatus::InvalidArgument, format!("unknown linkage {other}"))),
    }
}

pub struct ChpoDataset(Dataset);
pub struct ChpoLabeling(Labeling);
pub struct ChpoGrid(Grid);
pub struct ChpoEnsemble(Ensemble);
pub struct ChpoSelection(SelectionResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> ChpoStatus {
    match e {
        Error::Io { .. } => ChpoStatus::Io,
        Error::Csv(c) if c.is_io_error() => ChpoStatus::Io,
        Error::Degenerate(_) | Error::EmptyInput(_) => ChpoStatus::Degenerate,
        Error::Internal(_) => ChpoStatus::Internal,
        _ => ChpoStatus::InvalidArgument,
    }
}

struct Failure(ChpoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn null(what: &str) -> Failure {
    Failure(ChpoStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> FfiResult<()>) -> ChpoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ChpoStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {message}"));
            ChpoStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = value };
    Ok(())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure(ChpoStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn chpo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn chpo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

unsafe fn release<T>(handle: *mut T) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Releases the handle; null is ignored.
///
/// # Safety
/// The handle must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn chpo_dataset_free(handle: *mut ChpoDataset) {
    release(handle)
}

/// Releases the handle; null is ignored.
///
/// # Safety
/// The handle must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn chpo_labeling_free(handle: *mut ChpoLabeling) {
    release(handle)
}

/// Releases the handle; null is ignored.
///
/// # Safety
/// The handle must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn chpo_grid_free(handle: *mut ChpoGrid) {
    release(handle)
}

/// Releases the handle; null is ignored.
///
/// # Safety
/// The handle must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn chpo_ensemble_free(handle: *mut ChpoEnsemble) {
    release(handle)
}

/// Releases the handle; null is ignored.
///
/// # Safety
/// The handle must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn chpo_selection_free(handle: *mut ChpoSelection) {
    release(handle)
}

/// Dataset from `n * d` row-major coordinates.
///
/// # Safety
/// `points` must be readable for `n * d` doubles.
#[no_mangle]
pub unsafe extern "C" fn chpo_dataset_new(
    points: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut ChpoDataset,
) -> ChpoStatus {
    guard(|| {
        let len = n
            .checked_mul(d)
            .ok_or_else(|| Failure(ChpoStatus::InvalidArgument, "n * d overflows".into()))?;
        let data = unsafe { slice_arg(points, len, "points") }?.to_vec();
        unsafe { put(out, ChpoDataset(Dataset::from_flat(n, d, data)?)) }
    })
}

/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn chpo_dataset_load_csv(
    path: *const c_char,
    has_header: bool,
    out: *mut *mut ChpoDataset,
) -> ChpoStatus {
    guard(|| {
        let path = unsafe { str_arg(path, "path") }?;
        unsafe { put(out, ChpoDataset(load_csv(path, has_header)?)) }
    })
}

/// Point count, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn chpo_dataset_n(ds: *const ChpoDataset) -> usize {
    unsafe { ds.as_ref() }.map_or(0, |d| d.0.n())
}

/// Dimension, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn chpo_dataset_d(ds: *const ChpoDataset) -> usize {
    unsafe { ds.as_ref() }.map_or(0, |d| d.0.d())
}

/// # Safety
/// `labels` must be readable for `n` values.
#[no_mangle]
pub unsafe extern "C" fn chpo_labeling_new(labels: *const u32, n: usize, out: *mut *mut ChpoLabeling) -> ChpoStatus {
    guard(|| {
        if n == 0 {
            return Err(Failure(ChpoStatus::InvalidArgument, "labeling needs n >= 1".into()));
        }
        let labels = unsafe { slice_arg(labels, n, "labels") }?.to_vec();
        unsafe { put(out, ChpoLabeling(Labeling::new(labels))) }
    })
}

/// Point count, or 0 for a null handle.
///
/// # Safety
/// `l` must be null or a live labeling handle.
#[no_mangle]
pub unsafe extern "C" fn chpo_labeling_len(l: *const ChpoLabeling) -> usize {
    unsafe { l.as_ref() }.map_or(0, |l| l.0.n())
}

/// Number of distinct labels, or 0 for a null handle.
///
/// # Safety
/// `l` must be null or a live labeling handle.
#[no_mangle]
pub unsafe extern "C" fn chpo_labeling_clusters(l: *const ChpoLabeling) -> usize {
    unsafe { l.as_ref() }.map_or(0, |l| l.0.k())
}

/// Copies the canonical labels (first appearance order, from 0) into
/// `buf`, which must hold at least `chpo_labeling_len` values.
///
/// # Safety
/// `buf` must be writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn chpo_labeling_copy(l: *const ChpoLabeling, buf: *mut u32, cap: usize) -> ChpoStatus {
    guard(|| {
        let l = unsafe { borrow(l, "labeling") }?;
        let (labels, _) = l.0.canonical_indices();
        if cap < labels.len() {
            return Err(Failure(
                ChpoStatus::InvalidArgument,
                format!("buffer holds {cap} labels, need {}", labels.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        unsafe { ptr::copy_nonoverlapping(labels.as_ptr(), buf, labels.len()) };
        Ok(())
    })
}

/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_nmi(a: *const ChpoLabeling, b: *const ChpoLabeling, out: *mut f64) -> ChpoStatus {
    guard(|| {
        let (a, b) = unsafe { (borrow(a, "a")?, borrow(b, "b")?) };
        unsafe { write(out, metrics::nmi(&a.0, &b.0)?) }
    })
}

/// Returns `Undefined` when the index is 0/0 for non-identical partitions.
///
/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_ari(a: *const ChpoLabeling, b: *const ChpoLabeling, out: *mut f64) -> ChpoStatus {
    guard(|| {
        let (a, b) = unsafe { (borrow(a, "a")?, borrow(b, "b")?) };
        match metrics::ari(&a.0, &b.0)? {
            Some(v) => unsafe { write(out, v) },
            None => Err(Failure(ChpoStatus::Undefined, "ARI undefined for these partitions".into())),
        }
    })
}

/// Runs one configuration given as JSON, e.g.
/// `{"algorithm": "dbscan", "eps": 0.5, "min_points": 3}`.
///
/// # Safety
/// `params_json` must be NUL-terminated; other pointers live or valid.
#[no_mangle]
pub unsafe extern "C" fn chpo_cluster(
    ds: *const ChpoDataset,
    params_json: *const c_char,
    out: *mut *mut ChpoLabeling,
) -> ChpoStatus {
    guard(|| {
        let ds = unsafe { borrow(ds, "dataset") }?;
        let text = unsafe { str_arg(params_json, "params_json") }?;
        let params: AlgorithmParams = serde_json::from_str(text).map_err(Error::from)?;
        params.validate()?;
        unsafe { put(out, ChpoLabeling(params.run(&ds.0, None)?)) }
    })
}

/// Grid from a JSON spec: a list of parameter blocks or a full experiment
/// spec object.
///
/// # Safety
/// `json` must be NUL-terminated; `out` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn chpo_grid_from_json(json: *const c_char, out: *mut *mut ChpoGrid) -> ChpoStatus {
    guard(|| {
        let text = unsafe { str_arg(json, "json") }?;
        unsafe { put(out, ChpoGrid(ExperimentSpec::parse(text)?.grid()?)) }
    })
}

/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn chpo_grid_len(grid: *const ChpoGrid) -> usize {
    unsafe { grid.as_ref() }.map_or(0, |g| g.0.len())
}

/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_ensemble_build(
    ds: *const ChpoDataset,
    grid: *const ChpoGrid,
    out: *mut *mut ChpoEnsemble,
) -> ChpoStatus {
    guard(|| {
        let (ds, grid) = unsafe { (borrow(ds, "dataset")?, borrow(grid, "grid")?) };
        unsafe { put(out, ChpoEnsemble(build_ensemble(&ds.0, &grid.0)?)) }
    })
}

/// Member count, or 0 for a null handle.
///
/// # Safety
/// `ens` must be null or a live ensemble handle.
#[no_mangle]
pub unsafe extern "C" fn chpo_ensemble_len(ens: *const ChpoEnsemble) -> usize {
    unsafe { ens.as_ref() }.map_or(0, |e| e.0.len())
}

/// Copy of member `index` as a new labeling handle.
///
/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_ensemble_member(
    ens: *const ChpoEnsemble,
    index: usize,
    out: *mut *mut ChpoLabeling,
) -> ChpoStatus {
    guard(|| {
        let ens = unsafe { borrow(ens, "ensemble") }?;
        let l = ens.0.labelings().get(index).ok_or_else(|| {
            Failure(
                ChpoStatus::InvalidArgument,
                format!("member {index} out of range for {} members", ens.0.len()),
            )
        })?;
        unsafe { put(out, ChpoLabeling(l.clone())) }
    })
}

/// `linkage` is a `ChpoLinkage` value.
///
/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_consensus(
    ens: *const ChpoEnsemble,
    k_star: usize,
    linkage: u32,
    out: *mut *mut ChpoLabeling,
) -> ChpoStatus {
    guard(|| {
        let ens = unsafe { borrow(ens, "ensemble") }?;
        unsafe { put(out, ChpoLabeling(consensus_clustering(ens.0.labelings(), k_star, linkage_arg(linkage)?)?)) }
    })
}

/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_select_anmi(ens: *const ChpoEnsemble, out: *mut *mut ChpoSelection) -> ChpoStatus {
    guard(|| {
        let ens = unsafe { borrow(ens, "ensemble") }?;
        unsafe { put(out, ChpoSelection(select_anmi(&ens.0)?)) }
    })
}

/// `linkage` is a `ChpoLinkage` value.
///
/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_select_best_match(
    ens: *const ChpoEnsemble,
    k_star: usize,
    linkage: u32,
    out: *mut *mut ChpoSelection,
) -> ChpoStatus {
    guard(|| {
        let ens = unsafe { borrow(ens, "ensemble") }?;
        unsafe { put(out, ChpoSelection(select_best_match(&ens.0, k_star, linkage_arg(linkage)?)?)) }
    })
}

/// Grid index of the chosen configuration.
///
/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_selection_index(sel: *const ChpoSelection, out: *mut usize) -> ChpoStatus {
    guard(|| {
        let sel = unsafe { borrow(sel, "selection") }?;
        unsafe { write(out, sel.0.chosen_index) }
    })
}

/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_selection_score(sel: *const ChpoSelection, out: *mut f64) -> ChpoStatus {
    guard(|| {
        let sel = unsafe { borrow(sel, "selection") }?;
        unsafe { write(out, sel.0.score) }
    })
}

/// Display name of the chosen configuration; release with
/// [`chpo_string_free`].
///
/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_selection_config(sel: *const ChpoSelection, out: *mut *mut c_char) -> ChpoStatus {
    guard(|| {
        let sel = unsafe { borrow(sel, "selection") }?;
        let name: &HyperparamConfig = &sel.0.chosen_config;
        unsafe { write(out, to_c_string(name.display_name.clone())?) }
    })
}

/// Full selection result as JSON; release with [`chpo_string_free`].
///
/// # Safety
/// All pointers must be live handles or valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn chpo_selection_to_json(sel: *const ChpoSelection, out: *mut *mut c_char) -> ChpoStatus {
    guard(|| {
        let sel = unsafe { borrow(sel, "selection") }?;
        unsafe { write(out, to_c_string(sel.0.to_json()?)?) }
    })
}

fn to_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(ChpoStatus::Internal, "string contains NUL".into()))
}
