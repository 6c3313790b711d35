//! C interface to `pbwt-batch`.
//!
//! Every function returns a [`PbwtStatus`]. On failure a message is kept per
//! thread and can be read with [`pbwt_last_error_message`]. Objects are opaque
//! and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use pbwt_batch::cli::{query_entries, Mode};
use pbwt_batch::divergence::divergence_array_at;
use pbwt_batch::format::{load_index, save_index};
use pbwt_batch::prefix::prefix_array_at;
use pbwt_batch::{
    build_index, compute_threshold, parse_panel, BatchPolicy, Error, HaplotypePanel, ReportEntry,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbwtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Format = 3,
    EmptyPanel = 4,
    ColumnRange = 5,
    Corruption = 6,
    State = 7,
    NoMatch = 8,
    MalformedRequest = 9,
    Mismatch = 10,
    Io = 11,
    BufferTooSmall = 12,
    InvalidMode = 13,
    Panic = 14,
}

/// Reporting strategy for [`pbwt_query`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbwtMode {
    Interval = 0,
    Endpoints = 1,
}

/// `start_col` is `UINT32_MAX` when starts were not requested.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PbwtReportEntry {
    pub query_id: u32,
    pub end_col: u32,
    pub haplotype_id: u32,
    pub start_col: u32,
}

pub const PBWT_NO_START: u32 = u32::MAX;

/// A parsed haplotype panel.
pub struct PbwtPanel {
    inner: HaplotypePanel,
}

/// A run-length compressed PBWT index.
pub struct PbwtIndex {
    inner: pbwt_batch::PbwtIndex,
}

/// Report entries from one query call.
pub struct PbwtReport {
    entries: Vec<PbwtReportEntry>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PbwtStatus {
    match err {
        Error::Format { .. } => PbwtStatus::Format,
        Error::EmptyPanel => PbwtStatus::EmptyPanel,
        Error::ColumnRange { .. } => PbwtStatus::ColumnRange,
        Error::Corruption(_) => PbwtStatus::Corruption,
        Error::State(_) => PbwtStatus::State,
        Error::NoMatch { .. } => PbwtStatus::NoMatch,
        Error::MalformedRequest(_) => PbwtStatus::MalformedRequest,
        Error::Mismatch(_) => PbwtStatus::Mismatch,
        Error::Io(_) => PbwtStatus::Io,
    }
}

struct Failure(PbwtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> PbwtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PbwtStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PbwtStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PbwtStatus::NullArgument, format!("{} is null", what))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(PbwtStatus::InvalidUtf8, format!("{} is not UTF-8", what)))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn pbwt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a panel from NUL-terminated text, one haplotype per line.
///
/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbwt_panel_parse(
    text_ptr: *const c_char,
    out: *mut *mut PbwtPanel,
) -> PbwtStatus {
    guard(|| {
        let panel = parse_panel(text(text_ptr, "text")?)?;
        store(out, PbwtPanel { inner: panel })
    })
}

/// # Safety
/// `panel` must come from [`pbwt_panel_parse`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn pbwt_panel_free(panel: *mut PbwtPanel) {
    release(panel)
}

/// # Safety
/// Pointers must be valid; outputs may be NULL.
#[no_mangle]
pub unsafe extern "C" fn pbwt_panel_dims(
    panel: *const PbwtPanel,
    height: *mut u32,
    length: *mut u32,
) -> PbwtStatus {
    guard(|| {
        let p = &borrow(panel, "panel")?.inner;
        if let Some(h) = height.as_mut() {
            *h = p.height() as u32;
        }
        if let Some(l) = length.as_mut() {
            *l = p.length() as u32;
        }
        Ok(())
    })
}

/// # Safety
/// `panel` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbwt_index_build(
    panel: *const PbwtPanel,
    out: *mut *mut PbwtIndex,
) -> PbwtStatus {
    guard(|| {
        let p = &borrow(panel, "panel")?.inner;
        store(
            out,
            PbwtIndex {
                inner: build_index(p),
            },
        )
    })
}

/// # Safety
/// `path` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbwt_index_load(
    path: *const c_char,
    out: *mut *mut PbwtIndex,
) -> PbwtStatus {
    guard(|| {
        let index = load_index(Path::new(text(path, "path")?))?;
        store(out, PbwtIndex { inner: index })
    })
}

/// # Safety
/// `index` must be valid; `path` must be a valid C string.
#[no_mangle]
pub unsafe extern "C" fn pbwt_index_save(
    index: *const PbwtIndex,
    path: *const c_char,
) -> PbwtStatus {
    guard(|| {
        let idx = &borrow(index, "index")?.inner;
        save_index(Path::new(text(path, "path")?), idx)?;
        Ok(())
    })
}

/// # Safety
/// `index` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn pbwt_index_free(index: *mut PbwtIndex) {
    release(index)
}

/// Height, length, alphabet size and total run count. Outputs may be NULL.
///
/// # Safety
/// `index` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pbwt_index_dims(
    index: *const PbwtIndex,
    height: *mut u32,
    length: *mut u32,
    sigma: *mut u8,
    runs: *mut u64,
) -> PbwtStatus {
    guard(|| {
        let idx = &borrow(index, "index")?.inner;
        if let Some(v) = height.as_mut() {
            *v = idx.height() as u32;
        }
        if let Some(v) = length.as_mut() {
            *v = idx.length() as u32;
        }
        if let Some(v) = sigma.as_mut() {
            *v = idx.sigma();
        }
        if let Some(v) = runs.as_mut() {
            *v = idx.runs();
        }
        Ok(())
    })
}

/// Default batch size for `runs` runs over `height` haplotypes.
#[no_mangle]
pub extern "C" fn pbwt_threshold(runs: u64, height: u64) -> u64 {
    compute_threshold(runs, height)
}

unsafe fn fill<T: Copy>(src: &[T], buf: *mut T, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure(
            PbwtStatus::BufferTooSmall,
            format!("buffer holds {}, need {}", len, src.len()),
        ));
    }
    if buf.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Writes `a_column` (height entries) into `buf`.
///
/// # Safety
/// `index` must be valid; `buf` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn pbwt_index_prefix_array(
    index: *const PbwtIndex,
    column: usize,
    buf: *mut u32,
    len: usize,
) -> PbwtStatus {
    guard(|| {
        let idx = &borrow(index, "index")?.inner;
        fill(&prefix_array_at(idx, column)?, buf, len)
    })
}

/// Writes the absolute divergence array at `column` (height entries, `-1`
/// where no earlier mismatch exists) into `buf`.
///
/// # Safety
/// `index` must be valid; `buf` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn pbwt_index_divergence_array(
    index: *const PbwtIndex,
    column: usize,
    buf: *mut i64,
    len: usize,
) -> PbwtStatus {
    guard(|| {
        let idx = &borrow(index, "index")?.inner;
        fill(&divergence_array_at(idx, column)?, buf, len)
    })
}

/// Finds every SMEM of the queries (NUL-terminated text, one per line) and
/// reports the matching haplotypes. `threshold` 0 selects the default batch
/// size.
///
/// # Safety
/// `index` and `panel` must be valid; `queries` must be a valid C string;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbwt_query(
    index: *const PbwtIndex,
    panel: *const PbwtPanel,
    queries: *const c_char,
    mode: u32,
    threshold: u64,
    with_starts: bool,
    out: *mut *mut PbwtReport,
) -> PbwtStatus {
    guard(|| {
        let idx = &borrow(index, "index")?.inner;
        let p = &borrow(panel, "panel")?.inner;
        let q = text(queries, "queries")?;
        let mode = match mode {
            m if m == PbwtMode::Interval as u32 => Mode::Interval,
            m if m == PbwtMode::Endpoints as u32 => Mode::Endpoints,
            m => {
                return Err(Failure(
                    PbwtStatus::InvalidMode,
                    format!("unknown mode {}", m),
                ))
            }
        };
        let policy = if threshold == 0 {
            BatchPolicy::default()
        } else {
            BatchPolicy::with_threshold(threshold)
        };
        let (_, entries) = query_entries(idx, p, q, policy, mode, with_starts)?;
        store(
            out,
            PbwtReport {
                entries: entries.iter().map(to_c_entry).collect(),
            },
        )
    })
}

fn to_c_entry(e: &ReportEntry) -> PbwtReportEntry {
    PbwtReportEntry {
        query_id: e.query_id,
        end_col: e.end_col,
        haplotype_id: e.haplotype_id,
        start_col: e.start_col.unwrap_or(PBWT_NO_START),
    }
}

/// Number of entries; 0 for NULL.
///
/// # Safety
/// `report` must be valid or NULL.
#[no_mangle]
pub unsafe extern "C" fn pbwt_report_len(report: *const PbwtReport) -> usize {
    report.as_ref().map_or(0, |r| r.entries.len())
}

/// # Safety
/// `report` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pbwt_report_get(
    report: *const PbwtReport,
    i: usize,
    out: *mut PbwtReportEntry,
) -> PbwtStatus {
    guard(|| {
        let r = borrow(report, "report")?;
        let e = r.entries.get(i).ok_or_else(|| {
            Failure(
                PbwtStatus::ColumnRange,
                format!("entry {} of {}", i, r.entries.len()),
            )
        })?;
        let slot = out.as_mut().ok_or_else(|| null("output pointer"))?;
        *slot = *e;
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`pbwt_query`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn pbwt_report_free(report: *mut PbwtReport) {
    release(report)
}
