//! C ABI over the glyphforge engine.
//!
//! Knowledge bases are handed out as opaque `GfKnowledgeBase` pointers and
//! must be released with `gf_kb_free`. Every fallible call returns a
//! `GfStatus`; on failure `gf_last_error` gives a message for the calling
//! thread. Strings returned by the library are freed with `gf_string_free`.
//!
//! Grids cross the boundary as row-major byte arrays, 1 for black and 0 for
//! white, `width * height` long.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use glyphforge::service::DecisionBody;
use glyphforge::{
    classify, digitize, store, BinaryGrid, DecisionKind, DigitizeParams, Error, GridDims,
    KnowledgeBase, Label, Quotient, Raster,
};

/// Opaque knowledge-base handle.
pub struct GfKnowledgeBase {
    inner: KnowledgeBase,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDims = 3,
    DimsMismatch = 4,
    InvalidLabel = 5,
    UnknownLabel = 6,
    EmptyRaster = 7,
    ParseError = 8,
    InvariantViolation = 9,
    IoError = 10,
    TeachLimit = 11,
    BufferTooSmall = 12,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfDecisionKind {
    Match = 0,
    Unknown = 1,
    EmptyKb = 2,
}

/// Best-scoring label of a classification. When `kind` is `EmptyKb` the
/// score fields are zero and `q_den` is 1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GfDecision {
    pub kind: GfDecisionKind,
    pub psi: i64,
    pub mu: u64,
    pub q_num: i64,
    pub q_den: u64,
    /// Number of labels that received a score.
    pub scored: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GfStatus {
    match e {
        Error::InvalidDims { .. } => GfStatus::InvalidDims,
        Error::InvalidRaster(_) | Error::InvalidParameter(_) => GfStatus::InvalidArgument,
        Error::EmptyRaster => GfStatus::EmptyRaster,
        Error::DimsMismatch { .. } => GfStatus::DimsMismatch,
        Error::InvalidLabel { .. } => GfStatus::InvalidLabel,
        Error::UnknownLabel(_) => GfStatus::UnknownLabel,
        Error::UndefinedQuotient(_) => GfStatus::InvalidArgument,
        Error::TeachLimit(_) => GfStatus::TeachLimit,
        Error::Parse { .. } => GfStatus::ParseError,
        Error::InvariantViolation { .. } => GfStatus::InvariantViolation,
        Error::Io { .. } => GfStatus::IoError,
    }
}

struct Fail(GfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(GfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, recording any failure or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GfStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn kb_ref<'a>(kb: *const GfKnowledgeBase) -> Result<&'a KnowledgeBase, Fail> {
    kb.as_ref().map(|k| &k.inner).ok_or_else(|| null("kb"))
}

unsafe fn kb_mut<'a>(kb: *mut GfKnowledgeBase) -> Result<&'a mut KnowledgeBase, Fail> {
    kb.as_mut().map(|k| &mut k.inner).ok_or_else(|| null("kb"))
}

unsafe fn grid_arg(dims: GridDims, cells: *const u8, len: usize) -> Result<BinaryGrid, Fail> {
    if cells.is_null() {
        return Err(null("cells"));
    }
    if len != dims.cell_count() {
        return Err(Fail(
            GfStatus::DimsMismatch,
            format!("{len} cells given for a {dims} grid"),
        ));
    }
    let bytes = std::slice::from_raw_parts(cells, len);
    if let Some(b) = bytes.iter().find(|&&b| b > 1) {
        return Err(Fail(
            GfStatus::InvalidArgument,
            format!("cell value {b} is not 0 or 1"),
        ));
    }
    Ok(BinaryGrid::new(
        dims,
        bytes.iter().map(|&b| b == 1).collect(),
    )?)
}

fn threshold_arg(num: i64, den: u64) -> Result<Quotient, Fail> {
    Quotient::new(num, den).ok_or_else(|| {
        Fail(
            GfStatus::InvalidArgument,
            "threshold denominator is zero".into(),
        )
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an empty knowledge base.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_new(
    width: usize,
    height: usize,
    out: *mut *mut GfKnowledgeBase,
) -> GfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let dims = GridDims::new(width, height)?;
        *out = Box::into_raw(Box::new(GfKnowledgeBase {
            inner: KnowledgeBase::new(dims),
        }));
        Ok(())
    })
}

/// Loads a profile file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_load(
    path: *const c_char,
    out: *mut *mut GfKnowledgeBase,
) -> GfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let path = PathBuf::from(str_arg(path, "path")?);
        let inner = store::load_kb(&path)?;
        *out = Box::into_raw(Box::new(GfKnowledgeBase { inner }));
        Ok(())
    })
}

/// Writes the profile atomically.
///
/// # Safety
/// `kb` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_save(kb: *const GfKnowledgeBase, path: *const c_char) -> GfStatus {
    guard(|| {
        let kb = kb_ref(kb)?;
        let path = PathBuf::from(str_arg(path, "path")?);
        store::save_kb(kb, &path)?;
        Ok(())
    })
}

/// # Safety
/// `kb` must be NULL or a handle from `gf_kb_new`/`gf_kb_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_free(kb: *mut GfKnowledgeBase) {
    if !kb.is_null() {
        drop(Box::from_raw(kb));
    }
}

/// # Safety
/// `kb` must be a live handle; `width` and `height` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_dims(
    kb: *const GfKnowledgeBase,
    width: *mut usize,
    height: *mut usize,
) -> GfStatus {
    guard(|| {
        let kb = kb_ref(kb)?;
        *width.as_mut().ok_or_else(|| null("width"))? = kb.dims().width();
        *height.as_mut().ok_or_else(|| null("height"))? = kb.dims().height();
        Ok(())
    })
}

/// Number of labels, or 0 for a NULL handle.
///
/// # Safety
/// `kb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_label_count(kb: *const GfKnowledgeBase) -> usize {
    kb.as_ref().map_or(0, |k| k.inner.len())
}

/// Teaches one pattern under `label`; writes the new teach count.
///
/// # Safety
/// `kb` must be a live handle, `label` a NUL-terminated string, `cells` must
/// point to `len` readable bytes, and `teach_count` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_teach(
    kb: *mut GfKnowledgeBase,
    label: *const c_char,
    cells: *const u8,
    len: usize,
    teach_count: *mut u32,
) -> GfStatus {
    guard(|| {
        let kb = kb_mut(kb)?;
        let label = Label::new(str_arg(label, "label")?)?;
        let grid = grid_arg(kb.dims(), cells, len)?;
        let n = kb.teach(&label, &grid)?.teach_count();
        if let Some(out) = teach_count.as_mut() {
            *out = n;
        }
        Ok(())
    })
}

/// # Safety
/// `kb` must be a live handle and `label` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_forget(kb: *mut GfKnowledgeBase, label: *const c_char) -> GfStatus {
    guard(|| {
        let kb = kb_mut(kb)?;
        let label =
            Label::new(str_arg(label, "label")?).map_err(|_| Error::UnknownLabel(String::new()))?;
        kb.forget(&label)?;
        Ok(())
    })
}

/// Copies a label's weights (row-major) into `weights`, which must hold
/// `width * height` values.
///
/// # Safety
/// `kb` must be a live handle, `label` a NUL-terminated string, `weights`
/// must point to `len` writable values, and `teach_count` must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_weights(
    kb: *const GfKnowledgeBase,
    label: *const c_char,
    weights: *mut i32,
    len: usize,
    teach_count: *mut u32,
) -> GfStatus {
    guard(|| {
        let kb = kb_ref(kb)?;
        let name = str_arg(label, "label")?;
        let label = Label::new(name).map_err(|_| Error::UnknownLabel(name.to_owned()))?;
        let w = kb.weights(&label)?;
        if weights.is_null() {
            return Err(null("weights"));
        }
        if len < w.weights().len() {
            return Err(Fail(
                GfStatus::BufferTooSmall,
                format!("buffer holds {len} weights, need {}", w.weights().len()),
            ));
        }
        std::slice::from_raw_parts_mut(weights, w.weights().len()).copy_from_slice(w.weights());
        if let Some(out) = teach_count.as_mut() {
            *out = w.teach_count();
        }
        Ok(())
    })
}

/// Classifies a pattern. `best_label` receives a newly allocated string
/// (free with `gf_string_free`) or NULL when nothing was scorable; pass NULL
/// to skip it.
///
/// # Safety
/// `kb` must be a live handle, `cells` must point to `len` readable bytes,
/// `out` must be writable and `best_label` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_classify(
    kb: *const GfKnowledgeBase,
    cells: *const u8,
    len: usize,
    threshold_num: i64,
    threshold_den: u64,
    out: *mut GfDecision,
    best_label: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let kb = kb_ref(kb)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let grid = grid_arg(kb.dims(), cells, len)?;
        let d = classify(kb, &grid, threshold_arg(threshold_num, threshold_den)?)?;
        let kind = match d.kind {
            DecisionKind::Match => GfDecisionKind::Match,
            DecisionKind::Unknown => GfDecisionKind::Unknown,
            DecisionKind::EmptyKb => GfDecisionKind::EmptyKb,
        };
        *out = match d.best() {
            Some(b) => GfDecision {
                kind,
                psi: b.psi,
                mu: b.mu,
                q_num: b.q.numer(),
                q_den: b.q.denom(),
                scored: d.scores.len(),
            },
            None => GfDecision {
                kind,
                psi: 0,
                mu: 0,
                q_num: 0,
                q_den: 1,
                scored: 0,
            },
        };
        if let Some(slot) = best_label.as_mut() {
            *slot = d
                .best()
                .map_or(ptr::null_mut(), |b| into_c_string(b.label.to_string()));
        }
        Ok(())
    })
}

/// Full decision as JSON, in the same shape the HTTP service returns.
///
/// # Safety
/// As for `gf_kb_classify`; `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_kb_classify_json(
    kb: *const GfKnowledgeBase,
    cells: *const u8,
    len: usize,
    threshold_num: i64,
    threshold_den: u64,
    json: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let kb = kb_ref(kb)?;
        let json = json.as_mut().ok_or_else(|| null("json"))?;
        let grid = grid_arg(kb.dims(), cells, len)?;
        let d = classify(kb, &grid, threshold_arg(threshold_num, threshold_den)?)?;
        let body = serde_json::to_string(&DecisionBody::from(&d)).expect("serializable");
        *json = into_c_string(body);
        Ok(())
    })
}

/// Digitizes an 8-bit luminance raster (0 = ink) into `grid_width *
/// grid_height` cells written to `out_cells`.
///
/// # Safety
/// `pixels` must point to `width * height` readable bytes and `out_cells` to
/// `out_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gf_digitize(
    pixels: *const u8,
    width: usize,
    height: usize,
    grid_width: usize,
    grid_height: usize,
    ink_threshold: u8,
    coverage: f64,
    out_cells: *mut u8,
    out_len: usize,
) -> GfStatus {
    guard(|| {
        if pixels.is_null() {
            return Err(null("pixels"));
        }
        if out_cells.is_null() {
            return Err(null("out_cells"));
        }
        let dims = GridDims::new(grid_width, grid_height)?;
        if out_len < dims.cell_count() {
            return Err(Fail(
                GfStatus::BufferTooSmall,
                format!("buffer holds {out_len} cells, need {}", dims.cell_count()),
            ));
        }
        let count = width
            .checked_mul(height)
            .ok_or_else(|| Fail(GfStatus::InvalidArgument, "raster size overflows".into()))?;
        let raster = Raster::new(
            width,
            height,
            std::slice::from_raw_parts(pixels, count).to_vec(),
        )?;
        let grid = digitize(
            &raster,
            dims,
            DigitizeParams {
                ink_threshold,
                coverage,
            },
        )?;
        let out = std::slice::from_raw_parts_mut(out_cells, dims.cell_count());
        for (o, &b) in out.iter_mut().zip(grid.cells()) {
            *o = u8::from(b);
        }
        Ok(())
    })
}
