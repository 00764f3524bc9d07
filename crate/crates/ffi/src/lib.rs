//! C ABI over the `cbvrp` library.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `*_load`/constructor function and released by the matching `*_free`.
//! Fallible functions return a [`CbvrpStatus`] and write their result through
//! an out-pointer, which is set to NULL first. On failure
//! [`cbvrp_last_error`] describes what went wrong on the calling thread.
//! Panics never unwind into C; they surface as `CBVRP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use libc::c_char;

use cbvrp::datamodel::{
    load_predictions, load_relevance, load_relevance_with_candidates, save_features, save_predictions,
};
use cbvrp::retrieval::similarity_matrix_with;
use cbvrp::{
    embed, evaluate, fuse, mean_pool, top_k, train, EmbeddingModel, Error, EvalReport, FeatureFormat, FeatureSet,
    ItemId, Metric, PredictionTable, RelevanceTable, SimilarityMatrix, TrainConfig,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbvrpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    DimensionMismatch = 5,
    UnknownId = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbvrpMetric {
    Cosine = 0,
    NegSquaredEuclidean = 1,
}

/// Training settings; start from [`cbvrp_train_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CbvrpTrainConfig {
    pub embed_dim: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub triplets_per_anchor: usize,
    pub batch_size: usize,
    pub seed: u64,
}

pub struct CbvrpFeatures(FeatureSet);
pub struct CbvrpRelevance(RelevanceTable);
pub struct CbvrpPredictions(PredictionTable);
pub struct CbvrpModel(EmbeddingModel);
pub struct CbvrpMatrix(SimilarityMatrix);
pub struct CbvrpReport(EvalReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CbvrpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => CbvrpStatus::Io,
            Error::Format { .. } | Error::List { .. } => CbvrpStatus::Format,
            Error::DimensionMismatch { .. } => CbvrpStatus::DimensionMismatch,
            Error::UnknownId(_) => CbvrpStatus::UnknownId,
            Error::InvalidId { .. } | Error::Invalid(_) => CbvrpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CbvrpStatus::NullArgument, format!("{what} is NULL"))
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CbvrpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CbvrpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            CbvrpStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CbvrpStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn path(p: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    string(p, what).map(PathBuf::from)
}

/// Clears `*out` up front so callers never see a stale handle after an error.
unsafe fn out_slot<'a, T>(out: *mut *mut T) -> Result<&'a mut *mut T, Failure> {
    let slot = out.as_mut().ok_or_else(|| null("out"))?;
    *slot = ptr::null_mut();
    Ok(slot)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cbvrp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn cbvrp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

// ---- features ----

/// Empty feature set of dimension `dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_new(dim: usize, out: *mut *mut CbvrpFeatures) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        *slot = boxed(CbvrpFeatures(FeatureSet::new(dim)?));
        Ok(())
    })
}

/// Appends an item with `n_frames` frames stored row-major in `values`
/// (`n_frames * dim` floats).
///
/// # Safety
/// `set` must be a live handle, `id` a NUL-terminated string and `values`
/// must point to `n_frames * dim` readable floats.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_push(
    set: *mut CbvrpFeatures,
    id: *const c_char,
    values: *const f32,
    n_frames: usize,
) -> CbvrpStatus {
    guard(|| {
        let set = &mut borrow_mut(set, "set")?.0;
        let id = ItemId::new(string(id, "id")?)?;
        if values.is_null() {
            return Err(null("values"));
        }
        let dim = set.dim();
        let len = n_frames
            .checked_mul(dim)
            .ok_or_else(|| Failure(CbvrpStatus::InvalidArgument, "frame count overflows".into()))?;
        let data = std::slice::from_raw_parts(values, len);
        let frames: Vec<&[f32]> = data.chunks_exact(dim).collect();
        set.push(id, &frames)?;
        Ok(())
    })
}

/// Loads `.cbvt` files as text and anything else as binary.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_load(path: *const c_char, out: *mut *mut CbvrpFeatures) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let p = self::path(path, "path")?;
        let set = cbvrp::datamodel::load_features(&p, FeatureFormat::from_path(&p))?;
        *slot = boxed(CbvrpFeatures(set));
        Ok(())
    })
}

/// # Safety
/// `set` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_save(set: *const CbvrpFeatures, path: *const c_char) -> CbvrpStatus {
    guard(|| {
        let set = &borrow(set, "set")?.0;
        let p = self::path(path, "path")?;
        save_features(set, &p, FeatureFormat::from_path(&p))?;
        Ok(())
    })
}

/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_free(set: *mut CbvrpFeatures) {
    release(set)
}

/// Number of items, 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_len(set: *const CbvrpFeatures) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Vector dimension, 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_dim(set: *const CbvrpFeatures) -> usize {
    set.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the pooled vector of `id` into `buf` (`buf_len` floats, at least
/// the set dimension).
///
/// # Safety
/// `set` must be a live handle, `id` a NUL-terminated string and `buf` must
/// point to `buf_len` writable floats.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_get(
    set: *const CbvrpFeatures,
    id: *const c_char,
    buf: *mut f32,
    buf_len: usize,
) -> CbvrpStatus {
    guard(|| {
        let set = &borrow(set, "set")?.0;
        let id = string(id, "id")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if buf_len < set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                found: buf_len,
            }
            .into());
        }
        let idx = set.index_of(id).ok_or_else(|| Error::UnknownId(id.into()))?;
        if set.frame_count(idx) != 1 {
            return Err(Failure(
                CbvrpStatus::InvalidArgument,
                format!("{id} has {} frames; mean-pool first", set.frame_count(idx)),
            ));
        }
        std::slice::from_raw_parts_mut(buf, set.dim()).copy_from_slice(set.vector(idx));
        Ok(())
    })
}

/// New set with every item's frames averaged into one vector.
///
/// # Safety
/// `set` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_features_mean_pool(
    set: *const CbvrpFeatures,
    out: *mut *mut CbvrpFeatures,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let set = &borrow(set, "set")?.0;
        *slot = boxed(CbvrpFeatures(mean_pool(set)));
        Ok(())
    })
}

// ---- relevance / predictions ----

/// Loads a ground-truth file; `candidates` may be NULL to use every id it
/// mentions.
///
/// # Safety
/// `path` must be a NUL-terminated string, `candidates` NULL or one, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_relevance_load(
    path: *const c_char,
    candidates: *const c_char,
    out: *mut *mut CbvrpRelevance,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let p = self::path(path, "path")?;
        let table = if candidates.is_null() {
            load_relevance(&p)?
        } else {
            load_relevance_with_candidates(&p, &self::path(candidates, "candidates")?)?
        };
        *slot = boxed(CbvrpRelevance(table));
        Ok(())
    })
}

/// Number of queries, 0 for NULL.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_relevance_len(table: *const CbvrpRelevance) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `table` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_relevance_free(table: *mut CbvrpRelevance) {
    release(table)
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_predictions_load(path: *const c_char, out: *mut *mut CbvrpPredictions) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let table = load_predictions(&self::path(path, "path")?)?;
        *slot = boxed(CbvrpPredictions(table));
        Ok(())
    })
}

/// # Safety
/// `table` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_predictions_save(table: *const CbvrpPredictions, path: *const c_char) -> CbvrpStatus {
    guard(|| {
        let table = &borrow(table, "table")?.0;
        save_predictions(table, &self::path(path, "path")?)?;
        Ok(())
    })
}

/// Number of queries, 0 for NULL.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_predictions_len(table: *const CbvrpPredictions) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `table` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_predictions_free(table: *mut CbvrpPredictions) {
    release(table)
}

// ---- training ----

#[no_mangle]
pub extern "C" fn cbvrp_train_config_default() -> CbvrpTrainConfig {
    let d = TrainConfig::default();
    CbvrpTrainConfig {
        embed_dim: d.embed_dim,
        margin: d.margin,
        learning_rate: d.learning_rate,
        epochs: d.epochs,
        triplets_per_anchor: d.triplets_per_anchor,
        batch_size: d.batch_size,
        seed: d.seed,
    }
}

/// Trains a linear embedding on pooled `features`; `config` may be NULL for
/// the defaults.
///
/// # Safety
/// `truth` and `features` must be live handles, `config` NULL or valid, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_train(
    truth: *const CbvrpRelevance,
    features: *const CbvrpFeatures,
    config: *const CbvrpTrainConfig,
    out: *mut *mut CbvrpModel,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let truth = &borrow(truth, "truth")?.0;
        let features = &borrow(features, "features")?.0;
        let c = config.as_ref().copied().unwrap_or_else(|| cbvrp_train_config_default());
        let config = TrainConfig {
            embed_dim: c.embed_dim,
            margin: c.margin,
            learning_rate: c.learning_rate,
            epochs: c.epochs,
            triplets_per_anchor: c.triplets_per_anchor,
            batch_size: c.batch_size,
            seed: c.seed,
        };
        *slot = boxed(CbvrpModel(train(truth, features, &config)?));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_model_load(path: *const c_char, out: *mut *mut CbvrpModel) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        *slot = boxed(CbvrpModel(EmbeddingModel::load(&self::path(path, "path")?)?));
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_model_save(model: *const CbvrpModel, path: *const c_char) -> CbvrpStatus {
    guard(|| {
        borrow(model, "model")?.0.save(&self::path(path, "path")?)?;
        Ok(())
    })
}

/// Writes the output and input dimensions; either pointer may be NULL.
///
/// # Safety
/// `model` must be a live handle; non-NULL pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_model_dims(
    model: *const CbvrpModel,
    embed_dim: *mut usize,
    input_dim: *mut usize,
) -> CbvrpStatus {
    guard(|| {
        let model = &borrow(model, "model")?.0;
        if let Some(d) = embed_dim.as_mut() {
            *d = model.embed_dim();
        }
        if let Some(d) = input_dim.as_mut() {
            *d = model.input_dim();
        }
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_model_free(model: *mut CbvrpModel) {
    release(model)
}

/// Projects every pooled vector of `features` through `model`.
///
/// # Safety
/// `model` and `features` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_embed(
    model: *const CbvrpModel,
    features: *const CbvrpFeatures,
    out: *mut *mut CbvrpFeatures,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let model = &borrow(model, "model")?.0;
        let features = &borrow(features, "features")?.0;
        *slot = boxed(CbvrpFeatures(embed(model, features)?));
        Ok(())
    })
}

// ---- retrieval ----

/// Scores every query against every candidate.
///
/// # Safety
/// `queries` and `candidates` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_similarity(
    queries: *const CbvrpFeatures,
    candidates: *const CbvrpFeatures,
    metric: CbvrpMetric,
    out: *mut *mut CbvrpMatrix,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let q = &borrow(queries, "queries")?.0;
        let c = &borrow(candidates, "candidates")?.0;
        let metric = match metric {
            CbvrpMetric::Cosine => Metric::Cosine,
            CbvrpMetric::NegSquaredEuclidean => Metric::NegSquaredEuclidean,
        };
        *slot = boxed(CbvrpMatrix(similarity_matrix_with(q, c, metric)?));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_matrix_load(path: *const c_char, out: *mut *mut CbvrpMatrix) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        *slot = boxed(CbvrpMatrix(SimilarityMatrix::load(&self::path(path, "path")?)?));
        Ok(())
    })
}

/// # Safety
/// `matrix` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_matrix_save(matrix: *const CbvrpMatrix, path: *const c_char) -> CbvrpStatus {
    guard(|| {
        borrow(matrix, "matrix")?.0.save(&self::path(path, "path")?)?;
        Ok(())
    })
}

/// Row count, 0 for NULL.
///
/// # Safety
/// `matrix` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_matrix_rows(matrix: *const CbvrpMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.rows())
}

/// Column count, 0 for NULL.
///
/// # Safety
/// `matrix` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_matrix_cols(matrix: *const CbvrpMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.cols())
}

/// Row-major scores, `rows * cols` floats owned by the handle.
///
/// # Safety
/// `matrix` must be NULL or a live handle; the pointer dies with it.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_matrix_scores(matrix: *const CbvrpMatrix) -> *const f32 {
    matrix.as_ref().map_or(ptr::null(), |m| m.0.scores().as_ptr())
}

/// # Safety
/// `matrix` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_matrix_free(matrix: *mut CbvrpMatrix) {
    release(matrix)
}

/// Weighted average of `n` matrices over identical id registries. `weights`
/// may be NULL for a plain average.
///
/// # Safety
/// `matrices` must point to `n` live handles, `weights` NULL or `n` readable
/// doubles, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_fuse(
    matrices: *const *const CbvrpMatrix,
    weights: *const f64,
    n: usize,
    out: *mut *mut CbvrpMatrix,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        if matrices.is_null() {
            return Err(null("matrices"));
        }
        // handles are separate allocations; fuse wants one contiguous slice
        let owned = std::slice::from_raw_parts(matrices, n)
            .iter()
            .map(|&m| borrow(m, "matrix").map(|m| m.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let w: &[f64] = if weights.is_null() {
            &[]
        } else {
            std::slice::from_raw_parts(weights, n)
        };
        *slot = boxed(CbvrpMatrix(fuse(&owned, w)?));
        Ok(())
    })
}

/// Top-`k` candidates per query, ties broken by ascending id.
///
/// # Safety
/// `matrix` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_top_k(
    matrix: *const CbvrpMatrix,
    k: usize,
    exclude_self: bool,
    out: *mut *mut CbvrpPredictions,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let m = &borrow(matrix, "matrix")?.0;
        *slot = boxed(CbvrpPredictions(top_k(m, k, exclude_self)?));
        Ok(())
    })
}

// ---- evaluation ----

/// Mean hit@K and recall@K over `truth` queries with non-empty lists.
///
/// # Safety
/// `truth` and `pred` must be live handles, `k_hit`/`k_recall` must point to
/// `n_hit`/`n_recall` values (NULL allowed when the count is 0), and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_evaluate(
    truth: *const CbvrpRelevance,
    pred: *const CbvrpPredictions,
    k_hit: *const usize,
    n_hit: usize,
    k_recall: *const usize,
    n_recall: usize,
    out: *mut *mut CbvrpReport,
) -> CbvrpStatus {
    guard(|| {
        let slot = out_slot(out)?;
        let truth = &borrow(truth, "truth")?.0;
        let pred = &borrow(pred, "pred")?.0;
        let grid = |p: *const usize, n: usize, what: &str| -> Result<&[usize], Failure> {
            match (p.is_null(), n) {
                (_, 0) => Ok(&[]),
                (true, _) => Err(null(what)),
                (false, n) => Ok(std::slice::from_raw_parts(p, n)),
            }
        };
        let report = evaluate(
            truth,
            pred,
            grid(k_hit, n_hit, "k_hit")?,
            grid(k_recall, n_recall, "k_recall")?,
        )?;
        *slot = boxed(CbvrpReport(report));
        Ok(())
    })
}

/// Mean hit@`k`; `k` must be part of the evaluated grid.
///
/// # Safety
/// `report` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_report_hit(report: *const CbvrpReport, k: usize, value: *mut f64) -> CbvrpStatus {
    guard(|| {
        let v = borrow(report, "report")?
            .0
            .hit(k)
            .ok_or_else(|| not_in_grid("hit", k))?;
        *borrow_mut(value, "value")? = v;
        Ok(())
    })
}

/// Mean recall@`k`; `k` must be part of the evaluated grid.
///
/// # Safety
/// `report` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_report_recall(report: *const CbvrpReport, k: usize, value: *mut f64) -> CbvrpStatus {
    guard(|| {
        let v = borrow(report, "report")?
            .0
            .recall(k)
            .ok_or_else(|| not_in_grid("recall", k))?;
        *borrow_mut(value, "value")? = v;
        Ok(())
    })
}

fn not_in_grid(metric: &str, k: usize) -> Failure {
    Failure(CbvrpStatus::InvalidArgument, format!("{metric}@{k} was not evaluated"))
}

/// Queries that contributed to the averages, 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_report_evaluated(report: *const CbvrpReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.evaluated_queries)
}

/// Queries skipped for an empty ground-truth list, 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_report_skipped(report: *const CbvrpReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.skipped_queries)
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbvrp_report_free(report: *mut CbvrpReport) {
    release(report)
}
