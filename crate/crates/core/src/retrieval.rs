//! Similarity matrices, top-K ranking and late fusion.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::datamodel::binary::Cursor;
use crate::datamodel::{read_file, write_file, FeatureSet, ItemId, PredictionTable, RankedLists};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"CBVS";
const VERSION: u8 = 1;

/// How a query/candidate pair is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Cosine,
    /// `−‖u − v‖²`; unbounded, so not meaningful to fuse with cosine channels.
    NegSquaredEuclidean,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Cosine => "cosine",
            Metric::NegSquaredEuclidean => "neg-euclidean",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "neg-euclidean" => Ok(Metric::NegSquaredEuclidean),
            other => Err(Error::invalid(format!(
                "unknown metric {other:?} (expected cosine or neg-euclidean)"
            ))),
        }
    }
}

/// Dense `queries × candidates` score matrix with id registries.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    query_ids: Vec<ItemId>,
    candidate_ids: Vec<ItemId>,
    /// Row-major.
    scores: Vec<f32>,
}

fn check_registry(ids: &[ItemId], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    match ids.iter().find(|id| !seen.insert(*id)) {
        Some(dup) => Err(Error::invalid(format!("duplicate {what} id {dup}"))),
        None => Ok(()),
    }
}

impl SimilarityMatrix {
    pub fn new(query_ids: Vec<ItemId>, candidate_ids: Vec<ItemId>, scores: Vec<f32>) -> Result<Self> {
        check_registry(&query_ids, "query")?;
        check_registry(&candidate_ids, "candidate")?;
        let expected = query_ids.len() * candidate_ids.len();
        if scores.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: scores.len(),
            });
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("similarity scores must be finite"));
        }
        Ok(SimilarityMatrix {
            query_ids,
            candidate_ids,
            scores,
        })
    }

    pub fn rows(&self) -> usize {
        self.query_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.candidate_ids.len()
    }

    pub fn query_ids(&self) -> &[ItemId] {
        &self.query_ids
    }

    pub fn candidate_ids(&self) -> &[ItemId] {
        &self.candidate_ids
    }

    pub fn scores(&self) -> &[f32] {
        &self.scores
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let c = self.cols();
        &self.scores[i * c..(i + 1) * c]
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.scores[row * self.cols() + col]
    }

    fn same_registries(&self, other: &SimilarityMatrix) -> bool {
        self.query_ids == other.query_ids && self.candidate_ids == other.candidate_ids
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(13 + self.scores.len() * 4);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols() as u32).to_le_bytes());
        for id in self.query_ids.iter().chain(&self.candidate_ids) {
            out.extend_from_slice(&(id.as_str().len() as u16).to_le_bytes());
            out.extend_from_slice(id.as_str().as_bytes());
        }
        for s in &self.scores {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor::new(bytes);
        cur.magic(MAGIC)?;
        let version = cur.u8("version")?;
        if version != VERSION {
            return Err(Error::format(format!("unsupported version {version}"), 0, 4));
        }
        let rows = cur.u32("row count")? as usize;
        let cols = cur.u32("column count")? as usize;
        // Each id takes at least 3 bytes; reject absurd counts before allocating.
        if rows.saturating_add(cols).saturating_mul(3) > bytes.len() {
            return Err(cur.err(format!("{rows}x{cols} registries cannot fit in the file")));
        }
        let mut read_ids = |n: usize, first_record: usize| -> Result<Vec<ItemId>> {
            (0..n)
                .map(|i| {
                    cur.set_record(first_record + i);
                    cur.id()
                })
                .collect()
        };
        let query_ids = read_ids(rows, 1)?;
        let candidate_ids = read_ids(cols, rows + 1)?;
        let cells = rows * cols;
        if cells.saturating_mul(4) != bytes.len() - cur.pos() {
            return Err(cur.err(format!(
                "score block of {rows}x{cols} does not match {} remaining bytes",
                bytes.len() - cur.pos()
            )));
        }
        cur.set_record(rows + cols);
        let mut scores = Vec::with_capacity(cells);
        for _ in 0..cells {
            let at = cur.pos();
            let s = cur.f32("score")?;
            if !s.is_finite() {
                return Err(Error::format(format!("non-finite score {s}"), rows + cols, at));
            }
            scores.push(s);
        }
        SimilarityMatrix::new(query_ids, candidate_ids, scores).map_err(|e| Error::format(e.to_string(), 0, 13))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_file(path)?)
    }
}

fn dot(u: &[f32], v: &[f32]) -> f64 {
    u.iter().zip(v).map(|(&a, &b)| f64::from(a) * f64::from(b)).sum()
}

fn norm(u: &[f32]) -> f64 {
    dot(u, u).sqrt()
}

/// `u·v / (‖u‖·‖v‖)`, or 0 when either vector is zero.
pub fn cosine_similarity(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(cosine_with_norms(u, v, norm(u), norm(v)))
}

fn cosine_with_norms(u: &[f32], v: &[f32], nu: f64, nv: f64) -> f64 {
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0)
}

fn neg_sq_euclidean(u: &[f32], v: &[f32]) -> f64 {
    -u.iter()
        .zip(v)
        .map(|(&a, &b)| {
            let d = f64::from(a) - f64::from(b);
            d * d
        })
        .sum::<f64>()
}

/// Cosine similarity of every query against every candidate.
pub fn similarity_matrix(queries: &FeatureSet, candidates: &FeatureSet) -> Result<SimilarityMatrix> {
    similarity_matrix_with(queries, candidates, Metric::Cosine)
}

/// Scores every pair with `metric`. Rows follow query order and columns
/// candidate order; rows are computed in parallel.
pub fn similarity_matrix_with(
    queries: &FeatureSet,
    candidates: &FeatureSet,
    metric: Metric,
) -> Result<SimilarityMatrix> {
    if queries.dim() != candidates.dim() {
        return Err(Error::DimensionMismatch {
            expected: queries.dim(),
            found: candidates.dim(),
        });
    }
    queries.require_pooled("similarity")?;
    candidates.require_pooled("similarity")?;
    let cols = candidates.len();
    let cand_norms: Vec<f64> = (0..cols).map(|j| norm(candidates.vector(j))).collect();
    let mut scores = vec![0f32; queries.len() * cols];
    if cols > 0 {
        scores.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
            let q = queries.vector(i);
            let nq = norm(q);
            for (j, s) in row.iter_mut().enumerate() {
                let c = candidates.vector(j);
                let v = match metric {
                    Metric::Cosine => cosine_with_norms(q, c, nq, cand_norms[j]),
                    Metric::NegSquaredEuclidean => neg_sq_euclidean(q, c),
                };
                *s = v as f32;
            }
        });
    }
    SimilarityMatrix::new(queries.ids().to_vec(), candidates.ids().to_vec(), scores)
}

/// The `k` best candidates of every row, best first.
///
/// Ties go to the lexicographically smaller candidate id. With
/// `exclude_self`, a candidate whose id equals the row's query id is never
/// returned. Rows with fewer than `k` eligible candidates return all of them.
pub fn top_k(matrix: &SimilarityMatrix, k: usize, exclude_self: bool) -> Result<PredictionTable> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let cand = matrix.candidate_ids();
    let by_rank = |a: &usize, b: &usize, row: &[f32]| -> Ordering {
        row[*b]
            .partial_cmp(&row[*a])
            .expect("finite scores")
            .then_with(|| cand[*a].cmp(&cand[*b]))
    };
    let ranked: Vec<Vec<ItemId>> = (0..matrix.rows())
        .into_par_iter()
        .map(|i| {
            let row = matrix.row(i);
            let query = &matrix.query_ids()[i];
            let mut cols: Vec<usize> = (0..cand.len())
                .filter(|&j| !(exclude_self && cand[j] == *query))
                .collect();
            if cols.len() > k {
                cols.select_nth_unstable_by(k - 1, |a, b| by_rank(a, b, row));
                cols.truncate(k);
            }
            cols.sort_unstable_by(|a, b| by_rank(a, b, row));
            cols.into_iter().map(|j| cand[j].clone()).collect()
        })
        .collect();
    let mut lists = RankedLists::new();
    for (q, list) in matrix.query_ids().iter().zip(ranked) {
        // Without self-exclusion a list may legitimately contain its query;
        // keep it out so the table stays a valid prediction file.
        let list = if exclude_self {
            list
        } else {
            list.into_iter().filter(|id| id != q).collect()
        };
        lists.push(q.clone(), list)?;
    }
    Ok(PredictionTable::new(lists))
}

/// Entry-wise weighted mean of matrices with identical registries.
///
/// Empty `weights` means uniform weighting, i.e. the plain average. Sums run
/// in `f64` in input order and are rounded to `f32` once.
pub fn fuse(matrices: &[SimilarityMatrix], weights: &[f64]) -> Result<SimilarityMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::invalid("fusion needs at least one matrix"))?;
    if let Some(i) = matrices.iter().position(|m| !m.same_registries(first)) {
        return Err(Error::invalid(format!(
            "registry mismatch: matrix {} has different query or candidate ids than matrix 1",
            i + 1
        )));
    }
    let weights: Vec<f64> = if weights.is_empty() {
        vec![1.0; matrices.len()]
    } else {
        if weights.len() != matrices.len() {
            return Err(Error::invalid(format!(
                "{} weights given for {} matrices",
                weights.len(),
                matrices.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("fusion weights must be finite and non-negative"));
        }
        weights.to_vec()
    };
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("fusion weights sum to zero"));
    }
    let scores = (0..first.scores.len())
        .map(|c| {
            let s: f64 = matrices
                .iter()
                .zip(&weights)
                .map(|(m, w)| w * f64::from(m.scores[c]))
                .sum();
            (s / total) as f32
        })
        .collect();
    SimilarityMatrix::new(first.query_ids.clone(), first.candidate_ids.clone(), scores)
}
