//! recall@K and hit@K, and their averages over a ground-truth table.
//!
//! For a query with relevance list `o` and predicted list `p`,
//! `recall@K = |o ∩ p[..K]| / |o|` and `hit@K = 1` iff that intersection is
//! non-empty. Reports average both over queries whose list is non-empty;
//! recall is undefined for an empty list, so those queries are counted apart.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::datamodel::{ItemId, PredictionTable, RelevanceTable};
use crate::error::{Error, Result};

pub const DEFAULT_HIT_KS: [usize; 4] = [5, 10, 20, 30];
pub const DEFAULT_RECALL_KS: [usize; 4] = [50, 100, 200, 300];

const EXCLUSION_NOTE: &str = "averages exclude queries with an empty ground-truth list";

/// `|truth ∩ pred[..k]|` and `|truth|`.
pub fn overlap_at_k(truth: &[ItemId], pred: &[ItemId], k: usize) -> Result<(usize, usize)> {
    if truth.is_empty() {
        return Err(Error::invalid("recall is undefined for an empty ground-truth list"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let top = &pred[..k.min(pred.len())];
    let mut seen = HashSet::with_capacity(top.len());
    if let Some(dup) = top.iter().find(|id| !seen.insert(*id)) {
        return Err(Error::invalid(format!("duplicate id {dup} in prediction list")));
    }
    let truth: HashSet<&ItemId> = truth.iter().collect();
    let hits = top.iter().filter(|id| truth.contains(id)).count();
    Ok((hits, truth.len()))
}

pub fn recall_at_k(truth: &[ItemId], pred: &[ItemId], k: usize) -> Result<f64> {
    let (hits, total) = overlap_at_k(truth, pred, k)?;
    Ok(hits as f64 / total as f64)
}

pub fn hit_at_k(truth: &[ItemId], pred: &[ItemId], k: usize) -> Result<u8> {
    let (hits, _) = overlap_at_k(truth, pred, k)?;
    Ok(u8::from(hits > 0))
}

/// Averaged metrics over one ground-truth table.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `(K, mean hit@K)` in grid order.
    pub hit_at: Vec<(usize, f64)>,
    /// `(K, mean recall@K)` in grid order.
    pub recall_at: Vec<(usize, f64)>,
    pub evaluated_queries: usize,
    /// Queries with an empty ground-truth list.
    pub skipped_queries: usize,
}

impl EvalReport {
    pub fn hit(&self, k: usize) -> Option<f64> {
        self.hit_at.iter().find(|(kk, _)| *kk == k).map(|(_, v)| *v)
    }

    pub fn recall(&self, k: usize) -> Option<f64> {
        self.recall_at.iter().find(|(kk, _)| *kk == k).map(|(_, v)| *v)
    }

    pub fn k_grid_hit(&self) -> Vec<usize> {
        self.hit_at.iter().map(|(k, _)| *k).collect()
    }

    pub fn k_grid_recall(&self) -> Vec<usize> {
        self.recall_at.iter().map(|(k, _)| *k).collect()
    }

    /// Flat `key=value` lines, full precision.
    pub fn to_key_values(&self) -> String {
        let mut out = format!("# {EXCLUSION_NOTE}\n");
        for (k, v) in &self.hit_at {
            writeln!(out, "hit@{k}={v}").unwrap();
        }
        for (k, v) in &self.recall_at {
            writeln!(out, "recall@{k}={v}").unwrap();
        }
        writeln!(out, "evaluated_queries={}", self.evaluated_queries).unwrap();
        writeln!(out, "skipped_queries={}", self.skipped_queries).unwrap();
        out
    }

    /// Human-readable table: hit@K columns, then recall@K columns.
    pub fn to_text(&self) -> String {
        let mut out = format_table(&[], &[(Vec::new(), self)]);
        writeln!(
            out,
            "queries: {} evaluated, {} skipped ({EXCLUSION_NOTE})",
            self.evaluated_queries, self.skipped_queries
        )
        .unwrap();
        out
    }
}

/// Renders reports as rows of one table. Each row starts with its label
/// cells (one per entry of `label_headers`); all reports must share K grids.
///
/// ```text
/// #dim  #epoch | hit@5  hit@10 hit@20 hit@30 | recall@50 recall@100 recall@200 recall@300
/// 64    4      | 0.244  0.326  0.431  0.510  | 0.109     0.172      0.264      0.329
/// ```
pub fn format_table(label_headers: &[&str], rows: &[(Vec<String>, &EvalReport)]) -> String {
    let Some((_, first)) = rows.first() else {
        return String::new();
    };
    let hit_heads: Vec<String> = first.hit_at.iter().map(|(k, _)| format!("hit@{k}")).collect();
    let rec_heads: Vec<String> = first.recall_at.iter().map(|(k, _)| format!("recall@{k}")).collect();
    let label_w: Vec<usize> = label_headers
        .iter()
        .enumerate()
        .map(|(i, h)| rows.iter().map(|(l, _)| l[i].len()).chain([h.len()]).max().unwrap())
        .collect();

    let mut out = String::new();
    let mut line = |labels: Vec<String>, hits: Vec<String>, recs: Vec<String>| {
        let mut s = String::new();
        for (l, w) in labels.iter().zip(&label_w) {
            write!(s, "{l:<w$} ").unwrap();
        }
        if !labels.is_empty() {
            s.push_str("| ");
        }
        for (v, h) in hits.iter().zip(&hit_heads) {
            write!(s, "{v:<w$} ", w = h.len().max(5)).unwrap();
        }
        s.push_str("| ");
        for (v, h) in recs.iter().zip(&rec_heads) {
            write!(s, "{v:<w$} ", w = h.len().max(5)).unwrap();
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(
        label_headers.iter().map(|s| s.to_string()).collect(),
        hit_heads.clone(),
        rec_heads.clone(),
    );
    for (labels, report) in rows {
        line(
            labels.clone(),
            report.hit_at.iter().map(|(_, v)| format!("{v:.3}")).collect(),
            report.recall_at.iter().map(|(_, v)| format!("{v:.3}")).collect(),
        );
    }
    out
}

/// Averages recall@K and hit@K over every query of `truth` with a non-empty
/// list. Such a query missing from `pred` is an error.
pub fn evaluate(
    truth: &RelevanceTable,
    pred: &PredictionTable,
    k_hit: &[usize],
    k_recall: &[usize],
) -> Result<EvalReport> {
    if k_hit.iter().chain(k_recall).any(|&k| k == 0) {
        return Err(Error::invalid("k must be at least 1"));
    }
    let queries: Vec<(&ItemId, &[ItemId])> = truth.iter().filter(|(_, l)| !l.is_empty()).collect();
    let skipped = truth.len() - queries.len();

    let missing: Vec<&str> = queries
        .iter()
        .filter(|(q, _)| pred.get(q.as_str()).is_none())
        .map(|(q, _)| q.as_str())
        .collect();
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(10).copied().collect();
        return Err(Error::invalid(format!(
            "{} queries have no prediction, first: {}",
            missing.len(),
            shown.join(", ")
        )));
    }

    // Per query: hit flags over k_hit, (hits, |truth|) over k_recall.
    type Counts = (Vec<usize>, Vec<(usize, usize)>);
    let per_query: Vec<Counts> = queries
        .par_iter()
        .map(|(q, list)| {
            let p = pred.get(q.as_str()).expect("checked above");
            let hits = k_hit
                .iter()
                .map(|&k| overlap_at_k(list, p, k).map(|(h, _)| usize::from(h > 0)))
                .collect::<Result<Vec<_>>>()?;
            let recalls = k_recall
                .iter()
                .map(|&k| overlap_at_k(list, p, k))
                .collect::<Result<Vec<_>>>()?;
            Ok((hits, recalls))
        })
        .collect::<Result<_>>()?;

    let n = queries.len();
    let mean = |sum: f64| if n == 0 { 0.0 } else { sum / n as f64 };
    let hit_at = k_hit
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, mean(per_query.iter().map(|(h, _)| h[i] as f64).sum())))
        .collect();
    let recall_at = k_recall
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let sum = per_query.iter().map(|(_, r)| r[i].0 as f64 / r[i].1 as f64).sum();
            (k, mean(sum))
        })
        .collect();
    Ok(EvalReport {
        hit_at,
        recall_at,
        evaluated_queries: n,
        skipped_queries: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(s: &[&str]) -> Vec<ItemId> {
        s.iter().map(|x| ItemId::new(*x).unwrap()).collect()
    }

    #[test]
    fn recall_examples() {
        let truth = ids(&["a", "b", "c"]);
        let pred = ids(&["b", "x", "c", "y", "z"]);
        assert!((recall_at_k(&truth, &pred, 5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(recall_at_k(&ids(&["a"]), &ids(&["a", "b"]), 1).unwrap(), 1.0);
        assert!(recall_at_k(&[], &pred, 5).is_err());
        assert!(recall_at_k(&truth, &pred, 0).is_err());
        assert!(recall_at_k(&truth, &ids(&["a", "a"]), 2).is_err());
    }

    #[test]
    fn hit_examples() {
        let truth = ids(&["a"]);
        let pred = ids(&["x", "y", "a"]);
        assert_eq!(hit_at_k(&truth, &pred, 2).unwrap(), 0);
        assert_eq!(hit_at_k(&truth, &pred, 3).unwrap(), 1);
    }

    #[test]
    fn evaluate_perfect_predictor() {
        let t = RelevanceTable::from_entries(
            [
                (ids(&["q"])[0].clone(), ids(&["a", "b", "c"])),
                (ids(&["r"])[0].clone(), ids(&["a"])),
            ],
            None,
        )
        .unwrap();
        let p = PredictionTable::from_entries(t.iter().map(|(q, l)| (q.clone(), l.to_vec()))).unwrap();
        let rep = evaluate(&t, &p, &[1, 2, 5], &[1, 2, 3]).unwrap();
        assert!(rep.hit_at.iter().all(|(_, v)| *v == 1.0));
        // q: min(K,3)/3, r: 1
        assert_eq!(rep.recall(1).unwrap(), (1.0 / 3.0 + 1.0) / 2.0);
        assert_eq!(rep.recall(2).unwrap(), (2.0 / 3.0 + 1.0) / 2.0);
        assert_eq!(rep.recall(3).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_single_query_partial() {
        let t = RelevanceTable::from_entries([(ids(&["q"])[0].clone(), ids(&["a", "b"]))], None).unwrap();
        let mut list: Vec<ItemId> = (0..49).map(|i| ItemId::new(format!("x{i}")).unwrap()).collect();
        list.insert(7, ids(&["b"])[0].clone());
        let p = PredictionTable::from_entries([(ids(&["q"])[0].clone(), list)]).unwrap();
        let rep = evaluate(&t, &p, &[5, 10], &[50]).unwrap();
        assert_eq!(rep.recall(50), Some(0.5));
        assert_eq!(rep.hit(5), Some(0.0));
        assert_eq!(rep.hit(10), Some(1.0));
    }

    #[test]
    fn evaluate_skips_empty_and_rejects_missing() {
        let t = RelevanceTable::from_entries(
            [(ids(&["q"])[0].clone(), ids(&["a"])), (ids(&["e"])[0].clone(), vec![])],
            None,
        )
        .unwrap();
        let p = PredictionTable::from_entries([(ids(&["q"])[0].clone(), ids(&["a"]))]).unwrap();
        let rep = evaluate(&t, &p, &DEFAULT_HIT_KS, &DEFAULT_RECALL_KS).unwrap();
        assert_eq!((rep.evaluated_queries, rep.skipped_queries), (1, 1));
        assert_eq!(rep.k_grid_hit(), DEFAULT_HIT_KS);
        assert_eq!(rep.k_grid_recall(), DEFAULT_RECALL_KS);

        let empty = PredictionTable::default();
        let msg = evaluate(&t, &empty, &[5], &[50]).unwrap_err().to_string();
        assert!(msg.contains("no prediction") && msg.contains('q'), "{msg}");
    }

    #[test]
    fn report_renderings() {
        let rep = EvalReport {
            hit_at: vec![(5, 0.253), (10, 0.5)],
            recall_at: vec![(50, 0.111)],
            evaluated_queries: 3,
            skipped_queries: 0,
        };
        let kv = rep.to_key_values();
        assert!(kv.contains("hit@5=0.253\n") && kv.contains("recall@50=0.111\n"));
        let text = rep.to_text();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header.split_whitespace().collect::<Vec<_>>(),
            ["hit@5", "hit@10", "|", "recall@50"]
        );
        let table = format_table(&["#dim", "#epoch"], &[(vec!["64".into(), "4".into()], &rep)]);
        let row = table.lines().nth(1).unwrap();
        assert_eq!(
            row.split_whitespace().collect::<Vec<_>>(),
            ["64", "4", "|", "0.253", "0.500", "|", "0.111"]
        );
    }
}
