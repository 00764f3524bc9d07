use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;

use super::TrainConfig;
use crate::datamodel::{FeatureSet, ItemId, RelevanceTable};
use crate::error::{Error, Result};

/// One training example, as row indices into a pooled [`FeatureSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triplet {
    pub anchor: usize,
    pub positive: usize,
    pub negative: usize,
}

/// Triplets drawn for one pass, plus how many anchors had no valid negative.
///
/// Indices refer to the feature set the batch was sampled against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripletBatch {
    pub triples: Vec<Triplet>,
    pub skipped_anchors: usize,
}

impl TripletBatch {
    /// Resolves `(anchor, positive, negative)` id triples against `features`.
    pub fn from_ids<S: AsRef<str>>(features: &FeatureSet, triples: &[(S, S, S)]) -> Result<Self> {
        let look = |id: &S| {
            features
                .index_of(id.as_ref())
                .ok_or_else(|| Error::UnknownId(id.as_ref().to_owned()))
        };
        let triples = triples
            .iter()
            .map(|(a, p, n)| {
                Ok(Triplet {
                    anchor: look(a)?,
                    positive: look(p)?,
                    negative: look(n)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TripletBatch {
            triples,
            skipped_anchors: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn ids<'a>(&self, features: &'a FeatureSet) -> Vec<(&'a ItemId, &'a ItemId, &'a ItemId)> {
        let ids = features.ids();
        self.triples
            .iter()
            .map(|t| (&ids[t.anchor], &ids[t.positive], &ids[t.negative]))
            .collect()
    }
}

/// Per-anchor sampling pools, resolved once and reused every epoch.
pub(crate) struct SamplingPlan {
    anchors: Vec<AnchorPlan>,
    /// Feature rows of every candidate that has a vector.
    candidates: Vec<usize>,
}

struct AnchorPlan {
    anchor: usize,
    positives: Vec<usize>,
    /// Rows excluded from the negative pool: the anchor and its positives.
    excluded: HashSet<usize>,
    pool_size: usize,
}

impl SamplingPlan {
    pub(crate) fn new(table: &RelevanceTable, features: &FeatureSet) -> Result<Self> {
        features.require_pooled("triplet sampling")?;
        let row = |id: &ItemId| {
            features
                .index_of(id.as_str())
                .ok_or_else(|| Error::invalid(format!("no feature vector for item {id}")))
        };
        // Candidates without features cannot serve as negatives.
        let candidates: Vec<usize> = table
            .candidates()
            .iter()
            .filter_map(|id| features.index_of(id.as_str()))
            .collect();
        let candidate_rows: HashSet<usize> = candidates.iter().copied().collect();

        let mut anchors = Vec::new();
        for (query, list) in table.iter() {
            if list.is_empty() {
                continue;
            }
            let anchor = row(query)?;
            let positives = list.iter().map(row).collect::<Result<Vec<_>>>()?;
            let excluded: HashSet<usize> = std::iter::once(anchor).chain(positives.iter().copied()).collect();
            let pool_size = candidates.len() - excluded.iter().filter(|r| candidate_rows.contains(r)).count();
            anchors.push(AnchorPlan {
                anchor,
                positives,
                excluded,
                pool_size,
            });
        }
        Ok(SamplingPlan { anchors, candidates })
    }

    pub(crate) fn has_signal(&self) -> bool {
        self.anchors.iter().any(|a| a.pool_size > 0)
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, per_anchor: usize, rng: &mut R) -> TripletBatch {
        let mut batch = TripletBatch::default();
        let mut negatives = Vec::new();
        for plan in &self.anchors {
            if plan.pool_size == 0 {
                batch.skipped_anchors += 1;
                continue;
            }
            let n = per_anchor.min(plan.positives.len()).min(plan.pool_size);
            let positives = index::sample(rng, plan.positives.len(), n);
            self.sample_negatives(plan, n, rng, &mut negatives);
            for (p, &neg) in positives.iter().zip(&negatives) {
                batch.triples.push(Triplet {
                    anchor: plan.anchor,
                    positive: plan.positives[p],
                    negative: neg,
                });
            }
        }
        batch
    }

    /// Draws `n` distinct rows uniformly from the anchor's negative pool.
    fn sample_negatives<R: Rng + ?Sized>(&self, plan: &AnchorPlan, n: usize, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        if plan.pool_size * 2 >= self.candidates.len() {
            // Rejection sampling over the full candidate list; accepted draws
            // are uniform over the pool and distinct.
            while out.len() < n {
                let r = self.candidates[rng.random_range(0..self.candidates.len())];
                if !plan.excluded.contains(&r) && !out.contains(&r) {
                    out.push(r);
                }
            }
        } else {
            let pool: Vec<usize> = self
                .candidates
                .iter()
                .copied()
                .filter(|r| !plan.excluded.contains(r))
                .collect();
            out.extend(index::sample(rng, pool.len(), n).iter().map(|i| pool[i]));
        }
    }
}

/// Draws up to `triplets_per_anchor` triplets for every query with a
/// non-empty relevance list.
///
/// Positives come from the query's list and negatives from the candidate set
/// minus the query and its list, both without replacement; the i-th positive is
/// paired with the i-th negative. Anchors with no possible negative are counted
/// in `skipped_anchors`.
pub fn sample_triplets<R: Rng + ?Sized>(
    table: &RelevanceTable,
    features: &FeatureSet,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<TripletBatch> {
    Ok(SamplingPlan::new(table, features)?.sample(config.triplets_per_anchor, rng))
}
