//! Planted-cluster synthetic datasets.
//!
//! Every item gets a latent position `z = μ_c + σ·ε` around its cluster
//! centroid `μ_c`. Ground truth ranks items by latent Euclidean distance.
//! Each feature channel observes `A_ch · (z + σ·η_ch)` through its own random
//! linear map `A_ch` with uneven per-direction gains and its own noise `η_ch`,
//! so raw cosine similarity is a distorted view of the relevance geometry
//! and channels carry partly independent evidence.

use std::fmt::Write as _;
use std::path::Path;

use rand::distr::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::datamodel::{
    save_candidates, save_features, save_relevance, write_file, FeatureFormat, FeatureSet, ItemId, RelevanceTable,
};
use crate::error::{Error, Result};

/// Per-direction channel gains are `exp(u)`, `u ~ U[−GAIN_LOG_SPREAD, GAIN_LOG_SPREAD]`.
const GAIN_LOG_SPREAD: f64 = 1.5;

const SPLIT_FRACTIONS: [f64; 2] = [0.45, 0.10];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_items: usize,
    pub n_clusters: usize,
    pub raw_dim: usize,
    pub n_channels: usize,
    pub noise_sigma: f64,
    /// Ground-truth list length M.
    pub truth_len: usize,
    /// Dimension of the latent space holding centroids.
    pub latent_dim: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_items: 500,
            n_clusters: 20,
            raw_dim: 64,
            n_channels: 2,
            noise_sigma: 0.5,
            truth_len: 30,
            latent_dim: 16,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(format!("invalid synth config: {msg}")));
        for (name, v) in [
            ("n-items", self.n_items),
            ("n-clusters", self.n_clusters),
            ("raw-dim", self.raw_dim),
            ("channels", self.n_channels),
            ("truth-len", self.truth_len),
            ("latent-dim", self.latent_dim),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise must be finite and non-negative".into());
        }
        if self.truth_len >= self.n_items {
            return bad(format!(
                "M ≥ n_items (truth-len {} must be below n-items {})",
                self.truth_len, self.n_items
            ));
        }
        if self.n_clusters > self.n_items {
            return bad(format!(
                "n-clusters ({}) exceeds n-items ({})",
                self.n_clusters, self.n_items
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub config: SynthConfig,
    /// One pooled feature set per channel, all with the same id order.
    pub channels: Vec<FeatureSet>,
    /// Every item's M nearest neighbours in latent space; candidates are all items.
    pub truth: RelevanceTable,
    /// Split of each item, aligned with the channel id order.
    pub splits: Vec<Split>,
    /// Cluster of each item, aligned with the channel id order.
    pub clusters: Vec<usize>,
}

impl SynthDataset {
    pub fn ids(&self) -> &[ItemId] {
        self.channels[0].ids()
    }

    pub fn split_ids(&self, split: Split) -> Vec<ItemId> {
        self.ids()
            .iter()
            .zip(&self.splits)
            .filter(|(_, s)| **s == split)
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Ground truth for the queries of one split, lists ranging over all items.
    pub fn eval_table(&self, split: Split) -> RelevanceTable {
        let entries = self
            .truth
            .iter()
            .zip(&self.splits)
            .filter(|(_, s)| **s == split)
            .map(|((q, l), _)| (q.clone(), l.to_vec()));
        RelevanceTable::from_entries(entries, Some(self.truth.candidates().to_vec())).expect("subset of a valid table")
    }

    /// Training ground truth: train queries, lists and candidates restricted to
    /// train items, so no other split's features leak into training.
    pub fn train_table(&self) -> RelevanceTable {
        let train: Vec<ItemId> = self.split_ids(Split::Train);
        let is_train: std::collections::HashSet<&ItemId> = train.iter().collect();
        let entries = self.truth.iter().filter(|(q, _)| is_train.contains(q)).map(|(q, l)| {
            (
                q.clone(),
                l.iter().filter(|id| is_train.contains(id)).cloned().collect(),
            )
        });
        RelevanceTable::from_entries(entries, Some(train.clone())).expect("subset of a valid table")
    }

    pub fn splits_text(&self) -> String {
        let mut out = String::new();
        for (id, s) in self.ids().iter().zip(&self.splits) {
            writeln!(out, "{id}\t{}", s.name()).unwrap();
        }
        out
    }

    /// Writes `channel{i}.cbvf`, `truth.rel`, `{train,val,test}.rel`,
    /// `candidates.cand`, `train.cand` and `splits.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (i, ch) in self.channels.iter().enumerate() {
            save_features(ch, &dir.join(format!("channel{i}.cbvf")), FeatureFormat::Binary)?;
        }
        save_relevance(&self.truth, &dir.join("truth.rel"))?;
        save_relevance(&self.train_table(), &dir.join("train.rel"))?;
        save_relevance(&self.eval_table(Split::Val), &dir.join("val.rel"))?;
        save_relevance(&self.eval_table(Split::Test), &dir.join("test.rel"))?;
        save_candidates(self.truth.candidates(), &dir.join("candidates.cand"))?;
        save_candidates(&self.split_ids(Split::Train), &dir.join("train.cand"))?;
        write_file(&dir.join("splits.txt"), self.splits_text().as_bytes())
    }
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    StandardNormal.sample_iter(rng).take(n).collect()
}

/// Draws a dataset. Every random draw happens in a fixed order whose count
/// does not depend on `noise_sigma`, so configs differing only in noise share
/// cluster assignments, centroids and transforms.
pub fn generate(config: &SynthConfig) -> Result<SynthDataset> {
    config.validate()?;
    let SynthConfig {
        n_items: n,
        n_clusters: k,
        raw_dim,
        latent_dim: l,
        noise_sigma: sigma,
        ..
    } = *config;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut clusters: Vec<usize> = (0..n).map(|i| i % k).collect();
    clusters.shuffle(&mut rng);
    let centroids = normals(&mut rng, k * l);
    let shared_noise = normals(&mut rng, n * l);
    let latent: Vec<f64> = (0..n * l)
        .map(|c| centroids[clusters[c / l] * l + c % l] + sigma * shared_noise[c])
        .collect();

    let width = (n - 1).to_string().len().max(4);
    let ids: Vec<ItemId> = (0..n)
        .map(|i| ItemId::new(format!("item{i:0width$}")).expect("valid id"))
        .collect();

    let gain_dist = Uniform::new_inclusive(-GAIN_LOG_SPREAD, GAIN_LOG_SPREAD).expect("finite bounds");
    let mut channels = Vec::with_capacity(config.n_channels);
    for _ in 0..config.n_channels {
        let gains: Vec<f64> = (0..l).map(|_| gain_dist.sample(&mut rng).exp()).collect();
        let scale = 1.0 / (l as f64).sqrt();
        let transform: Vec<f64> = normals(&mut rng, raw_dim * l)
            .into_iter()
            .enumerate()
            .map(|(c, a)| a * scale * gains[c % l])
            .collect();
        let obs_noise = normals(&mut rng, n * l);
        let mut set = FeatureSet::new(raw_dim)?;
        let mut observed = vec![0.0; l];
        for (i, id) in ids.iter().enumerate() {
            for j in 0..l {
                observed[j] = latent[i * l + j] + sigma * obs_noise[i * l + j];
            }
            let v: Vec<f32> = transform
                .chunks_exact(l)
                .map(|row| row.iter().zip(&observed).map(|(a, z)| a * z).sum::<f64>() as f32)
                .collect();
            set.push(id.clone(), &[v])?;
        }
        channels.push(set);
    }

    let splits = assign_splits(&clusters, k, &mut rng);
    let truth = ground_truth(&ids, &latent, l, config.truth_len)?;
    Ok(SynthDataset {
        config: config.clone(),
        channels,
        truth,
        splits,
        clusters,
    })
}

/// Per cluster: shuffle members, then 45% train, 10% val, the rest test.
fn assign_splits(clusters: &[usize], k: usize, rng: &mut ChaCha8Rng) -> Vec<Split> {
    let mut splits = vec![Split::Test; clusters.len()];
    for c in 0..k {
        let mut members: Vec<usize> = (0..clusters.len()).filter(|&i| clusters[i] == c).collect();
        members.shuffle(rng);
        let m = members.len() as f64;
        let n_train = (SPLIT_FRACTIONS[0] * m).round() as usize;
        let n_val = (SPLIT_FRACTIONS[1] * m).round() as usize;
        for (pos, &i) in members.iter().enumerate() {
            splits[i] = if pos < n_train {
                Split::Train
            } else if pos < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
        }
    }
    splits
}

/// M nearest other items by squared latent distance, ties by ascending id.
fn ground_truth(ids: &[ItemId], latent: &[f64], l: usize, m: usize) -> Result<RelevanceTable> {
    let n = ids.len();
    let mut entries = Vec::with_capacity(n);
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        let zi = &latent[i * l..(i + 1) * l];
        order.clear();
        order.extend((0..n).filter(|&j| j != i).map(|j| {
            let zj = &latent[j * l..(j + 1) * l];
            let d: f64 = zi.iter().zip(zj).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, j)
        }));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| ids[a.1].cmp(&ids[b.1])));
        let list = order.iter().take(m).map(|&(_, j)| ids[j].clone()).collect();
        entries.push((ids[i].clone(), list));
    }
    RelevanceTable::from_entries(entries, Some(ids.to_vec()))
}
