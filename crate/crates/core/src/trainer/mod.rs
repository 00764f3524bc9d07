//! Triplet-loss training of a linear embedding.

mod loss;
mod model;
mod triplets;

pub use loss::{loss_gradient, triplet_loss};
pub use model::{EmbeddingModel, TrainMeta};
pub use triplets::{sample_triplets, Triplet, TripletBatch};

use rand::distr::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::datamodel::{FeatureSet, ItemId, RelevanceTable};
use crate::error::{Error, Result};
use triplets::SamplingPlan;

pub const DEFAULT_MARGIN: f64 = 1.0;

/// Embedding dimensions of the reference sweep.
pub const DIM_GRID: [usize; 3] = [64, 128, 256];
/// Epoch counts of the reference sweep.
pub const EPOCH_GRID: [usize; 3] = [4, 8, 16];

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub embed_dim: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub triplets_per_anchor: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            embed_dim: 64,
            margin: DEFAULT_MARGIN,
            learning_rate: 0.01,
            epochs: 4,
            triplets_per_anchor: 5,
            batch_size: 128,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::invalid(format!("invalid training config: {what}")));
        if self.embed_dim == 0 {
            return bad("embedding dimension must be positive");
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return bad("margin must be finite and non-negative");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if self.triplets_per_anchor == 0 {
            return bad("triplets per anchor must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if u32::try_from(self.epochs).is_err() {
            return bad("too many epochs");
        }
        Ok(())
    }
}

/// Mean per-triplet losses observed while training.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    /// Loss of the first epoch's triplets under the initial weights.
    pub initial_loss: Option<f64>,
    /// Loss of each epoch's triplets after that epoch's updates.
    pub epoch_losses: Vec<f64>,
    pub triplets_per_epoch: Vec<usize>,
    pub skipped_anchors: usize,
}

/// Trains `f(x) = W·x` with mini-batch SGD on the triplet hinge loss.
///
/// `W` starts uniform on `[−s, s]`, `s = sqrt(6 / (input_dim + embed_dim))`.
/// Every epoch draws fresh triplets, shuffles them and steps
/// `W ← W − lr · ∇L_batch / |batch|`. All randomness comes from one ChaCha8
/// stream seeded by `config.seed`, so the result is bit-identical across runs.
/// Final weights are rounded to `f32`.
pub fn train(table: &RelevanceTable, features: &FeatureSet, config: &TrainConfig) -> Result<EmbeddingModel> {
    run(table, features, config, false).map(|(m, _)| m)
}

/// [`train`] that also reports the loss trajectory.
pub fn train_traced(
    table: &RelevanceTable,
    features: &FeatureSet,
    config: &TrainConfig,
) -> Result<(EmbeddingModel, TrainTrace)> {
    run(table, features, config, true)
}

fn run(
    table: &RelevanceTable,
    features: &FeatureSet,
    config: &TrainConfig,
    traced: bool,
) -> Result<(EmbeddingModel, TrainTrace)> {
    config.validate()?;
    features.require_pooled("training")?;
    let plan = SamplingPlan::new(table, features)?;
    if !plan.has_signal() {
        return Err(Error::invalid(
            "no training signal: no query has both a relevant item and a valid negative",
        ));
    }

    let input = features.dim();
    let embed = config.embed_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = (6.0 / (input + embed) as f64).sqrt();
    let init = Uniform::new_inclusive(-scale, scale).expect("finite bounds");
    let weight: Vec<f64> = (0..input * embed).map(|_| init.sample(&mut rng)).collect();
    let meta = TrainMeta {
        margin: config.margin,
        learning_rate: Some(config.learning_rate),
        epochs: config.epochs as u32,
        seed: config.seed,
    };
    let mut model = EmbeddingModel::new(embed, input, weight, meta)?;
    let mut trace = TrainTrace::default();

    for epoch in 0..config.epochs {
        let mut batch = plan.sample(config.triplets_per_anchor, &mut rng);
        batch.triples.shuffle(&mut rng);
        trace.skipped_anchors = batch.skipped_anchors;
        trace.triplets_per_epoch.push(batch.len());
        if traced && epoch == 0 {
            trace.initial_loss = Some(mean_loss(&batch, features, &model, config.margin));
        }
        for chunk in batch.triples.chunks(config.batch_size) {
            let (_, grad) = loss::loss_and_gradient(chunk, features, model.weight(), input, embed, config.margin, true);
            let step = config.learning_rate / chunk.len() as f64;
            for (w, g) in model.weight_mut().iter_mut().zip(grad.expect("requested")) {
                *w -= step * g;
            }
        }
        if model.weight().iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid(format!(
                "training diverged in epoch {}; lower the learning rate",
                epoch + 1
            )));
        }
        if traced {
            trace
                .epoch_losses
                .push(mean_loss(&batch, features, &model, config.margin));
        }
    }
    model.round_to_f32();
    Ok((model, trace))
}

fn mean_loss(batch: &TripletBatch, features: &FeatureSet, model: &EmbeddingModel, margin: f64) -> f64 {
    if batch.is_empty() {
        return 0.0;
    }
    let (l, _) = loss::loss_and_gradient(
        &batch.triples,
        features,
        model.weight(),
        model.input_dim(),
        model.embed_dim(),
        margin,
        false,
    );
    l / batch.len() as f64
}

/// Maps every vector through the model, rounding results to `f32`.
pub fn embed(model: &EmbeddingModel, set: &FeatureSet) -> Result<FeatureSet> {
    model.check_input(set)?;
    set.require_pooled("embedding")?;
    let mut buf = vec![0.0; model.embed_dim()];
    let mut out = FeatureSet::new(model.embed_dim())?;
    for (i, id) in set.ids().iter().enumerate() {
        model.project_into(set.vector(i), &mut buf);
        let v: Vec<f32> = buf.iter().map(|&x| x as f32).collect();
        push_embedded(&mut out, id, v)?;
    }
    Ok(out)
}

fn push_embedded(out: &mut FeatureSet, id: &ItemId, v: Vec<f32>) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("embedding of {id} overflowed f32")));
    }
    out.push(id.clone(), &[v])
}
