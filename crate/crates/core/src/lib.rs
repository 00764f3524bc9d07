//! Content-based video relevance prediction.
//!
//! Items carry pre-extracted content feature vectors. A linear embedding is
//! learned from item-to-item relevance lists with a triplet hinge loss,
//! candidates are ranked by similarity (optionally fusing several feature
//! channels), and rankings are scored with recall@K and hit@K.
//!
//! Module map:
//!
//! * [`datamodel`]: item ids, feature sets, relevance/prediction tables and
//!   their on-disk formats.
//! * [`trainer`]: triplet sampling, loss, gradient and the SGD loop.
//! * [`retrieval`]: similarity matrices, top-K ranking and late fusion.
//! * [`metrics`]: recall@K / hit@K and averaged reports.
//! * [`synth`]: planted-cluster synthetic datasets.
//! * [`cli`]: the `cbvrp` command-line front end.

pub mod cli;
pub mod datamodel;
pub mod error;
pub mod metrics;
pub mod retrieval;
pub mod synth;
pub mod trainer;

pub use datamodel::{mean_pool, FeatureFormat, FeatureSet, ItemId, PredictionTable, RelevanceTable};
pub use error::{Error, Result};
pub use metrics::{evaluate, hit_at_k, recall_at_k, EvalReport};
pub use retrieval::{fuse, similarity_matrix, top_k, Metric, SimilarityMatrix};
pub use synth::{generate, Split, SynthConfig, SynthDataset};
pub use trainer::{embed, train, EmbeddingModel, TrainConfig, TripletBatch};
