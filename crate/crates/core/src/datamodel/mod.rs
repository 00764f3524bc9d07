//! Core data types and their file formats.
//!
//! * `.cbvf`: binary feature file (little-endian, 32-bit float payload).
//! * `.cbvt`: text feature file, one `id<TAB>frame<TAB>v1,...,vD` line per vector.
//! * `.rel` / `.pred`: one `query<TAB>id1,id2,...` line per query, best first.
//! * `.cand`: one candidate id per line.

pub(crate) mod binary;
mod features;
mod id;
mod lists;

pub use features::{load_features, mean_pool, save_features, FeatureFormat, FeatureSet};
pub use id::ItemId;
pub use lists::{
    load_candidates, load_predictions, load_relevance, load_relevance_with_candidates, save_candidates,
    save_predictions, save_relevance, PredictionTable, RankedLists, RelevanceTable,
};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
