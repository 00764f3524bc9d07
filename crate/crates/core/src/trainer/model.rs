use std::path::Path;

use crate::datamodel::FeatureSet;
use crate::datamodel::{read_file, write_file};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"CBVM";
const VERSION: u8 = 1;

/// Provenance recorded alongside trained weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainMeta {
    pub margin: f64,
    /// Not stored in `.cbvm` files, so `None` after loading.
    pub learning_rate: Option<f64>,
    pub epochs: u32,
    pub seed: u64,
}

/// Linear embedding `f(x) = W·x`, `W` of shape `embed_dim × input_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    input_dim: usize,
    embed_dim: usize,
    /// Row-major, one row per output dimension.
    weight: Vec<f64>,
    meta: TrainMeta,
}

impl EmbeddingModel {
    pub fn new(embed_dim: usize, input_dim: usize, weight: Vec<f64>, meta: TrainMeta) -> Result<Self> {
        if embed_dim == 0 || input_dim == 0 {
            return Err(Error::invalid("model dimensions must be positive"));
        }
        if weight.len() != embed_dim * input_dim {
            return Err(Error::DimensionMismatch {
                expected: embed_dim * input_dim,
                found: weight.len(),
            });
        }
        if weight.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("model weights must be finite"));
        }
        Ok(EmbeddingModel {
            input_dim,
            embed_dim,
            weight,
            meta,
        })
    }

    /// Model with the given weights and neutral metadata; mostly for tests and
    /// hand-built maps.
    pub fn from_weights(embed_dim: usize, input_dim: usize, weight: Vec<f64>) -> Result<Self> {
        let meta = TrainMeta {
            margin: super::DEFAULT_MARGIN,
            learning_rate: None,
            epochs: 0,
            seed: 0,
        };
        Self::new(embed_dim, input_dim, weight, meta)
    }

    pub fn identity(dim: usize) -> Self {
        let mut w = vec![0.0; dim * dim];
        for i in 0..dim {
            w[i * dim + i] = 1.0;
        }
        Self::from_weights(dim, dim, w).expect("identity is valid")
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub(crate) fn weight_mut(&mut self) -> &mut [f64] {
        &mut self.weight
    }

    pub fn meta(&self) -> &TrainMeta {
        &self.meta
    }

    /// `W·x` into `out` (length `embed_dim`).
    pub fn project_into(&self, x: &[f32], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.input_dim);
        for (row, o) in self.weight.chunks_exact(self.input_dim).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(w, &v)| w * f64::from(v)).sum();
        }
    }

    pub fn project(&self, x: &[f32]) -> Vec<f64> {
        let mut out = vec![0.0; self.embed_dim];
        self.project_into(x, &mut out);
        out
    }

    pub(crate) fn check_input(&self, features: &FeatureSet) -> Result<()> {
        if features.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: features.dim(),
            });
        }
        Ok(())
    }

    /// Rounds every weight to the nearest `f32`, the on-disk precision.
    pub(crate) fn round_to_f32(&mut self) {
        for w in &mut self.weight {
            *w = f64::from(*w as f32);
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(29 + self.weight.len() * 4);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.input_dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.embed_dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.meta.margin as f32).to_le_bytes());
        out.extend_from_slice(&self.meta.epochs.to_le_bytes());
        out.extend_from_slice(&self.meta.seed.to_le_bytes());
        for w in &self.weight {
            out.extend_from_slice(&(*w as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        use crate::datamodel::binary::Cursor;
        let mut cur = Cursor::new(bytes);
        cur.magic(MAGIC)?;
        let version = cur.u8("version")?;
        if version != VERSION {
            return Err(Error::format(format!("unsupported version {version}"), 0, 4));
        }
        let input_dim = cur.u32("input dimension")? as usize;
        let embed_dim = cur.u32("embedding dimension")? as usize;
        let margin = f64::from(cur.f32("margin")?);
        let epochs = cur.u32("epochs")?;
        let seed = cur.u64("seed")?;
        if input_dim == 0 || embed_dim == 0 {
            return Err(cur.err("model dimensions must be positive"));
        }
        let count = input_dim
            .checked_mul(embed_dim)
            .filter(|c| c.saturating_mul(4) == bytes.len() - cur.pos())
            .ok_or_else(|| {
                cur.err(format!(
                    "weight block of {embed_dim}x{input_dim} does not match {} remaining bytes",
                    bytes.len() - cur.pos()
                ))
            })?;
        let mut weight = Vec::with_capacity(count);
        for _ in 0..count {
            let at = cur.pos();
            let w = cur.f32("weight")?;
            if !w.is_finite() {
                return Err(Error::format(format!("non-finite weight {w}"), 0, at));
            }
            weight.push(f64::from(w));
        }
        let meta = TrainMeta {
            margin,
            learning_rate: None,
            epochs,
            seed,
        };
        Self::new(embed_dim, input_dim, weight, meta)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_file(path)?)
    }
}
