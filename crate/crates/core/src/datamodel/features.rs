use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::binary::Cursor;
use super::id::ItemId;
use super::{read_file, write_file};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"CBVF";
const VERSION: u8 = 1;
const FLAG_POOLED: u8 = 0b0000_0001;
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureFormat {
    /// `.cbvf`
    Binary,
    /// `.cbvt`
    Text,
}

impl FeatureFormat {
    /// Picks the format from a file extension; anything but `.cbvt` is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("cbvt") => FeatureFormat::Text,
            _ => FeatureFormat::Binary,
        }
    }
}

/// Item id → one or more `dim`-length vectors (frames), in insertion order.
///
/// Vectors are stored as `f32`, the on-disk precision, so a load/save cycle
/// is lossless.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    dim: usize,
    ids: Vec<ItemId>,
    index: HashMap<ItemId, usize>,
    /// `offsets[i]..offsets[i + 1]` are the frame rows of item `i`.
    offsets: Vec<usize>,
    data: Vec<f32>,
}

impl FeatureSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("feature dimension must be positive"));
        }
        Ok(FeatureSet {
            dim,
            ids: Vec::new(),
            index: HashMap::new(),
            offsets: vec![0],
            data: Vec::new(),
        })
    }

    /// Builds a pooled set from `(id, vector)` pairs.
    pub fn from_vectors<I, V>(dim: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ItemId, V)>,
        V: AsRef<[f32]>,
    {
        let mut set = FeatureSet::new(dim)?;
        for (id, v) in items {
            set.push(id, &[v.as_ref()])?;
        }
        Ok(set)
    }

    /// Appends an item with its frames. Fails on a duplicate id, zero frames,
    /// a wrong-length frame or a non-finite component; the set is left
    /// unchanged on error.
    pub fn push<F: AsRef<[f32]>>(&mut self, id: ItemId, frames: &[F]) -> Result<()> {
        if self.index.contains_key(&id) {
            return Err(Error::invalid(format!("duplicate item id {id}")));
        }
        if frames.is_empty() {
            return Err(Error::invalid(format!("item {id} has no vectors")));
        }
        for frame in frames {
            check_vector(self.dim, frame.as_ref())?;
        }
        for frame in frames {
            self.data.extend_from_slice(frame.as_ref());
        }
        self.index.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.offsets.push(self.data.len() / self.dim);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ItemId] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// True when every item has exactly one vector (vacuously true when empty).
    pub fn is_pooled(&self) -> bool {
        self.offsets.windows(2).all(|w| w[1] - w[0] == 1)
    }

    pub fn frame_count(&self, item: usize) -> usize {
        self.offsets[item + 1] - self.offsets[item]
    }

    pub fn frames(&self, item: usize) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        let rows = self.offsets[item]..self.offsets[item + 1];
        rows.map(move |r| &self.data[r * self.dim..(r + 1) * self.dim])
    }

    /// First vector of an item; the only one when the set is pooled.
    pub fn vector(&self, item: usize) -> &[f32] {
        let r = self.offsets[item];
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    /// Vector of an item by id.
    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.index_of(id).map(|i| self.vector(i))
    }

    /// New set holding only `ids`, in the given order.
    pub fn select(&self, ids: &[ItemId]) -> Result<FeatureSet> {
        let mut out = FeatureSet::new(self.dim)?;
        for id in ids {
            let i = self
                .index_of(id.as_str())
                .ok_or_else(|| Error::UnknownId(id.as_str().to_owned()))?;
            let frames: Vec<&[f32]> = self.frames(i).collect();
            out.push(id.clone(), &frames)?;
        }
        Ok(out)
    }

    pub(crate) fn require_pooled(&self, what: &str) -> Result<()> {
        if self.is_pooled() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what} requires pooled features (one vector per item); run mean pooling first"
            )))
        }
    }
}

fn check_vector(dim: usize, v: &[f32]) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("non-finite feature value {x}")));
    }
    Ok(())
}

/// Replaces each item's frames by their component-wise mean.
///
/// Sums run in frame order with `f64` accumulators and are rounded to `f32`
/// once, so the result is bit-deterministic for a given input. Single-frame
/// items pass through unchanged.
pub fn mean_pool(set: &FeatureSet) -> FeatureSet {
    if set.is_pooled() {
        return set.clone();
    }
    let dim = set.dim;
    let mut data = Vec::with_capacity(set.len() * dim);
    let mut acc = vec![0f64; dim];
    for item in 0..set.len() {
        acc.iter_mut().for_each(|a| *a = 0.0);
        let n = set.frame_count(item);
        for frame in set.frames(item) {
            for (a, &x) in acc.iter_mut().zip(frame) {
                *a += f64::from(x);
            }
        }
        data.extend(acc.iter().map(|&a| (a / n as f64) as f32));
    }
    FeatureSet {
        dim,
        ids: set.ids.clone(),
        index: set.index.clone(),
        offsets: (0..=set.len()).collect(),
        data,
    }
}

pub fn load_features(path: &Path, format: FeatureFormat) -> Result<FeatureSet> {
    let bytes = read_file(path)?;
    match format {
        FeatureFormat::Binary => decode_binary(&bytes),
        FeatureFormat::Text => decode_text(&bytes),
    }
}

/// Writes `set`. The whole file is encoded in memory first, so nothing is
/// written when encoding fails.
pub fn save_features(set: &FeatureSet, path: &Path, format: FeatureFormat) -> Result<()> {
    let bytes = match format {
        FeatureFormat::Binary => encode_binary(set)?,
        FeatureFormat::Text => encode_text(set).into_bytes(),
    };
    write_file(path, &bytes)
}

pub(crate) fn encode_binary(set: &FeatureSet) -> Result<Vec<u8>> {
    let n = u32::try_from(set.len()).map_err(|_| Error::invalid("too many items for .cbvf"))?;
    let dim = u32::try_from(set.dim).map_err(|_| Error::invalid("dimension too large for .cbvf"))?;
    let pooled = set.is_pooled();

    let mut out = Vec::with_capacity(HEADER_LEN + set.data.len() * 4 + set.len() * 16);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(if pooled { FLAG_POOLED } else { 0 });
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    for (item, id) in set.ids.iter().enumerate() {
        let frames = u32::try_from(set.frame_count(item))
            .map_err(|_| Error::invalid(format!("too many frames for item {id}")))?;
        out.extend_from_slice(&(id.as_str().len() as u16).to_le_bytes());
        out.extend_from_slice(id.as_str().as_bytes());
        out.extend_from_slice(&frames.to_le_bytes());
        for frame in set.frames(item) {
            for x in frame {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub(crate) fn decode_binary(bytes: &[u8]) -> Result<FeatureSet> {
    let mut cur = Cursor::new(bytes);
    cur.magic(MAGIC)?;
    let version = cur.u8("version")?;
    if version != VERSION {
        return Err(Error::format(format!("unsupported version {version}"), 0, 4));
    }
    let flags = cur.u8("flags")?;
    if flags & !FLAG_POOLED != 0 {
        return Err(Error::format(format!("unknown flag bits {flags:#04x}"), 0, 5));
    }
    let reserved = cur.take(2, "reserved bytes")?;
    if reserved != [0, 0] {
        return Err(Error::format("reserved header bytes are not zero", 0, 6));
    }
    let n = cur.u32("item count")? as usize;
    let dim = cur.u32("dimension")? as usize;
    if dim == 0 {
        return Err(Error::format("dimension must be positive", 0, 12));
    }
    let pooled = flags & FLAG_POOLED != 0;

    let mut set = FeatureSet::new(dim)?;
    if n == 0 {
        cur.finish()?;
        return Ok(set);
    }
    // Smallest record: 1-byte id, frame count, one vector. Bounds the
    // frame buffer by the file size.
    let min_record = dim.saturating_mul(4).saturating_add(7);
    let remaining = bytes.len() - cur.pos();
    if min_record > remaining {
        return Err(Error::format(
            format!("truncated file: a record of dim {dim} needs at least {min_record} bytes, {remaining} left"),
            1,
            cur.pos(),
        ));
    }
    let mut frame = vec![0f32; dim];
    let mut frames: Vec<Vec<f32>> = Vec::new();
    for record in 1..=n {
        cur.set_record(record);
        let start = cur.pos();
        let id = cur.id()?;
        let at = cur.pos();
        let count = cur.u32("frame count")? as usize;
        if count == 0 {
            return Err(Error::format(format!("item {id} has no vectors"), record, at));
        }
        if pooled && count != 1 {
            return Err(Error::format(
                format!("pooled file but item {id} has {count} frames"),
                record,
                at,
            ));
        }
        // Reject impossible counts before allocating.
        let need = count.saturating_mul(dim).saturating_mul(4);
        if need > bytes.len() - cur.pos() {
            return Err(cur.err(format!("truncated file: {count} frames of dim {dim} need {need} bytes")));
        }
        frames.clear();
        for _ in 0..count {
            for x in frame.iter_mut() {
                let at = cur.pos();
                *x = cur.f32("feature value")?;
                if !x.is_finite() {
                    return Err(Error::format(format!("non-finite value {x}"), record, at));
                }
            }
            frames.push(frame.clone());
        }
        if set.contains(id.as_str()) {
            return Err(Error::format(format!("duplicate item id {id}"), record, start));
        }
        set.push(id, &frames)
            .map_err(|e| Error::format(e.to_string(), record, start))?;
    }
    cur.set_record(n);
    cur.finish()?;
    Ok(set)
}

fn encode_text(set: &FeatureSet) -> String {
    let mut out = String::new();
    for (item, id) in set.ids.iter().enumerate() {
        for (k, frame) in set.frames(item).enumerate() {
            write!(out, "{id}\t{k}\t").unwrap();
            for (j, x) in frame.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                // Debug prints the shortest representation that parses back
                // to the same f32.
                write!(out, "{x:?}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

fn decode_text(bytes: &[u8]) -> Result<FeatureSet> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::format("file is not valid UTF-8", 0, e.valid_up_to()))?;
    let mut set: Option<FeatureSet> = None;
    // Frames of the item currently being read.
    let mut current: Option<(ItemId, usize, Vec<Vec<f32>>)> = None;
    let mut offset = 0usize;

    let flush = |set: &mut FeatureSet, cur: (ItemId, usize, Vec<Vec<f32>>)| -> Result<()> {
        let (id, start, frames) = cur;
        set.push(id, &frames)
            .map_err(|e| Error::format(e.to_string(), 0, start))
    };

    for (lineno, line) in text.split_inclusive('\n').enumerate() {
        let record = lineno + 1;
        let start = offset;
        offset += line.len();
        let line = line.strip_suffix('\n').unwrap_or(line);
        let err = |what: String| Error::format(what, record, start);

        let mut fields = line.split('\t');
        let (Some(id), Some(frame_idx), Some(values), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(err("expected 3 tab-separated fields".into()));
        };
        let id = ItemId::new(id).map_err(|e| err(e.to_string()))?;
        let frame_idx: usize = frame_idx
            .parse()
            .map_err(|_| err(format!("bad frame index {frame_idx:?}")))?;
        let vector = values
            .split(',')
            .map(|v| {
                let x: f32 = v.trim().parse().map_err(|_| err(format!("bad number {v:?}")))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(err(format!("non-finite value {v}")))
                }
            })
            .collect::<Result<Vec<f32>>>()?;

        let set = match &mut set {
            Some(s) => s,
            None => set.insert(FeatureSet::new(vector.len()).map_err(|e| err(e.to_string()))?),
        };
        if vector.len() != set.dim() {
            return Err(err(format!(
                "dimension mismatch (expected {}, found {})",
                set.dim(),
                vector.len()
            )));
        }

        match &mut current {
            Some((cur_id, _, frames)) if *cur_id == id => {
                if frame_idx != frames.len() {
                    return Err(err(format!(
                        "frame index {frame_idx} for item {id}, expected {}",
                        frames.len()
                    )));
                }
                frames.push(vector);
            }
            _ => {
                if let Some(done) = current.take() {
                    flush(set, done)?;
                }
                if set.contains(id.as_str()) {
                    return Err(err(format!("duplicate item id {id}")));
                }
                if frame_idx != 0 {
                    return Err(err(format!("item {id} starts at frame {frame_idx}, expected 0")));
                }
                current = Some((id, start, vec![vector]));
            }
        }
    }
    let mut set = set.ok_or_else(|| Error::format("empty text feature file has no dimension", 0, 0))?;
    if let Some(done) = current.take() {
        flush(&mut set, done)?;
    }
    Ok(set)
}
