use std::borrow::Borrow;
use std::fmt;

use crate::error::{Error, Result};

/// Maximum id length in bytes; ids are length-prefixed in the binary formats.
pub const MAX_ID_BYTES: usize = 255;

/// Identifier of a show or movie.
///
/// Non-empty UTF-8, at most [`MAX_ID_BYTES`] bytes, and free of the characters
/// reserved by the text formats (tab, comma, CR, LF). Ordering is byte-wise
/// lexicographic, which is the tie-break order used by ranking.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId(String);

impl ItemId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if let Some(reason) = Self::problem(&id) {
            return Err(Error::InvalidId { id, reason });
        }
        Ok(ItemId(id))
    }

    fn problem(id: &str) -> Option<&'static str> {
        if id.is_empty() {
            Some("empty")
        } else if id.len() > MAX_ID_BYTES {
            Some("longer than 255 bytes")
        } else if id.contains(['\t', ',', '\n', '\r']) {
            Some("contains a reserved character (tab, comma or newline)")
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for ItemId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for ItemId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl std::str::FromStr for ItemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ItemId::new(s)
    }
}
