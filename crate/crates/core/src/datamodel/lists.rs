use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::id::ItemId;
use super::{read_file, write_file};
use crate::error::{Error, Result};

/// Ordered query → ranked id list map shared by ground truth and predictions.
///
/// Lists never contain their own query and never repeat an id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankedLists {
    queries: Vec<ItemId>,
    lists: Vec<Vec<ItemId>>,
    index: HashMap<ItemId, usize>,
}

impl RankedLists {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, query: ItemId, list: Vec<ItemId>) -> Result<()> {
        if self.index.contains_key(&query) {
            return Err(Error::invalid(format!("duplicate query {query}")));
        }
        check_list(&query, &list)?;
        self.index.insert(query.clone(), self.queries.len());
        self.queries.push(query);
        self.lists.push(list);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn queries(&self) -> &[ItemId] {
        &self.queries
    }

    pub fn get(&self, query: &str) -> Option<&[ItemId]> {
        self.index.get(query).map(|&i| self.lists[i].as_slice())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&ItemId, &[ItemId])> + '_ {
        self.queries.iter().zip(self.lists.iter().map(Vec::as_slice))
    }

    fn encode(&self) -> String {
        let mut out = String::new();
        for (q, list) in self.iter() {
            out.push_str(q.as_str());
            out.push('\t');
            for (i, id) in list.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(id.as_str());
            }
            out.push('\n');
        }
        out
    }

    fn decode(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::List {
            what: format!("invalid UTF-8 at byte {}", e.valid_up_to()),
            line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        })?;
        let mut out = RankedLists::new();
        for (i, line) in text.lines().enumerate() {
            let err = |what: String| Error::List { what, line: i + 1 };
            let Some((query, rest)) = line.split_once('\t') else {
                return Err(err("expected `query<TAB>id1,id2,...`".into()));
            };
            let query = ItemId::new(query).map_err(|e| err(e.to_string()))?;
            let list = if rest.is_empty() {
                Vec::new()
            } else {
                rest.split(',')
                    .map(|s| ItemId::new(s).map_err(|e| err(e.to_string())))
                    .collect::<Result<Vec<_>>>()?
            };
            out.push(query, list).map_err(|e| err(e.to_string()))?;
        }
        Ok(out)
    }
}

fn check_list(query: &ItemId, list: &[ItemId]) -> Result<()> {
    let mut seen = HashSet::with_capacity(list.len());
    for id in list {
        if id == query {
            return Err(Error::invalid(format!("self-reference in relevance list of {query}")));
        }
        if !seen.insert(id) {
            return Err(Error::invalid(format!("duplicate id {id} in list of {query}")));
        }
    }
    Ok(())
}

/// Ground truth: for each query `r`, the ordered list of its top-M relevant
/// items, plus the candidate set those items are drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceTable {
    lists: RankedLists,
    candidates: Vec<ItemId>,
    candidate_set: HashSet<ItemId>,
}

impl RelevanceTable {
    /// Builds a table. Without explicit candidates, the candidate set is every
    /// id appearing in the table (queries included), in first-seen order.
    pub fn new(lists: RankedLists, candidates: Option<Vec<ItemId>>) -> Result<Self> {
        let candidates = match candidates {
            Some(c) => {
                let mut seen = HashSet::with_capacity(c.len());
                if let Some(dup) = c.iter().find(|id| !seen.insert(*id)) {
                    return Err(Error::invalid(format!("duplicate candidate id {dup}")));
                }
                c
            }
            None => {
                let mut seen = HashSet::new();
                let mut c = Vec::new();
                for (q, list) in lists.iter() {
                    for id in std::iter::once(q).chain(list) {
                        if seen.insert(id) {
                            c.push(id.clone());
                        }
                    }
                }
                c
            }
        };
        let candidate_set: HashSet<ItemId> = candidates.iter().cloned().collect();
        for (q, list) in lists.iter() {
            if let Some(id) = list.iter().find(|id| !candidate_set.contains(*id)) {
                return Err(Error::invalid(format!(
                    "id {id} in list of {q} is not in the candidate set"
                )));
            }
        }
        Ok(RelevanceTable {
            lists,
            candidates,
            candidate_set,
        })
    }

    pub fn from_entries<I>(entries: I, candidates: Option<Vec<ItemId>>) -> Result<Self>
    where
        I: IntoIterator<Item = (ItemId, Vec<ItemId>)>,
    {
        let mut lists = RankedLists::new();
        for (q, l) in entries {
            lists.push(q, l)?;
        }
        Self::new(lists, candidates)
    }

    pub fn lists(&self) -> &RankedLists {
        &self.lists
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn get(&self, query: &str) -> Option<&[ItemId]> {
        self.lists.get(query)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&ItemId, &[ItemId])> + '_ {
        self.lists.iter()
    }

    pub fn candidates(&self) -> &[ItemId] {
        &self.candidates
    }

    pub fn is_candidate(&self, id: &str) -> bool {
        self.candidate_set.contains(id)
    }
}

/// Predicted top-K lists, in the same text format as ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionTable {
    lists: RankedLists,
}

impl PredictionTable {
    pub fn new(lists: RankedLists) -> Self {
        PredictionTable { lists }
    }

    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ItemId, Vec<ItemId>)>,
    {
        let mut lists = RankedLists::new();
        for (q, l) in entries {
            lists.push(q, l)?;
        }
        Ok(Self::new(lists))
    }

    pub fn lists(&self) -> &RankedLists {
        &self.lists
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn get(&self, query: &str) -> Option<&[ItemId]> {
        self.lists.get(query)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&ItemId, &[ItemId])> + '_ {
        self.lists.iter()
    }

    pub fn to_text(&self) -> String {
        self.lists.encode()
    }
}

pub fn load_relevance(path: &Path) -> Result<RelevanceTable> {
    let lists = RankedLists::decode(&read_file(path)?)?;
    RelevanceTable::new(lists, None)
}

/// Loads ground truth whose candidate set comes from a `.cand` file.
pub fn load_relevance_with_candidates(path: &Path, candidates: &Path) -> Result<RelevanceTable> {
    let lists = RankedLists::decode(&read_file(path)?)?;
    RelevanceTable::new(lists, Some(load_candidates(candidates)?))
}

pub fn save_relevance(table: &RelevanceTable, path: &Path) -> Result<()> {
    write_file(path, table.lists.encode().as_bytes())
}

pub fn load_predictions(path: &Path) -> Result<PredictionTable> {
    Ok(PredictionTable::new(RankedLists::decode(&read_file(path)?)?))
}

pub fn save_predictions(table: &PredictionTable, path: &Path) -> Result<()> {
    write_file(path, table.to_text().as_bytes())
}

/// Reads a `.cand` file: one id per line, blank lines ignored.
pub fn load_candidates(path: &Path) -> Result<Vec<ItemId>> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::List {
        what: format!("invalid UTF-8 at byte {}", e.valid_up_to()),
        line: 0,
    })?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let err = |what: String| Error::List { what, line: i + 1 };
        let id = ItemId::new(line).map_err(|e| err(e.to_string()))?;
        if !seen.insert(id.clone()) {
            return Err(err(format!("duplicate candidate id {id}")));
        }
        out.push(id);
    }
    Ok(out)
}

pub fn save_candidates(ids: &[ItemId], path: &Path) -> Result<()> {
    let mut out = String::new();
    for id in ids {
        out.push_str(id.as_str());
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}
