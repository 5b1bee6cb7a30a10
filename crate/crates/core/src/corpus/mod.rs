//! Corpus ingestion: native line-record parsing, tagged-export parsing,
//! reference resolution, and controlled-vocabulary loading.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod native;
pub mod resolve;
pub mod tagged;
pub mod vocab;

pub use resolve::{resolve_references, ResolutionReport};
pub use tagged::{parse_tagged_export, CitedRef, RawReference, TaggedRecord};
pub use vocab::{load_vocabulary, VocabError, VocabularyTree};

pub const YEAR_MIN: i32 = 1800;
pub const YEAR_MAX: i32 = 2100;

/// Opaque identifier of a paper, unique within a corpus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaperId(String);

impl PaperId {
    pub fn new(id: impl Into<String>) -> Self {
        PaperId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PaperId {
    fn from(s: &str) -> Self {
        PaperId(s.to_owned())
    }
}

/// Identifier of a controlled-vocabulary term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermId(String);

impl TermId {
    pub fn new(id: impl Into<String>) -> Self {
        TermId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TermId {
    fn from(s: &str) -> Self {
        TermId(s.to_owned())
    }
}

/// One bibliographic item.
///
/// `times_cited` is the citation count reported by the source index (self
/// citations assumed already excluded on the index side), independent of the
/// in-corpus reference lists. `institution` and `country` describe the
/// correspondence address when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperRecord {
    pub id: PaperId,
    pub title: String,
    pub year: i32,
    pub times_cited: u32,
    pub refs: BTreeSet<PaperId>,
    pub terms: BTreeSet<TermId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
}

/// Violation of a per-record invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("year {0} is outside the supported range {YEAR_MIN}..={YEAR_MAX}")]
    YearOutOfRange(i32),
    #[error("refs contain the record's own id")]
    SelfCitation,
}

/// Violation of a corpus-level invariant.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate paper id {0}")]
    DuplicateId(PaperId),
    #[error("paper {id}: {source}")]
    InvalidRecord { id: PaperId, source: RecordError },
}

pub fn validate_record(record: &PaperRecord) -> Result<(), RecordError> {
    if !(YEAR_MIN..=YEAR_MAX).contains(&record.year) {
        return Err(RecordError::YearOutOfRange(record.year));
    }
    if record.refs.contains(&record.id) {
        return Err(RecordError::SelfCitation);
    }
    Ok(())
}

/// A validated set of paper records.
///
/// Invariants: ids are unique, every record passes [`validate_record`], and
/// every reference targets an id present in the corpus (dangling references
/// are dropped at construction). Record order is preserved from the input.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    records: Vec<PaperRecord>,
    index: BTreeMap<PaperId, usize>,
}

impl Corpus {
    /// Builds a corpus, dropping dangling references.
    ///
    /// Returns the corpus together with the number of dropped references.
    pub fn from_records(records: Vec<PaperRecord>) -> Result<(Corpus, usize), CorpusError> {
        let mut index = BTreeMap::new();
        for (pos, record) in records.iter().enumerate() {
            validate_record(record).map_err(|source| CorpusError::InvalidRecord {
                id: record.id.clone(),
                source,
            })?;
            if index.insert(record.id.clone(), pos).is_some() {
                return Err(CorpusError::DuplicateId(record.id.clone()));
            }
        }
        let mut records = records;
        let mut dangling = 0usize;
        for record in &mut records {
            let before = record.refs.len();
            record.refs.retain(|r| index.contains_key(r));
            dangling += before - record.refs.len();
        }
        Ok((Corpus { records, index }, dangling))
    }

    /// Sub-corpus restricted to `keep`, preserving the current record order.
    /// References are re-restricted to the surviving ids.
    pub fn subset(&self, keep: &BTreeSet<PaperId>) -> Corpus {
        let ids: Vec<PaperId> = self
            .records
            .iter()
            .filter(|r| keep.contains(&r.id))
            .map(|r| r.id.clone())
            .collect();
        self.subset_in_order(&ids)
    }

    /// Sub-corpus with records in the given order; ids absent from the corpus
    /// are skipped. References are re-restricted to the surviving ids.
    pub fn subset_in_order(&self, ids: &[PaperId]) -> Corpus {
        let keep: BTreeSet<&PaperId> = ids.iter().filter(|id| self.index.contains_key(id)).collect();
        let mut records = Vec::with_capacity(keep.len());
        let mut index = BTreeMap::new();
        for id in ids {
            let Some(&pos) = self.index.get(id) else {
                continue;
            };
            if index.contains_key(id) {
                continue;
            }
            let mut record = self.records[pos].clone();
            record.refs.retain(|r| keep.contains(r));
            index.insert(record.id.clone(), records.len());
            records.push(record);
        }
        Corpus { records, index }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[PaperRecord] {
        &self.records
    }

    pub fn get(&self, id: &PaperId) -> Option<&PaperRecord> {
        self.index.get(id).map(|&pos| &self.records[pos])
    }

    pub fn contains(&self, id: &PaperId) -> bool {
        self.index.contains_key(id)
    }

    /// Ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = &PaperId> {
        self.index.keys()
    }

    /// Sum of index-reported citation counts over the whole corpus.
    pub fn total_citations(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.times_cited)).sum()
    }
}
