//! Resolves raw references from a tagged export against the export's own
//! records, producing a validated corpus.
//!
//! A reference resolves by exact DOI match when it carries a DOI that any
//! record declares; otherwise by (author key, year, source key) matching
//! exactly one record. Ambiguous matches and misses are counted, never
//! guessed. Always: resolved + unresolved + ambiguous = total.

use std::collections::{BTreeMap, BTreeSet};

use super::tagged::{CitedRef, TaggedRecord};
use super::{Corpus, CorpusError, PaperId, PaperRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResolutionReport {
    pub total_refs: usize,
    pub resolved: usize,
    pub unresolved: usize,
    pub ambiguous: usize,
    /// References that resolved to the citing record itself; counted under
    /// `resolved` but never materialized as an edge.
    pub self_citations_dropped: usize,
}

pub fn resolve_references(
    stubs: &[TaggedRecord],
) -> Result<(Corpus, ResolutionReport), CorpusError> {
    let mut by_doi: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut by_key: BTreeMap<(&str, i32, &str), Vec<usize>> = BTreeMap::new();
    for (pos, stub) in stubs.iter().enumerate() {
        if let Some(doi) = &stub.doi {
            by_doi.entry(doi).or_default().push(pos);
        }
        if let (Some(author), Some(source)) = (&stub.author_key, &stub.source_key) {
            by_key
                .entry((author, stub.year, source))
                .or_default()
                .push(pos);
        }
    }

    let mut report = ResolutionReport::default();
    let mut records = Vec::with_capacity(stubs.len());
    for (pos, stub) in stubs.iter().enumerate() {
        let mut refs: BTreeSet<PaperId> = BTreeSet::new();
        for cited in &stub.refs {
            report.total_refs += 1;
            let reference = match cited {
                CitedRef::Parsed(reference) => reference,
                CitedRef::Unparsed(_) => {
                    report.unresolved += 1;
                    continue;
                }
            };
            let doi_hits = reference
                .doi
                .as_deref()
                .and_then(|doi| by_doi.get(doi))
                .map(Vec::as_slice)
                .unwrap_or(&[]);
            let hits: &[usize] = if !doi_hits.is_empty() {
                doi_hits
            } else if let (Some(author), Some(year), Some(source)) = (
                reference.first_author_key.as_deref(),
                reference.year,
                reference.source_key.as_deref(),
            ) {
                by_key
                    .get(&(author, year, source))
                    .map(Vec::as_slice)
                    .unwrap_or(&[])
            } else {
                &[]
            };
            match hits {
                [] => report.unresolved += 1,
                &[target] => {
                    report.resolved += 1;
                    if target == pos {
                        report.self_citations_dropped += 1;
                    } else {
                        refs.insert(stubs[target].id.clone());
                    }
                }
                _ => report.ambiguous += 1,
            }
        }
        records.push(PaperRecord {
            id: stub.id.clone(),
            title: stub.title.clone(),
            year: stub.year,
            times_cited: stub.times_cited,
            refs,
            terms: stub.terms.clone(),
            institution: stub.institution.clone(),
            country: stub.country.clone(),
        });
    }
    let (corpus, dangling) = Corpus::from_records(records)?;
    debug_assert_eq!(dangling, 0, "resolution only targets in-corpus ids");
    debug_assert_eq!(
        report.resolved + report.unresolved + report.ambiguous,
        report.total_refs
    );
    Ok((corpus, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tagged::{parse_tagged_export, RawReference};

    fn stub(id: &str, author: &str, year: i32, source: &str, doi: Option<&str>) -> TaggedRecord {
        TaggedRecord {
            id: id.into(),
            title: format!("title {id}"),
            year,
            times_cited: 0,
            author_key: Some(author.to_owned()),
            source_key: Some(source.to_owned()),
            doi: doi.map(str::to_owned),
            institution: None,
            country: None,
            terms: BTreeSet::new(),
            refs: Vec::new(),
        }
    }

    fn by_triple(author: &str, year: i32, source: &str) -> CitedRef {
        CitedRef::Parsed(RawReference {
            first_author_key: Some(author.to_owned()),
            year: Some(year),
            source_key: Some(source.to_owned()),
            doi: None,
        })
    }

    fn by_doi(doi: &str) -> CitedRef {
        CitedRef::Parsed(RawReference {
            first_author_key: None,
            year: None,
            source_key: None,
            doi: Some(doi.to_owned()),
        })
    }

    #[test]
    fn doi_match_creates_an_edge() {
        let mut a = stub("a", "roe j", 1990, "acta", Some("10.1/x"));
        let b = stub("b", "doe j", 1995, "acta", Some("10.1/y"));
        a.refs.push(by_doi("10.1/y"));
        let (corpus, report) = resolve_references(&[a, b]).unwrap();
        assert_eq!(report.resolved, 1);
        assert!(corpus.get(&"a".into()).unwrap().refs.contains(&"b".into()));
    }

    #[test]
    fn triple_match_requires_uniqueness() {
        let mut citing = stub("a", "roe j", 1990, "acta", None);
        citing.refs.push(by_triple("doe j", 1995, "acta"));
        let twin1 = stub("b", "doe j", 1995, "acta", None);
        let twin2 = stub("c", "doe j", 1995, "acta", None);
        let (corpus, report) = resolve_references(&[citing, twin1, twin2]).unwrap();
        assert_eq!(report.ambiguous, 1);
        assert_eq!(report.resolved, 0);
        assert!(corpus.get(&"a".into()).unwrap().refs.is_empty());
    }

    #[test]
    fn mutual_citation_resolves_both_edges() {
        let mut a = stub("a", "roe j", 1990, "acta", None);
        let mut b = stub("b", "doe j", 1995, "acta", None);
        a.refs.push(by_triple("doe j", 1995, "acta"));
        b.refs.push(by_triple("roe j", 1990, "acta"));
        let (corpus, report) = resolve_references(&[a, b]).unwrap();
        assert_eq!(report.resolved, 2);
        assert!(corpus.get(&"a".into()).unwrap().refs.contains(&"b".into()));
        assert!(corpus.get(&"b".into()).unwrap().refs.contains(&"a".into()));
    }

    #[test]
    fn self_citation_is_dropped_but_counted_resolved() {
        let mut a = stub("a", "roe j", 1990, "acta", Some("10.1/x"));
        a.refs.push(by_doi("10.1/x"));
        let (corpus, report) = resolve_references(&[a]).unwrap();
        assert_eq!(report.resolved, 1);
        assert_eq!(report.self_citations_dropped, 1);
        assert!(corpus.get(&"a".into()).unwrap().refs.is_empty());
    }

    #[test]
    fn counts_partition_the_total() {
        let mut a = stub("a", "roe j", 1990, "acta", None);
        a.refs.push(by_triple("doe j", 1995, "acta")); // ambiguous
        a.refs.push(by_triple("ghost g", 1980, "nowhere")); // unresolved
        a.refs.push(CitedRef::Unparsed("???".into())); // unresolved
        a.refs.push(by_triple("roe j", 1991, "acta")); // resolved -> b
        let b = stub("b", "roe j", 1991, "acta", None);
        let twin1 = stub("c", "doe j", 1995, "acta", None);
        let twin2 = stub("d", "doe j", 1995, "acta", None);
        let (_, report) = resolve_references(&[a, b, twin1, twin2]).unwrap();
        assert_eq!(report.total_refs, 4);
        assert_eq!(report.resolved, 1);
        assert_eq!(report.unresolved, 2);
        assert_eq!(report.ambiguous, 1);
        assert_eq!(
            report.resolved + report.unresolved + report.ambiguous,
            report.total_refs
        );
    }

    #[test]
    fn export_to_corpus_end_to_end() {
        let input = concat!(
            "AU Roe, J\n",
            "TI first\n",
            "SO ACTA\n",
            "PY 1990\n",
            "ER\n",
            "AU Doe, J\n",
            "TI second\n",
            "SO ACTA\n",
            "PY 1995\n",
            "CR ROE J, 1990, ACTA, V1, P1\n",
            "ER\n",
        );
        let (stubs, warnings) = parse_tagged_export(input);
        assert!(warnings.is_empty(), "{warnings:?}");
        let (corpus, report) = resolve_references(&stubs).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(report.resolved, 1);
        let second = corpus.get(&"W0002".into()).unwrap();
        assert_eq!(second.refs, BTreeSet::from(["W0001".into()]));
    }
}
