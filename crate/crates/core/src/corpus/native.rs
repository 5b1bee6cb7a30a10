//! Native corpus format: one JSON object per line, UTF-8.
//!
//! Required keys: `id`, `title`, `year`, `times_cited`, `refs`, `terms`;
//! optional: `institution`, `country`. Blank lines are ignored. Parsing is
//! strict: unknown keys, duplicate ids, out-of-range years, and self
//! citations are rejected with the offending line number.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;

use super::{validate_record, Corpus, CorpusError, PaperId, PaperRecord};

/// Counters produced while loading a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseReport {
    pub records: usize,
    /// References to ids absent from the corpus, dropped at load.
    pub dangling_refs: usize,
}

#[derive(Debug, Error)]
pub enum NativeError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate paper id {id}")]
    DuplicateId { line: usize, id: PaperId },
    #[error("line {line}: paper {id}: {source}")]
    InvalidRecord {
        line: usize,
        id: PaperId,
        source: super::RecordError,
    },
}

pub fn parse_corpus<R: BufRead>(reader: R) -> Result<(Corpus, ParseReport), NativeError> {
    let mut records = Vec::new();
    let mut line_of: BTreeMap<PaperId, usize> = BTreeMap::new();
    for (number, line) in reader.lines().enumerate() {
        let number = number + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PaperRecord =
            serde_json::from_str(&line).map_err(|e| NativeError::Malformed {
                line: number,
                message: e.to_string(),
            })?;
        if let Some(&first) = line_of.get(&record.id) {
            let _ = first;
            return Err(NativeError::DuplicateId {
                line: number,
                id: record.id,
            });
        }
        validate_record(&record).map_err(|source| NativeError::InvalidRecord {
            line: number,
            id: record.id.clone(),
            source,
        })?;
        line_of.insert(record.id.clone(), number);
        records.push(record);
    }
    // Both error branches are unreachable: validated above, line by line.
    let (corpus, dangling_refs) = Corpus::from_records(records).map_err(|e| {
        let (id, source) = match e {
            CorpusError::DuplicateId(id) => (id, None),
            CorpusError::InvalidRecord { id, source } => (id, Some(source)),
        };
        let line = line_of.get(&id).copied().unwrap_or(0);
        match source {
            Some(source) => NativeError::InvalidRecord { line, id, source },
            None => NativeError::DuplicateId { line, id },
        }
    })?;
    let report = ParseReport {
        records: corpus.len(),
        dangling_refs,
    };
    Ok((corpus, report))
}

pub fn parse_corpus_str(input: &str) -> Result<(Corpus, ParseReport), NativeError> {
    parse_corpus(input.as_bytes())
}

pub fn load_corpus_file(path: &Path) -> Result<(Corpus, ParseReport), NativeError> {
    let file = std::fs::File::open(path)?;
    parse_corpus(io::BufReader::new(file))
}

/// Writes one compact JSON object per line, in corpus record order.
/// Output is byte-stable for a given corpus value.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<()> {
    for record in corpus.records() {
        let line = serde_json::to_string(record).expect("record serialization cannot fail");
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn corpus_to_string(corpus: &Corpus) -> String {
    let mut buffer = Vec::new();
    write_corpus(corpus, &mut buffer).expect("writing to a Vec cannot fail");
    String::from_utf8(buffer).expect("serialized records are UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, year: i32, refs: &[&str]) -> String {
        let refs = refs
            .iter()
            .map(|r| format!("\"{r}\""))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{{\"id\":\"{id}\",\"title\":\"t\",\"year\":{year},\"times_cited\":3,\"refs\":[{refs}],\"terms\":[\"x\"]}}"
        )
    }

    #[test]
    fn dangling_reference_is_reported() {
        let input = [
            line("a", 2001, &["b"]),
            line("b", 2000, &["ghost"]),
            line("c", 1999, &[]),
        ]
        .join("\n");
        let (corpus, report) = parse_corpus_str(&input).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(report.dangling_refs, 1);
        assert!(corpus.get(&"b".into()).unwrap().refs.is_empty());
    }

    #[test]
    fn empty_input_is_an_empty_corpus() {
        let (corpus, report) = parse_corpus_str("").unwrap();
        assert!(corpus.is_empty());
        assert_eq!(report, ParseReport::default());
    }

    #[test]
    fn year_error_names_the_field_and_line() {
        let input = [line("a", 2001, &[]), line("b", 1799, &[])].join("\n");
        let err = parse_corpus_str(&input).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("line 2"), "{message}");
        assert!(message.contains("year"), "{message}");
    }

    #[test]
    fn missing_field_error_names_the_field() {
        let err = parse_corpus_str("{\"id\":\"a\",\"title\":\"t\"}").unwrap_err();
        let message = err.to_string();
        assert!(message.contains("line 1"), "{message}");
        assert!(message.contains("year") || message.contains("missing field"), "{message}");
    }

    #[test]
    fn duplicate_id_error_carries_the_line() {
        let input = [line("a", 2001, &[]), line("a", 2002, &[])].join("\n");
        let err = parse_corpus_str(&input).unwrap_err();
        assert!(matches!(err, NativeError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn blank_lines_are_skipped_but_counted_for_numbering() {
        let input = format!("\n\n{}", line("x", 1920, &[]));
        let (corpus, _) = parse_corpus_str(&input).unwrap();
        assert_eq!(corpus.len(), 1);
        let bad = format!("\n{}", line("y", 1700, &[]));
        let err = parse_corpus_str(&bad).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn round_trip_preserves_the_corpus() {
        let input = [line("a", 2001, &["b"]), line("b", 2000, &[])].join("\n");
        let (corpus, _) = parse_corpus_str(&input).unwrap();
        let text = corpus_to_string(&corpus);
        let (reparsed, report) = parse_corpus_str(&text).unwrap();
        assert_eq!(corpus, reparsed);
        assert_eq!(report.dangling_refs, 0);
        // A second serialization is byte-identical.
        assert_eq!(text, corpus_to_string(&reparsed));
    }
}
