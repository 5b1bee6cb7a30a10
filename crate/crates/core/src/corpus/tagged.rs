//! Tagged-field bibliographic export parser.
//!
//! Records are sequences of `XX value` lines where `XX` is a two-letter tag
//! in the first two columns; indented lines continue the previous tag and
//! `ER` terminates a record. Recognized tags:
//!
//! * `TI` title (continuations append), `PY` year, `TC` times cited
//! * `CR` one cited reference per line, `Author, Year, Source, ..., DOI d`
//! * `RP` correspondence address (institution and country are taken from it)
//! * `AU` authors (only the first is kept, as the matching key)
//! * `SO` source title, `DI` DOI, `DE` term ids separated by `;`
//!
//! Anything else is ignored, including its continuation lines. Records
//! missing `TI` or `PY` are skipped with a warning; a `CR` line that yields
//! neither a DOI nor an author+year pair is kept as unresolvable.

use std::collections::BTreeSet;

use super::{PaperId, TermId};

/// Matching keys extracted from one `CR` line.
///
/// Holds at least a DOI or an author key plus year; anything weaker is kept
/// as [`CitedRef::Unparsed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawReference {
    pub first_author_key: Option<String>,
    pub year: Option<i32>,
    pub source_key: Option<String>,
    pub doi: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CitedRef {
    Parsed(RawReference),
    Unparsed(String),
}

/// One parsed record plus its raw reference list, before resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedRecord {
    pub id: PaperId,
    pub title: String,
    pub year: i32,
    pub times_cited: u32,
    pub author_key: Option<String>,
    pub source_key: Option<String>,
    pub doi: Option<String>,
    pub institution: Option<String>,
    pub country: Option<String>,
    pub terms: BTreeSet<TermId>,
    pub refs: Vec<CitedRef>,
}

#[derive(Default)]
struct Draft {
    title: String,
    year: Option<i32>,
    times_cited: u32,
    author_raw: Option<String>,
    source_raw: Option<String>,
    doi: Option<String>,
    rp_raw: Option<String>,
    terms: BTreeSet<TermId>,
    refs: Vec<CitedRef>,
    started: bool,
    first_line: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Tag {
    Ti,
    Py,
    Tc,
    Cr,
    Rp,
    Au,
    So,
    Di,
    De,
    Other,
}

pub fn parse_tagged_export(input: &str) -> (Vec<TaggedRecord>, Vec<String>) {
    let mut warnings = Vec::new();
    let mut finished: Vec<(Draft, usize)> = Vec::new();
    let mut draft = Draft::default();
    let mut last_tag = Tag::Other;
    let mut saw_content = false;

    for (number, line) in input.lines().enumerate() {
        let number = number + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some((tag, value)) = split_tag(line) {
            saw_content = true;
            if !draft.started {
                draft.first_line = number;
            }
            draft.started = true;
            if tag == "ER" {
                let done = std::mem::take(&mut draft);
                finished.push((done, number));
                last_tag = Tag::Other;
                continue;
            }
            last_tag = apply_tag(&mut draft, tag, value, number, &mut warnings);
        } else if line.starts_with(char::is_whitespace) && draft.started {
            continue_tag(&mut draft, last_tag, line.trim(), number, &mut warnings);
        }
        // Non-tag, non-indented lines (file headers and the like) are skipped.
    }

    if draft.started {
        warnings.push(format!(
            "record starting at line {} is not terminated by ER; discarded",
            draft.first_line
        ));
    }

    let mut records = Vec::new();
    let width = finished.len().to_string().len().max(4);
    for (draft, end_line) in finished {
        if draft.title.is_empty() || draft.year.is_none() {
            warnings.push(format!(
                "record ending at line {end_line} skipped: missing TI or PY"
            ));
            continue;
        }
        let id = PaperId::new(format!("W{:0width$}", records.len() + 1, width = width));
        let (institution, country) = match draft.rp_raw {
            Some(raw) => parse_address(&raw),
            None => (None, None),
        };
        records.push(TaggedRecord {
            id,
            title: draft.title,
            year: draft.year.expect("checked above"),
            times_cited: draft.times_cited,
            author_key: draft.author_raw.as_deref().and_then(author_key),
            source_key: draft.source_raw.as_deref().and_then(source_key),
            doi: draft.doi,
            institution,
            country,
            terms: draft.terms,
            refs: draft.refs,
        });
    }
    if records.is_empty() && saw_content {
        warnings.push("no complete record found (no ER-terminated record with TI and PY)".into());
    }
    (records, warnings)
}

fn split_tag(line: &str) -> Option<(&str, &str)> {
    let bytes = line.as_bytes();
    if bytes.len() < 2 || !bytes[..2].iter().all(u8::is_ascii_uppercase) {
        return None;
    }
    match bytes.get(2) {
        None => Some((&line[..2], "")),
        Some(b' ') => Some((&line[..2], line[3..].trim())),
        _ => None,
    }
}

fn apply_tag(
    draft: &mut Draft,
    tag: &str,
    value: &str,
    line: usize,
    warnings: &mut Vec<String>,
) -> Tag {
    match tag {
        "TI" => {
            draft.title = value.to_owned();
            Tag::Ti
        }
        "PY" => {
            match value.parse::<i32>() {
                Ok(year) => draft.year = Some(year),
                Err(_) => warnings.push(format!("line {line}: unparseable PY '{value}'")),
            }
            Tag::Py
        }
        "TC" => {
            match value.parse::<u32>() {
                Ok(count) => draft.times_cited = count,
                Err(_) => warnings.push(format!("line {line}: unparseable TC '{value}'")),
            }
            Tag::Tc
        }
        "CR" => {
            push_reference(draft, value, line, warnings);
            Tag::Cr
        }
        "RP" => {
            draft.rp_raw = Some(value.to_owned());
            Tag::Rp
        }
        "AU" => {
            if draft.author_raw.is_none() {
                draft.author_raw = Some(value.to_owned());
            }
            Tag::Au
        }
        "SO" => {
            draft.source_raw = Some(value.to_owned());
            Tag::So
        }
        "DI" => {
            draft.doi = Some(value.to_lowercase());
            Tag::Di
        }
        "DE" => {
            extend_terms(&mut draft.terms, value);
            Tag::De
        }
        _ => Tag::Other,
    }
}

fn continue_tag(
    draft: &mut Draft,
    last_tag: Tag,
    value: &str,
    line: usize,
    warnings: &mut Vec<String>,
) {
    match last_tag {
        // Each CR continuation line is a further reference.
        Tag::Cr => push_reference(draft, value, line, warnings),
        Tag::Ti => {
            if !draft.title.is_empty() {
                draft.title.push(' ');
            }
            draft.title.push_str(value);
        }
        Tag::Rp => {
            if let Some(rp) = &mut draft.rp_raw {
                rp.push(' ');
                rp.push_str(value);
            }
        }
        Tag::So => {
            if let Some(source) = &mut draft.source_raw {
                source.push(' ');
                source.push_str(value);
            }
        }
        Tag::De => extend_terms(&mut draft.terms, value),
        // Further AU lines are co-authors; only the first author keys a record.
        Tag::Au | Tag::Py | Tag::Tc | Tag::Di | Tag::Other => {}
    }
}

fn extend_terms(terms: &mut BTreeSet<TermId>, value: &str) {
    terms.extend(
        value
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(TermId::from),
    );
}

fn push_reference(draft: &mut Draft, value: &str, line: usize, warnings: &mut Vec<String>) {
    match parse_reference(value) {
        Some(reference) => draft.refs.push(CitedRef::Parsed(reference)),
        None => {
            warnings.push(format!(
                "line {line}: reference '{value}' has neither DOI nor author+year; kept as unresolved"
            ));
            draft.refs.push(CitedRef::Unparsed(value.to_owned()));
        }
    }
}

/// Splits `Author, Year, Source, ..., DOI d` on commas. Returns `None` when
/// the line provides neither a DOI nor an author plus year.
pub fn parse_reference(value: &str) -> Option<RawReference> {
    let fields: Vec<&str> = value.split(',').map(str::trim).collect();
    let first_author_key = fields.first().copied().and_then(author_key);
    let year = fields.get(1).and_then(|f| f.parse::<i32>().ok());
    let source_key = fields.get(2).copied().and_then(source_key);
    let mut doi = None;
    for field in &fields {
        let lower = field.to_lowercase();
        if let Some(rest) = lower.strip_prefix("doi ") {
            doi = Some(rest.trim_end_matches(['.', ';']).trim().to_owned());
        } else if doi.is_none() && lower.starts_with("10.") && lower.contains('/') {
            doi = Some(lower.trim_end_matches(['.', ';']).trim().to_owned());
        }
    }
    if doi.is_some() || (first_author_key.is_some() && year.is_some()) {
        Some(RawReference {
            first_author_key,
            year,
            source_key,
            doi,
        })
    } else {
        None
    }
}

/// Normalized author matching key: lowercase, diacritics folded, punctuation
/// stripped, reduced to surname plus first initial.
pub fn author_key(raw: &str) -> Option<String> {
    let folded = fold_text(raw);
    let mut tokens = folded.split_whitespace();
    let surname = tokens.next()?;
    let mut key = surname.to_owned();
    if let Some(second) = tokens.next() {
        let initial = second.chars().next().expect("token is non-empty");
        key.push(' ');
        key.push(initial);
    }
    Some(key)
}

/// Normalized source matching key: lowercase, diacritics folded, punctuation
/// stripped, single-spaced.
pub fn source_key(raw: &str) -> Option<String> {
    let folded = fold_text(raw);
    let key = folded.split_whitespace().collect::<Vec<_>>().join(" ");
    (!key.is_empty()).then_some(key)
}

/// Lowercases, folds Latin diacritics to ASCII, and replaces everything
/// non-alphanumeric with spaces.
fn fold_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        for lower in c.to_lowercase() {
            fold_char(lower, &mut out);
        }
    }
    out
}

fn fold_char(c: char, out: &mut String) {
    let folded: &str = match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' | 'ā' | 'ă' | 'ą' => "a",
        'ç' | 'ć' | 'č' | 'ĉ' => "c",
        'ď' | 'đ' => "d",
        'è' | 'é' | 'ê' | 'ë' | 'ē' | 'ė' | 'ę' | 'ě' => "e",
        'ì' | 'í' | 'î' | 'ï' | 'ī' | 'į' => "i",
        'ľ' | 'ł' => "l",
        'ñ' | 'ń' | 'ň' => "n",
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' | 'ō' => "o",
        'ŕ' | 'ř' => "r",
        'ś' | 'š' | 'ş' => "s",
        'ť' | 'ţ' => "t",
        'ù' | 'ú' | 'û' | 'ü' | 'ū' | 'ů' => "u",
        'ý' | 'ÿ' => "y",
        'ź' | 'ż' | 'ž' => "z",
        'ß' => "ss",
        'æ' => "ae",
        'œ' => "oe",
        _ => {
            if c.is_alphanumeric() {
                out.push(c);
            } else {
                out.push(' ');
            }
            return;
        }
    };
    out.push_str(folded);
}

/// Institution and country from a correspondence address such as
/// `Name, X (corresponding author), Some Institute, Street 1, City, Country.`
fn parse_address(raw: &str) -> (Option<String>, Option<String>) {
    let segments: Vec<&str> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if segments.is_empty() {
        return (None, None);
    }
    let institution = match segments.iter().position(|s| s.contains(')')) {
        Some(pos) if pos + 1 < segments.len() => Some(segments[pos + 1].to_owned()),
        Some(_) => None,
        None => Some(segments[0].to_owned()),
    };
    let country = if segments.len() >= 2 {
        let last = segments.last().expect("checked non-empty").trim_end_matches('.').trim();
        if last.split_whitespace().last() == Some("USA") {
            Some("USA".to_owned())
        } else {
            (!last.is_empty()).then(|| last.to_owned())
        }
    } else {
        None
    };
    (institution, country)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RECORD: &str = concat!(
        "AU Moreau, J-L\n",
        "   Petit, A\n",
        "TI Long-circulating carriers for\n",
        "   sustained delivery\n",
        "SO J SYNTH CARRIERS\n",
        "DI 10.1000/JSC.1\n",
        "DE agent-x; carrier-v\n",
        "PY 1995\n",
        "TC 210\n",
        "RP Moreau, J-L (corresponding author), Riverside Inst, 4 Quay St, Lyon, France.\n",
        "CR SMITH A, 1990, J SYNTH CARRIERS, V12, P44\n",
        "   PETIT A, 1991, ANN DELIVERY, V3, P9, DOI 10.1000/AD.9\n",
        "ER\n",
    );

    #[test]
    fn one_record_with_two_references() {
        let (records, warnings) = parse_tagged_export(RECORD);
        assert_eq!(records.len(), 1);
        assert!(warnings.is_empty(), "{warnings:?}");
        let record = &records[0];
        assert_eq!(record.id.as_str(), "W0001");
        assert_eq!(record.title, "Long-circulating carriers for sustained delivery");
        assert_eq!(record.year, 1995);
        assert_eq!(record.times_cited, 210);
        assert_eq!(record.author_key.as_deref(), Some("moreau j"));
        assert_eq!(record.source_key.as_deref(), Some("j synth carriers"));
        assert_eq!(record.doi.as_deref(), Some("10.1000/jsc.1"));
        assert_eq!(record.institution.as_deref(), Some("Riverside Inst"));
        assert_eq!(record.country.as_deref(), Some("France"));
        assert_eq!(record.terms.len(), 2);
        assert_eq!(record.refs.len(), 2);
    }

    #[test]
    fn doi_is_extracted_from_a_reference() {
        let (records, _) = parse_tagged_export(RECORD);
        let CitedRef::Parsed(reference) = &records[0].refs[1] else {
            panic!("reference should parse");
        };
        assert_eq!(reference.doi.as_deref(), Some("10.1000/ad.9"));
        assert_eq!(reference.first_author_key.as_deref(), Some("petit a"));
        assert_eq!(reference.year, Some(1991));
        assert_eq!(reference.source_key.as_deref(), Some("ann delivery"));
    }

    #[test]
    fn input_without_er_yields_nothing_and_warns() {
        let (records, warnings) = parse_tagged_export("TI orphan\nPY 2000\n");
        assert!(records.is_empty());
        assert!(!warnings.is_empty());
    }

    #[test]
    fn record_missing_py_is_skipped_with_warning() {
        let input = "TI no year here\nER\nTI fine\nPY 2001\nER\n";
        let (records, warnings) = parse_tagged_export(input);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].title, "fine");
        assert!(warnings.iter().any(|w| w.contains("missing TI or PY")), "{warnings:?}");
    }

    #[test]
    fn unparseable_reference_is_kept_as_unresolved() {
        let input = "TI t\nPY 2001\nCR ANON\nER\n";
        let (records, warnings) = parse_tagged_export(input);
        assert_eq!(records[0].refs, vec![CitedRef::Unparsed("ANON".into())]);
        assert!(warnings.iter().any(|w| w.contains("unresolved")), "{warnings:?}");
    }

    #[test]
    fn unknown_tags_and_their_continuations_are_ignored(){
        let input = concat!(
            "FN Some Index\n",
            "VR 1.0\n",
            "TI t\n",
            "AB An abstract that\n",
            "   wraps over lines.\n",
            "PY 1999\n",
            "ER\n",
        );
        let (records, warnings) = parse_tagged_export(input);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].title, "t");
        assert!(warnings.is_empty(), "{warnings:?}");
    }

    #[test]
    fn reference_with_author_and_year_but_no_doi_parses() {
        let reference = parse_reference("GABIZON A, 1994, CANCER RES, V54, P987").unwrap();
        assert_eq!(reference.first_author_key.as_deref(), Some("gabizon a"));
        assert_eq!(reference.year, Some(1994));
        assert_eq!(reference.source_key.as_deref(), Some("cancer res"));
        assert_eq!(reference.doi, None);
    }

    #[test]
    fn bare_doi_field_is_recognized() {
        let reference = parse_reference("ANON, in press, 10.5555/XY.2").unwrap();
        assert_eq!(reference.doi.as_deref(), Some("10.5555/xy.2"));
    }

    #[test]
    fn author_keys_fold_diacritics_and_punctuation() {
        assert_eq!(author_key("Gabizon, A.").as_deref(), Some("gabizon a"));
        assert_eq!(author_key("MÜLLER-SMITH, Ärzte").as_deref(), Some("muller s"));
        assert_eq!(author_key("  "), None);
        assert_eq!(author_key("IUPAC").as_deref(), Some("iupac"));
    }

    #[test]
    fn trailing_us_address_collapses_to_usa() {
        let (_, country) = parse_address("Roe, J (corresponding author), Bay Lab, Boston, MA 02115 USA.");
        assert_eq!(country.as_deref(), Some("USA"));
    }

    #[test]
    fn ids_are_sequential_in_input_order() {
        let input = "TI a\nPY 2000\nER\nTI b\nPY 2001\nER\n";
        let (records, _) = parse_tagged_export(input);
        let ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["W0001", "W0002"]);
    }
}
