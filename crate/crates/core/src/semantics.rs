//! Cluster semantics: clinical-terms rates, research-stage labels, term and
//! institution distributions, and temporal averages.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{PaperId, PaperRecord, TermId, VocabError, VocabularyTree};

/// Placeholder institution for records without a correspondence address.
pub const NO_INFORMATION: &str = "No information";

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("paper {0} has no terms countable toward a clinical rate")]
    NoCountableTerms(PaperId),
    #[error("no cluster member has countable terms")]
    AllMembersExcluded,
    #[error("rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("thresholds must satisfy 0 <= basic < translational <= 1, got {basic} and {translational}")]
    BadThresholds { basic: f64, translational: f64 },
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

/// How the rate denominator treats terms absent from the vocabulary:
/// `All` counts them as non-clinical, `KnownOnly` drops them entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermCounting {
    #[default]
    All,
    KnownOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Basic,
    Translational,
    Clinical,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Basic => "basic",
            Stage::Translational => "translational",
            Stage::Clinical => "clinical",
        })
    }
}

/// Rate cutoffs: below `basic_upper` is basic, below `translational_upper`
/// is translational, the rest is clinical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageThresholds {
    pub basic_upper: f64,
    pub translational_upper: f64,
}

impl Default for StageThresholds {
    fn default() -> Self {
        StageThresholds {
            basic_upper: 0.15,
            translational_upper: 0.33,
        }
    }
}

impl StageThresholds {
    pub fn validate(&self) -> Result<(), SemanticsError> {
        let ordered = 0.0 <= self.basic_upper
            && self.basic_upper < self.translational_upper
            && self.translational_upper <= 1.0;
        if ordered {
            Ok(())
        } else {
            Err(SemanticsError::BadThresholds {
                basic: self.basic_upper,
                translational: self.translational_upper,
            })
        }
    }
}

pub fn stage_label(rate: f64, thresholds: &StageThresholds) -> Result<Stage, SemanticsError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(SemanticsError::RateOutOfRange(rate));
    }
    Ok(if rate < thresholds.basic_upper {
        Stage::Basic
    } else if rate < thresholds.translational_upper {
        Stage::Translational
    } else {
        Stage::Clinical
    })
}

/// Fraction of the paper's terms that are clinical.
pub fn clinical_rate(
    record: &PaperRecord,
    vocab: &VocabularyTree,
    counting: TermCounting,
) -> Result<f64, SemanticsError> {
    let mut known = 0usize;
    let mut clinical = 0usize;
    for term in &record.terms {
        if !vocab.contains(term) {
            continue;
        }
        known += 1;
        if vocab.is_clinical(term)? {
            clinical += 1;
        }
    }
    let denominator = match counting {
        TermCounting::All => record.terms.len(),
        TermCounting::KnownOnly => known,
    };
    if denominator == 0 {
        return Err(SemanticsError::NoCountableTerms(record.id.clone()));
    }
    Ok(clinical as f64 / denominator as f64)
}

/// Unweighted mean of member rates; members without countable terms are
/// excluded and counted in the second component.
pub fn cluster_clinical_rate(
    members: &[&PaperRecord],
    vocab: &VocabularyTree,
    counting: TermCounting,
) -> Result<(f64, usize), SemanticsError> {
    let mut sum = 0.0;
    let mut counted = 0usize;
    for member in members {
        match clinical_rate(member, vocab, counting) {
            Ok(rate) => {
                sum += rate;
                counted += 1;
            }
            Err(SemanticsError::NoCountableTerms(_)) => {}
            Err(other) => return Err(other),
        }
    }
    if counted == 0 {
        return Err(SemanticsError::AllMembersExcluded);
    }
    Ok((sum / counted as f64, members.len() - counted))
}

/// Terms ranked by the number of member papers carrying them, descending,
/// ties by term id; truncated to `k`.
pub fn term_distribution(members: &[&PaperRecord], k: usize) -> Vec<(TermId, usize)> {
    let mut counts: BTreeMap<&TermId, usize> = BTreeMap::new();
    for member in members {
        for term in &member.terms {
            *counts.entry(term).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(TermId, usize)> =
        counts.into_iter().map(|(t, c)| (t.clone(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

pub fn avg_year(members: &[&PaperRecord]) -> Result<f64, SemanticsError> {
    if members.is_empty() {
        return Err(SemanticsError::EmptyCluster);
    }
    let sum: i64 = members.iter().map(|m| i64::from(m.year)).sum();
    Ok(sum as f64 / members.len() as f64)
}

pub fn year_range(members: &[&PaperRecord]) -> Result<(i32, i32), SemanticsError> {
    let years = members.iter().map(|m| m.year);
    match (years.clone().min(), years.max()) {
        (Some(min), Some(max)) => Ok((min, max)),
        _ => Err(SemanticsError::EmptyCluster),
    }
}

/// Correspondence institutions ranked by paper count, descending, ties by
/// name; missing institutions pool under [`NO_INFORMATION`]. Truncated to `k`.
pub fn institution_tally(members: &[&PaperRecord], k: usize) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for member in members {
        let name = member.institution.as_deref().unwrap_or(NO_INFORMATION);
        *counts.entry(name).or_insert(0) += 1;
    }
    let mut ranked: Vec<(String, usize)> =
        counts.into_iter().map(|(n, c)| (n.to_owned(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

/// Per-cluster descriptive statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterProfile {
    pub cluster: u32,
    pub size: usize,
    pub avg_year: f64,
    pub year_range: (i32, i32),
    pub clinical_rate: f64,
    pub stage: Stage,
    /// Members excluded from the rate mean for lack of countable terms.
    pub rate_excluded: usize,
    pub top_terms: Vec<(TermId, usize)>,
    pub top_institutions: Vec<(String, usize)>,
}

pub fn build_profile(
    cluster: u32,
    members: &[&PaperRecord],
    vocab: &VocabularyTree,
    thresholds: &StageThresholds,
    counting: TermCounting,
    top_k: usize,
) -> Result<ClusterProfile, SemanticsError> {
    if members.is_empty() {
        return Err(SemanticsError::EmptyCluster);
    }
    let (rate, rate_excluded) = cluster_clinical_rate(members, vocab, counting)?;
    Ok(ClusterProfile {
        cluster,
        size: members.len(),
        avg_year: avg_year(members)?,
        year_range: year_range(members)?,
        clinical_rate: rate,
        stage: stage_label(rate, thresholds)?,
        rate_excluded,
        top_terms: term_distribution(members, top_k),
        top_institutions: institution_tally(members, top_k),
    })
}
