//! Run report: a stable-ordered, diffable account of one pipeline run.

use serde::{Deserialize, Serialize};

use crate::semantics::Stage;

/// Rounds to 4 decimal places, used for rates and coverage figures.
pub fn round4(value: f64) -> f64 {
    (value * 10_000.0).round() / 10_000.0
}

/// Rounds to 1 decimal place, used for average years.
pub fn round1(value: f64) -> f64 {
    (value * 10.0).round() / 10.0
}

/// Rounds to 6 decimal places, used for modularity and degree scores.
pub fn round6(value: f64) -> f64 {
    (value * 1_000_000.0).round() / 1_000_000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub version: String,
    pub config: ConfigEcho,
    pub corpus: CorpusStats,
    pub component: ComponentStats,
    pub filter: FilterStats,
    pub clustering: ClusteringStats,
    pub metagraph: MetaGraphStats,
    pub clusters: Vec<ClusterReport>,
    pub warnings: Vec<String>,
}

impl PipelineReport {
    /// Pretty JSON with declared key order and a trailing newline;
    /// byte-identical for identical reports.
    pub fn to_json_string(&self) -> Result<String, serde_json::Error> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tagged_export_path: Option<String>,
    pub vocab_path: String,
    pub fraction: f64,
    pub required_terms: Vec<String>,
    pub method: String,
    pub seed: u64,
    pub basic_upper: f64,
    pub translational_upper: f64,
    pub top_k: usize,
    pub include_ties: bool,
    pub strict_terms: bool,
    pub per_cluster_degree: bool,
    pub color_low: String,
    pub color_high: String,
    pub out_dir: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub papers: usize,
    pub dangling_refs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionStats>,
    pub selected: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionStats {
    pub total_refs: usize,
    pub resolved: usize,
    pub unresolved: usize,
    pub ambiguous: usize,
    pub self_citations_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub components: usize,
    pub largest_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterStats {
    pub kept: usize,
    pub removed: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringStats {
    pub method: String,
    pub seed: u64,
    pub cluster_count: usize,
    pub q: f64,
    pub q_multilevel: f64,
    pub q_greedy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaGraphStats {
    pub sizes: Vec<usize>,
    pub intra_edges: usize,
    pub inter_edges: Vec<MetaEdge>,
    pub directed_edges_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaEdge {
    pub a: u32,
    pub b: u32,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub cluster: u32,
    pub size: usize,
    pub avg_year: f64,
    pub year_min: i32,
    pub year_max: i32,
    pub clinical_rate: f64,
    pub stage: Stage,
    pub rate_excluded: usize,
    pub top_terms: Vec<TermCount>,
    pub top_institutions: Vec<InstitutionCount>,
    pub central_by_hierarchy: Vec<CentralPaperEntry>,
    pub central_by_effective_degree: Vec<CentralPaperEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermCount {
    pub term: String,
    pub papers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstitutionCount {
    pub institution: String,
    pub papers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralPaperEntry {
    pub id: String,
    pub year: i32,
    pub hierarchy: usize,
    pub effective_degree: f64,
    /// Ancestry reach over the whole graph, ignoring cluster boundaries.
    pub global_hierarchy: usize,
}
