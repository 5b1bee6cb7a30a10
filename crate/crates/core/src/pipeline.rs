//! End-to-end run: ingest, select, graph, component, filter, cluster,
//! profile, score, lay out, render, and write all artifacts.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::centrality::{central_papers, cluster_hierarchy, effective_degrees, global_hierarchy};
use crate::clustering::{
    build_metagraph, greedy_agglomerative, modularity, multilevel_transfer, Partition,
};
use crate::corpus::{
    native::load_corpus_file, parse_tagged_export, resolve_references,
    vocab::load_vocabulary_file, Corpus, PaperRecord, TermId, VocabularyTree,
};
use crate::graph::{
    build_graph, citation_coverage, filter_by_required_terms, select_top_cited, weak_components,
    CitationGraph,
};
use crate::layout::{
    color_for_rate, export_graphml, render_svg, spring_layout, ColorScale, LayoutOptions, Rgb,
    SvgScene,
};
use crate::report::{
    round1, round4, round6, CentralPaperEntry, ClusterReport, ClusteringStats, ComponentStats,
    ConfigEcho, CorpusStats, FilterStats, InstitutionCount, MetaEdge, MetaGraphStats,
    PipelineReport, ResolutionStats, TermCount,
};
use crate::semantics::{build_profile, clinical_rate, SemanticsError, StageThresholds, TermCounting};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input: {message}")]
    Input { message: String },
    #[error("stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("no papers remain after the required-term filter")]
    EmptyAfterFilter,
}

impl PipelineError {
    /// 2 for rejected inputs, 3 for failures later in the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input { .. } => 2,
            _ => 3,
        }
    }

    fn input(message: impl Into<String>) -> Self {
        PipelineError::Input {
            message: message.into(),
        }
    }
}

fn at_stage<E: fmt::Display>(stage: &'static str) -> impl Fn(E) -> PipelineError {
    move |source| PipelineError::Stage {
        stage,
        message: source.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Multilevel,
    Greedy,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Multilevel => "multilevel",
            Method::Greedy => "greedy",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multilevel" => Ok(Method::Multilevel),
            "greedy" => Ok(Method::Greedy),
            other => Err(format!(
                "unknown method {other:?}, expected multilevel or greedy"
            )),
        }
    }
}

/// Full configuration of one run. Exactly one of `corpus_path` and
/// `tagged_export_path` must be set.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_path: Option<PathBuf>,
    pub tagged_export_path: Option<PathBuf>,
    pub vocab_path: PathBuf,
    pub fraction: f64,
    pub required_terms: Vec<TermId>,
    pub method: Method,
    pub seed: u64,
    pub thresholds: StageThresholds,
    pub top_k: usize,
    pub out_dir: PathBuf,
    pub include_ties: bool,
    pub strict_terms: bool,
    pub per_cluster_degree: bool,
    pub color_scale: ColorScale,
}

impl PipelineConfig {
    pub fn new(vocab_path: PathBuf, out_dir: PathBuf) -> Self {
        PipelineConfig {
            corpus_path: None,
            tagged_export_path: None,
            vocab_path,
            fraction: 0.2,
            required_terms: Vec::new(),
            method: Method::default(),
            seed: 42,
            thresholds: StageThresholds::default(),
            top_k: 5,
            out_dir,
            include_ties: false,
            strict_terms: false,
            per_cluster_degree: false,
            color_scale: ColorScale::default(),
        }
    }
}

/// Runs the whole pipeline and writes report.json, map.svg,
/// network.graphml, partition.tsv, and centrality.tsv into the output
/// directory. Byte-identical artifacts for identical configs.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    validate_config(config)?;
    let mut warnings: Vec<String> = Vec::new();

    // ingest
    let vocab = load_vocabulary_file(&config.vocab_path)
        .map_err(|e| PipelineError::input(format!("vocabulary: {e}")))?;
    let (corpus, dangling_refs, resolution) = ingest(config, &mut warnings)?;
    if corpus.is_empty() {
        return Err(PipelineError::input("corpus contains no papers"));
    }

    // select
    let selected = select_top_cited(&corpus, config.fraction, config.include_ties)
        .map_err(at_stage("select"))?;
    let coverage = citation_coverage(&selected, &corpus).map_err(at_stage("select"))?;

    // graph over the selected set
    let (selected_graph, graph_warnings) = build_graph(&selected);
    warnings.extend(graph_warnings);

    // largest weak component
    let components = weak_components(&selected_graph);
    let component_count = components.len();
    let largest_ids: BTreeSet<crate::corpus::PaperId> = components
        .first()
        .map(|members| {
            members
                .iter()
                .map(|&node| selected_graph.id(node).clone())
                .collect()
        })
        .unwrap_or_default();
    let component_corpus = selected.subset(&largest_ids);
    let largest_size = component_corpus.len();

    // required-term filter
    let required: BTreeSet<TermId> = config.required_terms.iter().cloned().collect();
    let filtered = filter_by_required_terms(&component_corpus, &required);
    if filtered.is_empty() {
        return Err(PipelineError::EmptyAfterFilter);
    }
    let kept = filtered.len();
    let removed = largest_size - kept;
    let (graph, _) = build_graph(&filtered);
    let undirected = graph.undirected_view();

    // cluster
    let n = graph.node_count();
    let (partition, q, q_multilevel, q_greedy) = if graph.edge_count() == 0 {
        warnings.push(
            "graph has no edges; every paper is its own cluster and modularity is reported as 0"
                .to_owned(),
        );
        let labels: Vec<usize> = (0..n).collect();
        (Partition::from_labels(&labels), 0.0, 0.0, 0.0)
    } else {
        let by_multilevel = multilevel_transfer(&undirected, config.seed);
        let by_greedy = greedy_agglomerative(&undirected);
        let q_multilevel =
            modularity(&undirected, &by_multilevel).map_err(at_stage("cluster"))?;
        let q_greedy = modularity(&undirected, &by_greedy).map_err(at_stage("cluster"))?;
        match config.method {
            Method::Multilevel => (by_multilevel, q_multilevel, q_multilevel, q_greedy),
            Method::Greedy => (by_greedy, q_greedy, q_multilevel, q_greedy),
        }
    };
    let meta = build_metagraph(&graph, &partition).map_err(at_stage("cluster"))?;
    debug_assert_eq!(
        meta.total_inter_edges() + meta.intra_edges,
        graph.edge_count() as u64
    );

    // profiles and per-node rates
    let counting = if config.strict_terms {
        TermCounting::KnownOnly
    } else {
        TermCounting::All
    };
    let cluster_count = partition.cluster_count() as usize;
    let mut profiles = Vec::with_capacity(cluster_count);
    for c in 1..=cluster_count as u32 {
        let members = member_records(&filtered, &graph, &partition.members(c));
        let profile = build_profile(
            c,
            &members,
            &vocab,
            &config.thresholds,
            counting,
            config.top_k,
        )
        .map_err(at_stage("profile"))?;
        profiles.push(profile);
    }
    let rates = node_rates(&filtered, &graph, &vocab, counting, &mut warnings);

    // centrality
    let effective = if config.per_cluster_degree {
        let mut scores = vec![0.0; n];
        for c in 1..=cluster_count as u32 {
            let members = partition.members(c);
            let local = effective_degrees(&undirected.induced(&members));
            for (position, &node) in members.iter().enumerate() {
                scores[node] = local[position];
            }
        }
        scores
    } else {
        effective_degrees(&undirected)
    };
    let mut hierarchy = vec![0usize; n];
    let mut centrals: Vec<crate::centrality::CentralPapers> = Vec::with_capacity(cluster_count);
    for c in 1..=cluster_count as u32 {
        let member_set: BTreeSet<usize> = partition.members(c).into_iter().collect();
        let scores = cluster_hierarchy(&graph, &member_set).map_err(at_stage("centrality"))?;
        for (&node, &score) in &scores {
            hierarchy[node] = score;
        }
        let central = central_papers(&filtered, &graph, &member_set, &effective, config.top_k)
            .map_err(at_stage("centrality"))?;
        centrals.push(central);
    }

    // layout and colors
    let layout_opts = LayoutOptions::default();
    let positions = spring_layout(&undirected, config.seed, &layout_opts);
    let (min_rate, max_rate) = rates
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
    let mut paint = |rate: f64, what: &str| {
        let (color, clamped) = color_for_rate(rate, min_rate, max_rate, &config.color_scale);
        if clamped {
            warnings.push(format!("rate {rate} for {what} clamped to the color range"));
        }
        color
    };
    let node_colors: Vec<Rgb> = rates
        .iter()
        .enumerate()
        .map(|(node, &rate)| paint(rate, graph.id(node).as_str()))
        .collect();
    let cluster_colors: Vec<Rgb> = profiles
        .iter()
        .map(|p| paint(p.clinical_rate, &format!("cluster {}", p.cluster)))
        .collect();

    // render
    let scene = SvgScene {
        graph: &graph,
        positions: &positions,
        node_colors: &node_colors,
        partition: &partition,
        meta: &meta,
        profiles: &profiles,
        cluster_colors: &cluster_colors,
        canvas: layout_opts.canvas,
    };
    let svg = render_svg(&scene).map_err(at_stage("render"))?;
    let graphml = export_graphml(
        &filtered,
        &graph,
        &positions,
        &partition,
        &rates,
        &hierarchy,
        &effective,
    )
    .map_err(at_stage("render"))?;

    // report
    let report = PipelineReport {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        config: echo_config(config),
        corpus: CorpusStats {
            papers: corpus.len(),
            dangling_refs,
            resolution,
            selected: selected.len(),
            coverage: round4(coverage),
        },
        component: ComponentStats {
            components: component_count,
            largest_size,
        },
        filter: FilterStats {
            kept,
            removed,
            edges: graph.edge_count(),
        },
        clustering: ClusteringStats {
            method: config.method.to_string(),
            seed: config.seed,
            cluster_count,
            q: round6(q),
            q_multilevel: round6(q_multilevel),
            q_greedy: round6(q_greedy),
        },
        metagraph: MetaGraphStats {
            sizes: meta.sizes.clone(),
            intra_edges: meta.intra_edges as usize,
            inter_edges: meta
                .edges
                .iter()
                .map(|(&(a, b), &weight)| MetaEdge { a, b, weight })
                .collect(),
            directed_edges_total: graph.edge_count(),
        },
        clusters: profiles
            .iter()
            .zip(&centrals)
            .map(|(profile, central)| -> Result<ClusterReport, PipelineError> {
                Ok(ClusterReport {
                    cluster: profile.cluster,
                    size: profile.size,
                    avg_year: round1(profile.avg_year),
                    year_min: profile.year_range.0,
                    year_max: profile.year_range.1,
                    clinical_rate: round4(profile.clinical_rate),
                    stage: profile.stage,
                    rate_excluded: profile.rate_excluded,
                    top_terms: profile
                        .top_terms
                        .iter()
                        .map(|(term, papers)| TermCount {
                            term: term.to_string(),
                            papers: *papers,
                        })
                        .collect(),
                    top_institutions: profile
                        .top_institutions
                        .iter()
                        .map(|(institution, papers)| InstitutionCount {
                            institution: institution.clone(),
                            papers: *papers,
                        })
                        .collect(),
                    central_by_hierarchy: central_entries(&central.by_hierarchy, &graph)?,
                    central_by_effective_degree: central_entries(
                        &central.by_effective_degree,
                        &graph,
                    )?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?,
        warnings,
    };

    write_artifacts(config, &report, &svg, &graphml, &graph, &partition, &hierarchy, &effective)?;
    Ok(report)
}

fn validate_config(config: &PipelineConfig) -> Result<(), PipelineError> {
    match (&config.corpus_path, &config.tagged_export_path) {
        (Some(_), Some(_)) => {
            return Err(PipelineError::input(
                "give either a corpus file or a tagged export, not both",
            ))
        }
        (None, None) => {
            return Err(PipelineError::input(
                "one of corpus file or tagged export is required",
            ))
        }
        _ => {}
    }
    if !(config.fraction > 0.0 && config.fraction <= 1.0) {
        return Err(PipelineError::input(format!(
            "fraction must be in (0, 1], got {}",
            config.fraction
        )));
    }
    config
        .thresholds
        .validate()
        .map_err(|e| PipelineError::input(e.to_string()))?;
    if config.top_k == 0 {
        return Err(PipelineError::input("top-k must be at least 1"));
    }
    Ok(())
}

fn ingest(
    config: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> Result<(Corpus, usize, Option<ResolutionStats>), PipelineError> {
    if let Some(path) = &config.corpus_path {
        let (corpus, parse) = load_corpus_file(path)
            .map_err(|e| PipelineError::input(format!("{}: {e}", path.display())))?;
        return Ok((corpus, parse.dangling_refs, None));
    }
    let path = config.tagged_export_path.as_ref().expect("validated");
    let text = fs::read_to_string(path)
        .map_err(|e| PipelineError::input(format!("{}: {e}", path.display())))?;
    let (records, parse_warnings) = parse_tagged_export(&text);
    warnings.extend(parse_warnings);
    let (corpus, resolution) = resolve_references(&records)
        .map_err(|e| PipelineError::input(format!("{}: {e}", path.display())))?;
    let stats = ResolutionStats {
        total_refs: resolution.total_refs,
        resolved: resolution.resolved,
        unresolved: resolution.unresolved,
        ambiguous: resolution.ambiguous,
        self_citations_dropped: resolution.self_citations_dropped,
    };
    Ok((corpus, 0, Some(stats)))
}

fn member_records<'a>(
    corpus: &'a Corpus,
    graph: &CitationGraph,
    members: &[usize],
) -> Vec<&'a PaperRecord> {
    members
        .iter()
        .map(|&node| {
            corpus
                .get(graph.id(node))
                .expect("graph nodes come from this corpus")
        })
        .collect()
}

/// Rates for rendering; papers without countable terms fall back to 0 with
/// a warning so drawing and export can proceed.
fn node_rates(
    corpus: &Corpus,
    graph: &CitationGraph,
    vocab: &VocabularyTree,
    counting: TermCounting,
    warnings: &mut Vec<String>,
) -> Vec<f64> {
    (0..graph.node_count())
        .map(|node| {
            let record = corpus
                .get(graph.id(node))
                .expect("graph nodes come from this corpus");
            match clinical_rate(record, vocab, counting) {
                Ok(rate) => rate,
                Err(SemanticsError::NoCountableTerms(id)) => {
                    warnings.push(format!(
                        "paper {id} has no countable terms; clinical rate treated as 0 for rendering"
                    ));
                    0.0
                }
                Err(other) => {
                    warnings.push(format!("paper {}: {other}", record.id));
                    0.0
                }
            }
        })
        .collect()
}

fn central_entries(
    ranked: &[crate::centrality::RankedPaper],
    graph: &CitationGraph,
) -> Result<Vec<CentralPaperEntry>, PipelineError> {
    ranked
        .iter()
        .map(|paper| {
            let reach =
                global_hierarchy(graph, paper.node).map_err(at_stage("centrality"))?;
            Ok(CentralPaperEntry {
                id: paper.id.to_string(),
                year: paper.year,
                hierarchy: paper.hierarchy,
                effective_degree: round4(paper.effective_degree),
                global_hierarchy: reach,
            })
        })
        .collect()
}

fn echo_config(config: &PipelineConfig) -> ConfigEcho {
    ConfigEcho {
        corpus_path: config.corpus_path.as_ref().map(|p| p.display().to_string()),
        tagged_export_path: config
            .tagged_export_path
            .as_ref()
            .map(|p| p.display().to_string()),
        vocab_path: config.vocab_path.display().to_string(),
        fraction: config.fraction,
        required_terms: config
            .required_terms
            .iter()
            .map(|t| t.to_string())
            .collect(),
        method: config.method.to_string(),
        seed: config.seed,
        basic_upper: config.thresholds.basic_upper,
        translational_upper: config.thresholds.translational_upper,
        top_k: config.top_k,
        include_ties: config.include_ties,
        strict_terms: config.strict_terms,
        per_cluster_degree: config.per_cluster_degree,
        color_low: config.color_scale.low.hex(),
        color_high: config.color_scale.high.hex(),
        out_dir: config.out_dir.display().to_string(),
    }
}

#[allow(clippy::too_many_arguments)]
fn write_artifacts(
    config: &PipelineConfig,
    report: &PipelineReport,
    svg: &str,
    graphml: &str,
    graph: &CitationGraph,
    partition: &Partition,
    hierarchy: &[usize],
    effective: &[f64],
) -> Result<(), PipelineError> {
    let write = at_stage::<std::io::Error>("write");
    fs::create_dir_all(&config.out_dir).map_err(&write)?;
    let report_text = report
        .to_json_string()
        .map_err(|e| PipelineError::Stage {
            stage: "write",
            message: e.to_string(),
        })?;
    write_file(&config.out_dir.join("report.json"), &report_text).map_err(&write)?;
    write_file(&config.out_dir.join("map.svg"), svg).map_err(&write)?;
    write_file(&config.out_dir.join("network.graphml"), graphml).map_err(&write)?;

    let mut partition_tsv = String::new();
    let mut centrality_tsv = String::new();
    for node in 0..graph.node_count() {
        let id = graph.id(node);
        partition_tsv.push_str(&format!("{id}\t{}\n", partition.assignment()[node]));
        centrality_tsv.push_str(&format!(
            "{id}\t{}\t{:.6}\n",
            hierarchy[node], effective[node]
        ));
    }
    write_file(&config.out_dir.join("partition.tsv"), &partition_tsv).map_err(&write)?;
    write_file(&config.out_dir.join("centrality.tsv"), &centrality_tsv).map_err(&write)?;
    Ok(())
}

fn write_file(path: &Path, content: &str) -> std::io::Result<()> {
    fs::write(path, content.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::native::corpus_to_string;
    use crate::corpus::vocab;
    use crate::fixture::{fixture_vocabulary, generate_fixture};

    fn write_inputs(dir: &Path, corpus: &Corpus) -> (PathBuf, PathBuf) {
        let corpus_path = dir.join("corpus.jsonl");
        fs::write(&corpus_path, corpus_to_string(corpus)).unwrap();
        let vocab_path = dir.join("vocab.txt");
        fs::write(&vocab_path, fixture_vocabulary().to_text()).unwrap();
        (corpus_path, vocab_path)
    }

    fn fixture_config(dir: &Path) -> PipelineConfig {
        let corpus = generate_fixture(40, 1.1, 7);
        let (corpus_path, vocab_path) = write_inputs(dir, &corpus);
        let mut config = PipelineConfig::new(vocab_path, dir.join("out"));
        config.corpus_path = Some(corpus_path);
        config.fraction = 0.5;
        config.seed = 7;
        config
    }

    #[test]
    fn run_produces_consistent_report_and_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture_config(dir.path());
        let report = run_pipeline(&config).unwrap();

        let total: usize = report.clusters.iter().map(|c| c.size).sum();
        assert_eq!(total, report.filter.kept);
        assert_eq!(report.metagraph.sizes.len(), report.clustering.cluster_count);
        let inter: u64 = report.metagraph.inter_edges.iter().map(|e| e.weight).sum();
        assert_eq!(
            inter as usize + report.metagraph.intra_edges,
            report.metagraph.directed_edges_total
        );
        assert!((0.0..=1.0).contains(&report.corpus.coverage));
        for name in [
            "report.json",
            "map.svg",
            "network.graphml",
            "partition.tsv",
            "centrality.tsv",
        ] {
            assert!(config.out_dir.join(name).exists(), "{name} missing");
        }
    }

    #[test]
    fn full_fraction_reports_full_coverage() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fixture_config(dir.path());
        config.fraction = 1.0;
        let report = run_pipeline(&config).unwrap();
        assert_eq!(report.corpus.coverage, 1.0);
        assert_eq!(report.corpus.selected, report.corpus.papers);
    }

    #[test]
    fn missing_corpus_file_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = {
            let mut c = fixture_config(dir.path());
            c.corpus_path = Some(dir.path().join("absent.jsonl"));
            c
        };
        let err = run_pipeline(&config).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn two_input_sources_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fixture_config(dir.path());
        config.tagged_export_path = Some(dir.path().join("export.txt"));
        let err = run_pipeline(&config).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("not both"));
    }

    #[test]
    fn unmatched_required_term_empties_the_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fixture_config(dir.path());
        config.required_terms = vec!["no-such-term".into()];
        let err = run_pipeline(&config).unwrap_err();
        assert!(matches!(err, PipelineError::EmptyAfterFilter));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn runs_are_reproducible() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let corpus = generate_fixture(40, 1.1, 7);
        let mut outputs = Vec::new();
        for dir in [dir_a.path(), dir_b.path()] {
            let (corpus_path, vocab_path) = write_inputs(dir, &corpus);
            let mut config = PipelineConfig::new(vocab_path, dir.join("out"));
            config.corpus_path = Some(corpus_path);
            config.fraction = 0.5;
            config.seed = 7;
            run_pipeline(&config).unwrap();
            outputs.push(fs::read(dir.join("out").join("map.svg")).unwrap());
        }
        assert_eq!(outputs[0], outputs[1]);
    }

    #[test]
    fn zero_term_papers_are_warned_and_rated_zero() {
        let dir = tempfile::tempdir().unwrap();
        let corpus_path = dir.path().join("corpus.jsonl");
        // c has no terms; a and b carry one clinical term each.
        let lines = concat!(
            "{\"id\":\"a\",\"title\":\"t\",\"year\":2000,\"times_cited\":5,\"refs\":[],\"terms\":[\"dosing\"]}\n",
            "{\"id\":\"b\",\"title\":\"t\",\"year\":2001,\"times_cited\":4,\"refs\":[\"a\"],\"terms\":[\"dosing\"]}\n",
            "{\"id\":\"c\",\"title\":\"t\",\"year\":2002,\"times_cited\":3,\"refs\":[\"a\"],\"terms\":[]}\n",
        );
        fs::write(&corpus_path, lines).unwrap();
        let vocab_path = dir.path().join("vocab.txt");
        let tree = vocab::load_vocabulary(concat!(
            "clinical_roots: care\n",
            "care\tCare\t\n",
            "dosing\tDosing\tcare\n",
        ))
        .unwrap();
        fs::write(&vocab_path, tree.to_text()).unwrap();

        let mut config = PipelineConfig::new(vocab_path, dir.path().join("out"));
        config.corpus_path = Some(corpus_path);
        config.fraction = 1.0;
        let report = run_pipeline(&config).unwrap();
        assert!(report
            .warnings
            .iter()
            .any(|w| w.contains("no countable terms")));
        let excluded: usize = report.clusters.iter().map(|c| c.rate_excluded).sum();
        assert_eq!(excluded, 1);
    }
}
