//! litmap: turn a citation corpus into a clustered, staged knowledge map.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use litmap_core::corpus::native::corpus_to_string;
use litmap_core::fixture::{fixture_vocabulary, generate_fixture_with, FixtureOptions};
use litmap_core::layout::{ColorScale, Rgb};
use litmap_core::pipeline::Method;
use litmap_core::semantics::StageThresholds;
use litmap_core::{run_pipeline, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "litmap",
    version,
    about = "Cluster a citation network and map its clinical maturity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all artifacts.
    Run(RunArgs),
    /// Generate a synthetic corpus and matching vocabulary.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Corpus as one JSON record per line.
    #[arg(long, conflicts_with = "tagged_export")]
    corpus: Option<PathBuf>,
    /// Corpus as a tagged-field bibliographic export.
    #[arg(long)]
    tagged_export: Option<PathBuf>,
    /// Vocabulary file with a clinical_roots header.
    #[arg(long)]
    vocab: PathBuf,
    /// Top-cited fraction to keep.
    #[arg(long, default_value_t = 0.2)]
    fraction: f64,
    /// Term id every kept paper must carry; repeatable.
    #[arg(long = "require-term")]
    require_term: Vec<String>,
    /// Clustering method: multilevel or greedy.
    #[arg(long, default_value = "multilevel", value_parser = parse_method)]
    method: Method,
    /// Seed for clustering and layout.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Stage cutoffs as "basic,translational", e.g. "0.15,0.33".
    #[arg(long, value_parser = parse_thresholds)]
    thresholds: Option<StageThresholds>,
    /// List length for top terms, institutions, and central papers.
    #[arg(long = "top-k", default_value_t = 5)]
    top_k: usize,
    /// Output directory.
    #[arg(long, default_value = "litmap-out")]
    out: PathBuf,
    /// Extend the selection through ties at the citation cutoff.
    #[arg(long)]
    include_ties: bool,
    /// Rate papers over vocabulary terms only.
    #[arg(long)]
    strict_terms: bool,
    /// Compute effective degree within each cluster's subgraph.
    #[arg(long = "per-cluster")]
    per_cluster: bool,
    /// Color for the lowest clinical rate; name or #rrggbb.
    #[arg(long, default_value = "red", value_parser = parse_color)]
    color_low: Rgb,
    /// Color for the highest clinical rate; name or #rrggbb.
    #[arg(long, default_value = "blue", value_parser = parse_color)]
    color_high: Rgb,
}

#[derive(Args)]
struct FixtureArgs {
    /// Number of papers; at least 10.
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Zipf exponent for the citation-count distribution.
    #[arg(long, default_value_t = 1.1)]
    zipf: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Draw every term from the clinical family.
    #[arg(long)]
    clinical_only: bool,
    /// Directory receiving corpus.jsonl and vocab.txt.
    #[arg(long, default_value = "litmap-fixture")]
    out: PathBuf,
}

fn parse_method(raw: &str) -> Result<Method, String> {
    raw.parse()
}

fn parse_thresholds(raw: &str) -> Result<StageThresholds, String> {
    let parts: Vec<&str> = raw.split(',').collect();
    let [basic, translational] = parts.as_slice() else {
        return Err(format!(
            "expected two comma-separated rates, got {raw:?}"
        ));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("{s:?} is not a number"))
    };
    let thresholds = StageThresholds {
        basic_upper: parse(basic)?,
        translational_upper: parse(translational)?,
    };
    thresholds.validate().map_err(|e| e.to_string())?;
    Ok(thresholds)
}

fn parse_color(raw: &str) -> Result<Rgb, String> {
    let named = match raw.to_ascii_lowercase().as_str() {
        "red" => Some(Rgb(255, 0, 0)),
        "blue" => Some(Rgb(0, 0, 255)),
        "green" => Some(Rgb(0, 128, 0)),
        "yellow" => Some(Rgb(255, 255, 0)),
        "orange" => Some(Rgb(255, 165, 0)),
        "purple" => Some(Rgb(128, 0, 128)),
        "white" => Some(Rgb(255, 255, 255)),
        "black" => Some(Rgb(0, 0, 0)),
        _ => None,
    };
    if let Some(color) = named {
        return Ok(color);
    }
    let hex = raw
        .strip_prefix('#')
        .filter(|h| h.len() == 6 && h.chars().all(|c| c.is_ascii_hexdigit()))
        .ok_or_else(|| format!("unknown color {raw:?}, use a name or #rrggbb"))?;
    let channel = |i: usize| u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).unwrap();
    Ok(Rgb(channel(0), channel(1), channel(2)))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Fixture(args) => fixture(args),
    }
}

fn run(args: RunArgs) -> ExitCode {
    let mut config = PipelineConfig::new(args.vocab, args.out);
    config.corpus_path = args.corpus;
    config.tagged_export_path = args.tagged_export;
    config.fraction = args.fraction;
    config.required_terms = args.require_term.iter().map(|t| t.as_str().into()).collect();
    config.method = args.method;
    config.seed = args.seed;
    if let Some(thresholds) = args.thresholds {
        config.thresholds = thresholds;
    }
    config.top_k = args.top_k;
    config.include_ties = args.include_ties;
    config.strict_terms = args.strict_terms;
    config.per_cluster_degree = args.per_cluster;
    config.color_scale = ColorScale {
        low: args.color_low,
        high: args.color_high,
    };

    match run_pipeline(&config) {
        Ok(report) => {
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            println!(
                "papers: {}  selected: {} (coverage {:.4})  component: {}  kept: {}",
                report.corpus.papers,
                report.corpus.selected,
                report.corpus.coverage,
                report.component.largest_size,
                report.filter.kept
            );
            println!(
                "clusters: {}  q: {:.6}  method: {}  seed: {}",
                report.clustering.cluster_count,
                report.clustering.q,
                report.clustering.method,
                report.clustering.seed
            );
            println!(
                "wrote report.json, map.svg, network.graphml, partition.tsv, centrality.tsv to {}",
                report.config.out_dir
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn fixture(args: FixtureArgs) -> ExitCode {
    if args.n < 10 {
        eprintln!("error: input: fixture needs at least 10 papers, got {}", args.n);
        return ExitCode::from(2);
    }
    let options = FixtureOptions {
        clinical_only: args.clinical_only,
    };
    let corpus = generate_fixture_with(args.n, args.zipf, args.seed, &options);
    let result = fs::create_dir_all(&args.out)
        .and_then(|()| fs::write(args.out.join("corpus.jsonl"), corpus_to_string(&corpus)))
        .and_then(|()| fs::write(args.out.join("vocab.txt"), fixture_vocabulary().to_text()));
    match result {
        Ok(()) => {
            println!(
                "wrote corpus.jsonl ({} papers) and vocab.txt to {}",
                corpus.len(),
                args.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}
