//! Deterministic synthetic corpora: Zipf-distributed citation counts,
//! preferential-attachment references to older papers, and a term mix that
//! trends clinical over time. Also builds planted-community graphs for
//! clustering checks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clustering::Partition;
use crate::corpus::{load_vocabulary, Corpus, PaperRecord, TermId, VocabularyTree};
use crate::graph::WeightedGraph;

/// Both near-ubiquitous base terms, useful as --require-term targets.
pub const BASE_TERMS: [&str; 2] = ["agent-x", "carrier-v"];

const CLINICAL_POOL: [&str; 12] = [
    "infusion-therapy",
    "dose-scheduling",
    "combination-regimen",
    "salvage-treatment",
    "maintenance-therapy",
    "imaging-assessment",
    "biopsy-grading",
    "response-evaluation",
    "elderly-patients",
    "pediatric-cohort",
    "trial-enrollment",
    "toxicity-monitoring",
];

const NON_CLINICAL_POOL: [&str; 10] = [
    "agent-x",
    "carrier-v",
    "lipid-vesicle",
    "polymer-coating",
    "conjugate-chemistry",
    "buffer-formulation",
    "membrane-transport",
    "cellular-uptake",
    "biodistribution-kinetics",
    "clearance-pathway",
];

const INSTITUTIONS: [&str; 8] = [
    "Harborview Institute",
    "Calder Research Center",
    "Meridian University",
    "Eastfield Clinic",
    "Northgate Laboratory",
    "Sutton Medical School",
    "Pinewood Foundation",
    "Vale Polytechnic",
];

const COUNTRIES: [&str; 6] = ["USA", "Italy", "Japan", "Germany", "Israel", "Canada"];

/// Vocabulary covering every term the generator can draw. Clinical roots
/// are therapeutics, diagnosis, and populations; toxicity-monitoring sits
/// under both therapeutics and processes.
pub fn fixture_vocabulary() -> VocabularyTree {
    load_vocabulary(concat!(
        "clinical_roots: therapeutics,diagnosis,populations\n",
        "therapeutics\tTherapeutics\t\n",
        "diagnosis\tDiagnosis\t\n",
        "populations\tPopulations\t\n",
        "substances\tSubstances\t\n",
        "processes\tProcesses\t\n",
        "infusion-therapy\tInfusion therapy\ttherapeutics\n",
        "dose-scheduling\tDose scheduling\ttherapeutics\n",
        "combination-regimen\tCombination regimen\ttherapeutics\n",
        "salvage-treatment\tSalvage treatment\ttherapeutics\n",
        "maintenance-therapy\tMaintenance therapy\ttherapeutics\n",
        "imaging-assessment\tImaging assessment\tdiagnosis\n",
        "biopsy-grading\tBiopsy grading\tdiagnosis\n",
        "response-evaluation\tResponse evaluation\tdiagnosis\n",
        "elderly-patients\tElderly patients\tpopulations\n",
        "pediatric-cohort\tPediatric cohort\tpopulations\n",
        "trial-enrollment\tTrial enrollment\tpopulations\n",
        "toxicity-monitoring\tToxicity monitoring\ttherapeutics,processes\n",
        "agent-x\tAgent X\tsubstances\n",
        "carrier-v\tCarrier V\tsubstances\n",
        "lipid-vesicle\tLipid vesicle\tsubstances\n",
        "polymer-coating\tPolymer coating\tsubstances\n",
        "conjugate-chemistry\tConjugate chemistry\tsubstances\n",
        "buffer-formulation\tBuffer formulation\tsubstances\n",
        "membrane-transport\tMembrane transport\tprocesses\n",
        "cellular-uptake\tCellular uptake\tprocesses\n",
        "biodistribution-kinetics\tBiodistribution kinetics\tprocesses\n",
        "clearance-pathway\tClearance pathway\tprocesses\n",
    ))
    .expect("fixture vocabulary is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixtureOptions {
    /// Draw every term from the clinical pool and skip the base terms,
    /// so every paper rates exactly 1.0.
    pub clinical_only: bool,
}

pub fn generate_fixture(n: usize, zipf_exponent: f64, seed: u64) -> Corpus {
    generate_fixture_with(n, zipf_exponent, seed, &FixtureOptions::default())
}

pub fn generate_fixture_with(
    n: usize,
    zipf_exponent: f64,
    seed: u64,
    options: &FixtureOptions,
) -> Corpus {
    assert!(n >= 10, "fixture needs at least 10 papers, got {n}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = usize::max(4, n.to_string().len());
    let ids: Vec<String> = (1..=n).map(|i| format!("P{i:0width$}")).collect();
    let years: Vec<i32> = (0..n).map(|i| 1980 + (i * 30 / n) as i32).collect();

    // Zipf counts by rank, roughened with bounded noise, then dealt to
    // papers in shuffled order so high counts land in arbitrary years.
    let mut counts: Vec<u32> = (1..=n)
        .map(|rank| {
            let base = 2000.0 * (rank as f64).powf(-zipf_exponent);
            let noise = 0.85 + 0.30 * rng.random::<f64>();
            (base * noise).round() as u32
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut times_cited = vec![0u32; n];
    for (rank, &paper) in order.iter().enumerate() {
        times_cited[paper] = counts[rank];
    }
    counts.clear();

    let mut records = Vec::with_capacity(n);
    let mut indegree = vec![0u64; n];
    for i in 0..n {
        // References go to strictly older papers, biased toward papers
        // already cited often. Years are non-decreasing, so the eligible
        // targets are a prefix.
        let eligible = years.partition_point(|&y| y < years[i]);
        let mut refs = BTreeSet::new();
        if eligible > 0 {
            let wanted = rng.random_range(1..=4usize).min(eligible);
            let mut attempts = 0;
            while refs.len() < wanted && attempts < 20 * wanted {
                attempts += 1;
                let pick = weighted_pick(&mut rng, &indegree[..eligible]);
                refs.insert(pick);
            }
            for &target in &refs {
                indegree[target] += 1;
            }
        }

        let mut terms: BTreeSet<TermId> = BTreeSet::new();
        if !options.clinical_only {
            if rng.random::<f64>() < 0.93 {
                terms.insert("agent-x".into());
            }
            if rng.random::<f64>() < 0.90 {
                terms.insert("carrier-v".into());
            }
        }
        let clinical_share = if n > 1 {
            0.08 + 0.57 * i as f64 / (n - 1) as f64
        } else {
            0.08
        };
        let drawn = rng.random_range(3..=6usize);
        for _ in 0..drawn {
            let clinical = options.clinical_only || rng.random::<f64>() < clinical_share;
            let pool: &[&str] = if clinical {
                &CLINICAL_POOL
            } else {
                &NON_CLINICAL_POOL
            };
            terms.insert(pool[rng.random_range(0..pool.len())].into());
        }

        let institution = (rng.random::<f64>() < 0.8)
            .then(|| INSTITUTIONS[rng.random_range(0..INSTITUTIONS.len())].to_owned());
        let country = institution
            .is_some()
            .then(|| COUNTRIES[rng.random_range(0..COUNTRIES.len())].to_owned());

        records.push(PaperRecord {
            id: ids[i].as_str().into(),
            title: format!("Study {} of delivery behavior", i + 1),
            year: years[i],
            times_cited: times_cited[i],
            refs: refs.iter().map(|&t| ids[t].as_str().into()).collect(),
            terms,
            institution,
            country,
        });
    }

    let (corpus, dangling) = Corpus::from_records(records).expect("generated records are valid");
    debug_assert_eq!(dangling, 0);
    corpus
}

/// Index drawn proportionally to weight + 1, so untouched papers stay
/// reachable.
fn weighted_pick(rng: &mut ChaCha8Rng, weights: &[u64]) -> usize {
    let total: u64 = weights.iter().map(|&w| w + 1).sum();
    let mut ticket = rng.random_range(0..total);
    for (i, &w) in weights.iter().enumerate() {
        let share = w + 1;
        if ticket < share {
            return i;
        }
        ticket -= share;
    }
    weights.len() - 1
}

/// Random graph with blocks of the given sizes: node pairs inside a block
/// connect with probability `p_in`, pairs across blocks with `p_out`.
/// Returns the graph and the planted block partition.
pub fn planted_communities(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> (WeightedGraph, Partition) {
    let n: usize = sizes.iter().sum();
    let mut labels = Vec::with_capacity(n);
    for (block, &size) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat(block).take(size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graph = WeightedGraph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                graph.add_edge(i, j, 1.0);
            }
        }
    }
    (graph, Partition::from_labels(&labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, citation_coverage, select_top_cited};
    use crate::semantics::{clinical_rate, TermCounting};

    #[test]
    fn same_inputs_give_identical_corpora() {
        let a = generate_fixture(60, 1.1, 9);
        let b = generate_fixture(60, 1.1, 9);
        assert_eq!(a, b);
        let c = generate_fixture(60, 1.1, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn years_are_bounded_and_references_point_backward() {
        let corpus = generate_fixture(120, 1.1, 3);
        for record in corpus.records() {
            assert!((1980..=2010).contains(&record.year));
        }
        let (_, warnings) = build_graph(&corpus);
        let anachronisms: Vec<&String> = warnings
            .iter()
            .filter(|w| w.contains("anachronistic"))
            .collect();
        assert!(anachronisms.is_empty(), "{anachronisms:?}");
    }

    #[test]
    fn every_generated_term_is_in_the_fixture_vocabulary() {
        let vocab = fixture_vocabulary();
        let corpus = generate_fixture(80, 1.1, 5);
        for record in corpus.records() {
            assert!(!record.terms.is_empty());
            for term in &record.terms {
                assert!(vocab.contains(term), "unknown term {term}");
            }
        }
    }

    #[test]
    fn clinical_only_fixtures_rate_one_everywhere() {
        let vocab = fixture_vocabulary();
        let options = FixtureOptions {
            clinical_only: true,
        };
        let corpus = generate_fixture_with(40, 1.1, 2, &options);
        for record in corpus.records() {
            let rate = clinical_rate(record, &vocab, TermCounting::All).unwrap();
            assert_eq!(rate, 1.0, "paper {} rated {rate}", record.id);
        }
    }

    #[test]
    fn top_fifth_of_a_small_fixture_covers_most_citations() {
        let corpus = generate_fixture(200, 1.1, 1);
        let selected = select_top_cited(&corpus, 0.2, false).unwrap();
        let coverage = citation_coverage(&selected, &corpus).unwrap();
        assert!(
            (0.5..=0.95).contains(&coverage),
            "coverage {coverage} out of band"
        );
    }

    #[test]
    fn base_terms_are_common_but_not_universal() {
        let corpus = generate_fixture(300, 1.1, 4);
        let with_base = corpus
            .records()
            .iter()
            .filter(|r| r.terms.contains(&TermId::from("agent-x")))
            .count();
        let share = with_base as f64 / corpus.len() as f64;
        assert!((0.85..1.0).contains(&share), "share {share}");
    }

    #[test]
    fn planted_blocks_come_back_as_the_partition() {
        let (graph, partition) = planted_communities(&[16, 16, 16, 16], 0.6, 0.02, 0);
        assert_eq!(graph.node_count(), 64);
        assert_eq!(partition.clusters().len(), 4);
        assert!(partition.clusters().iter().all(|c| c.len() == 16));
        let (again, _) = planted_communities(&[16, 16, 16, 16], 0.6, 0.02, 0);
        assert_eq!(graph, again);
    }

    #[test]
    fn fixture_vocabulary_classifies_both_families() {
        let vocab = fixture_vocabulary();
        assert!(!vocab.is_clinical(&"agent-x".into()).unwrap());
        assert!(vocab.is_clinical(&"toxicity-monitoring".into()).unwrap());
        assert!(vocab.is_clinical(&"trial-enrollment".into()).unwrap());
        assert!(!vocab.is_clinical(&"membrane-transport".into()).unwrap());
    }
}
