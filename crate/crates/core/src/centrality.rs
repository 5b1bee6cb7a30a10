//! Paper centrality: ancestry reach within a cluster (hierarchy) and the
//! effective number of incident edge weights.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::corpus::{Corpus, PaperId};
use crate::graph::{CitationGraph, WeightedGraph};

#[derive(Debug, Error)]
pub enum CentralityError {
    #[error("node {node} is not a member of the cluster")]
    NodeOutsideCluster { node: usize },
    #[error("node index {node} exceeds the graph ({nodes} nodes)")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("paper {0} is not in the corpus")]
    UnknownPaper(PaperId),
}

/// Number of cluster members that reach `node` by following citing->cited
/// edges, with every hop inside the cluster. A node on a cycle is never
/// counted as its own ancestor.
pub fn hierarchy_score(
    graph: &CitationGraph,
    cluster: &BTreeSet<usize>,
    node: usize,
) -> Result<usize, CentralityError> {
    check_range(graph, cluster.iter().copied())?;
    if !cluster.contains(&node) {
        return Err(CentralityError::NodeOutsideCluster { node });
    }
    Ok(reach_count(graph, node, |n| cluster.contains(&n)))
}

/// Hierarchy for every member of the cluster.
pub fn cluster_hierarchy(
    graph: &CitationGraph,
    cluster: &BTreeSet<usize>,
) -> Result<BTreeMap<usize, usize>, CentralityError> {
    cluster
        .iter()
        .map(|&node| Ok((node, hierarchy_score(graph, cluster, node)?)))
        .collect()
}

/// Ancestry reach over the whole graph, ignoring cluster boundaries.
pub fn global_hierarchy(graph: &CitationGraph, node: usize) -> Result<usize, CentralityError> {
    check_range(graph, std::iter::once(node))?;
    Ok(reach_count(graph, node, |_| true))
}

fn check_range(
    graph: &CitationGraph,
    nodes: impl IntoIterator<Item = usize>,
) -> Result<(), CentralityError> {
    let count = graph.node_count();
    for node in nodes {
        if node >= count {
            return Err(CentralityError::NodeOutOfRange { node, nodes: count });
        }
    }
    Ok(())
}

fn reach_count(graph: &CitationGraph, start: usize, admit: impl Fn(usize) -> bool) -> usize {
    let mut visited = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut count = 0usize;
    while let Some(node) = queue.pop_front() {
        for &citing in graph.cited_by(node) {
            if admit(citing) && visited.insert(citing) {
                count += 1;
                queue.push_back(citing);
            }
        }
    }
    count
}

/// (Σw)² / Σw² over the incident weights; 0 when there are none.
pub fn effective_count(weights: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, sum_sq) = weights
        .into_iter()
        .fold((0.0, 0.0), |(s, sq), w| (s + w, sq + w * w));
    if sum_sq == 0.0 {
        0.0
    } else {
        sum * sum / sum_sq
    }
}

/// Effective degree per node. Loop weights are ignored: a loop connects a
/// node to nothing else, and an isolated node must score 0.
pub fn effective_degrees(graph: &WeightedGraph) -> Vec<f64> {
    (0..graph.node_count())
        .map(|node| effective_count(graph.neighbors(node).map(|(_, w)| w)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedPaper {
    pub node: usize,
    pub id: PaperId,
    pub year: i32,
    pub hierarchy: usize,
    pub effective_degree: f64,
}

/// Top-k member lists; the same paper may head both.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralPapers {
    pub by_hierarchy: Vec<RankedPaper>,
    pub by_effective_degree: Vec<RankedPaper>,
}

/// Ranks cluster members by hierarchy and by effective degree, descending,
/// ties broken by year then id ascending. `effective` is indexed by graph
/// node, normally from [`effective_degrees`] on the undirected view.
pub fn central_papers(
    corpus: &Corpus,
    graph: &CitationGraph,
    cluster: &BTreeSet<usize>,
    effective: &[f64],
    k: usize,
) -> Result<CentralPapers, CentralityError> {
    if k == 0 {
        return Err(CentralityError::ZeroK);
    }
    if cluster.is_empty() {
        return Err(CentralityError::EmptyCluster);
    }
    let hierarchy = cluster_hierarchy(graph, cluster)?;
    let mut ranked = Vec::with_capacity(cluster.len());
    for (&node, &score) in &hierarchy {
        let id = graph.id(node).clone();
        let record = corpus
            .get(&id)
            .ok_or_else(|| CentralityError::UnknownPaper(id.clone()))?;
        ranked.push(RankedPaper {
            node,
            id,
            year: record.year,
            hierarchy: score,
            effective_degree: effective.get(node).copied().unwrap_or(0.0),
        });
    }

    let mut by_hierarchy = ranked.clone();
    by_hierarchy.sort_by(|a, b| {
        b.hierarchy
            .cmp(&a.hierarchy)
            .then(a.year.cmp(&b.year))
            .then(a.id.cmp(&b.id))
    });
    by_hierarchy.truncate(k);

    let mut by_effective_degree = ranked;
    by_effective_degree.sort_by(|a, b| {
        b.effective_degree
            .total_cmp(&a.effective_degree)
            .then(a.year.cmp(&b.year))
            .then(a.id.cmp(&b.id))
    });
    by_effective_degree.truncate(k);

    Ok(CentralPapers {
        by_hierarchy,
        by_effective_degree,
    })
}
