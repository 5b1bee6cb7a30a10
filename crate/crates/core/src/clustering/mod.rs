//! Community detection by modularity maximization, with a condensed
//! cluster-level meta-graph.
//!
//! Three optimizers share the modularity objective: a seeded multilevel
//! transfer scheme (local moves plus coarsening), greedy agglomeration, and
//! an exhaustive search over set partitions for small graphs, used as the
//! test oracle.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{CitationGraph, WeightedGraph};

mod exhaustive;
mod greedy;
mod transfer;

pub use exhaustive::{brute_force_best_partition, BRUTE_FORCE_MAX_NODES};
pub use greedy::greedy_agglomerative;
pub use transfer::{coarsen, multilevel_transfer, transfer_phase};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("modularity is undefined on an edgeless graph")]
    EdgelessGraph,
    #[error("graph has {nodes} nodes; exhaustive search is capped at {BRUTE_FORCE_MAX_NODES}")]
    TooManyNodes { nodes: usize },
    #[error("partition covers {partition_nodes} nodes but the graph has {graph_nodes}")]
    PartitionMismatch {
        partition_nodes: usize,
        graph_nodes: usize,
    },
}

/// A node→cluster assignment in canonical form: cluster indices are
/// contiguous from 1, ordered by cluster size descending, ties by smallest
/// member index. Two partitions of the same node set are equal as values
/// exactly when they group nodes identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<u32>,
    cluster_count: u32,
}

impl Partition {
    /// Canonicalizes an arbitrary labeling.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (node, &label) in labels.iter().enumerate() {
            members.entry(label).or_default().push(node);
        }
        let mut clusters: Vec<Vec<usize>> = members.into_values().collect();
        clusters.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut assignment = vec![0u32; labels.len()];
        for (rank, cluster) in clusters.iter().enumerate() {
            for &node in cluster {
                assignment[node] = rank as u32 + 1;
            }
        }
        Partition {
            assignment,
            cluster_count: clusters.len() as u32,
        }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (1..=n as u32).collect(),
            cluster_count: n as u32,
        }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_count(&self) -> u32 {
        self.cluster_count
    }

    /// 1-based cluster index of a node.
    pub fn cluster_of(&self, node: usize) -> u32 {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Members of cluster `c` (1-based), ascending.
    pub fn members(&self, c: u32) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &label)| label == c)
            .map(|(node, _)| node)
            .collect()
    }

    /// All clusters in index order; members ascend within each.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut clusters = vec![Vec::new(); self.cluster_count as usize];
        for (node, &label) in self.assignment.iter().enumerate() {
            clusters[label as usize - 1].push(node);
        }
        clusters
    }
}

/// Newman's Q = Σ_c (e_cc − a_c²): the within-cluster share of edge-end
/// weight minus its expectation under the degree-preserving null model.
pub fn modularity(graph: &WeightedGraph, partition: &Partition) -> Result<f64, ClusterError> {
    if partition.node_count() != graph.node_count() {
        return Err(ClusterError::PartitionMismatch {
            partition_nodes: partition.node_count(),
            graph_nodes: graph.node_count(),
        });
    }
    let labels: Vec<usize> = partition
        .assignment()
        .iter()
        .map(|&c| c as usize - 1)
        .collect();
    q_of_labels(graph, &labels, partition.cluster_count() as usize)
        .ok_or(ClusterError::EdgelessGraph)
}

/// Q for an arbitrary labeling with clusters `0..k`; `None` when the graph
/// carries no weight.
pub(crate) fn q_of_labels(graph: &WeightedGraph, labels: &[usize], k: usize) -> Option<f64> {
    let two_m = graph.total_weight();
    if two_m <= 0.0 {
        return None;
    }
    let mut intra = vec![0.0f64; k];
    let mut degree = vec![0.0f64; k];
    for node in 0..graph.node_count() {
        let c = labels[node];
        degree[c] += graph.degree_weight(node);
        intra[c] += 2.0 * graph.loop_weight(node);
        for (nbr, w) in graph.neighbors(node) {
            if labels[nbr] == c {
                intra[c] += w;
            }
        }
    }
    let mut q = 0.0;
    for c in 0..k {
        let a = degree[c] / two_m;
        q += intra[c] / two_m - a * a;
    }
    Some(q)
}

/// Condensation of a partitioned citation graph. `sizes[c-1]` counts the
/// members of cluster `c`; `edges[(c, d)]` (c < d) counts directed citations
/// crossing between the two clusters, either direction.
///
/// Conservation: Σ edges + intra_edges = |directed edges|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaGraph {
    pub sizes: Vec<usize>,
    pub edges: BTreeMap<(u32, u32), u64>,
    pub intra_edges: u64,
}

impl MetaGraph {
    pub fn total_inter_edges(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Undirected weighted view for layout purposes; node `c-1` stands for
    /// cluster `c`.
    pub fn to_weighted(&self) -> WeightedGraph {
        let mut graph = WeightedGraph::new(self.sizes.len());
        for (&(c, d), &w) in &self.edges {
            graph.add_edge(c as usize - 1, d as usize - 1, w as f64);
        }
        graph
    }
}

pub fn build_metagraph(
    graph: &CitationGraph,
    partition: &Partition,
) -> Result<MetaGraph, ClusterError> {
    if partition.node_count() != graph.node_count() {
        return Err(ClusterError::PartitionMismatch {
            partition_nodes: partition.node_count(),
            graph_nodes: graph.node_count(),
        });
    }
    let mut sizes = vec![0usize; partition.cluster_count() as usize];
    for node in 0..graph.node_count() {
        sizes[partition.cluster_of(node) as usize - 1] += 1;
    }
    let mut edges: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut intra_edges = 0u64;
    for (citing, cited) in graph.directed_edges() {
        let c = partition.cluster_of(citing);
        let d = partition.cluster_of(cited);
        if c == d {
            intra_edges += 1;
        } else {
            *edges.entry((c.min(d), c.max(d))).or_insert(0) += 1;
        }
    }
    Ok(MetaGraph {
        sizes,
        edges,
        intra_edges,
    })
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use crate::graph::WeightedGraph;

    /// Two triangles, optionally joined by a bridge between nodes 2 and 3.
    pub fn triangles(bridged: bool) -> WeightedGraph {
        let mut g = WeightedGraph::new(6);
        for (a, b) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            g.add_edge(a, b, 1.0);
        }
        if bridged {
            g.add_edge(2, 3, 1.0);
        }
        g
    }

    pub fn triangle_partition() -> super::Partition {
        super::Partition::from_labels(&[0, 0, 0, 1, 1, 1])
    }

    /// Ring of `cliques` cliques of size `size`, consecutive cliques joined
    /// by one edge.
    pub fn clique_ring(cliques: usize, size: usize) -> WeightedGraph {
        let n = cliques * size;
        let mut g = WeightedGraph::new(n);
        for c in 0..cliques {
            let base = c * size;
            for i in 0..size {
                for j in (i + 1)..size {
                    g.add_edge(base + i, base + j, 1.0);
                }
            }
            let next_base = ((c + 1) % cliques) * size;
            g.add_edge(base, next_base + 1, 1.0);
        }
        g
    }
}
