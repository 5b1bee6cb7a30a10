//! Exhaustive modularity maximization over all set partitions, for small
//! graphs. Serves as the ground-truth oracle for the heuristic optimizers.

use super::{ClusterError, Partition};
use crate::graph::WeightedGraph;

pub const BRUTE_FORCE_MAX_NODES: usize = 12;

/// Enumerates every partition (restricted growth strings) and returns the
/// maximum-Q one; exact ties resolve to the lexicographically smallest
/// canonical assignment.
pub fn brute_force_best_partition(
    graph: &WeightedGraph,
) -> Result<(Partition, f64), ClusterError> {
    let n = graph.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(ClusterError::TooManyNodes { nodes: n });
    }
    let two_m = graph.total_weight();
    if two_m <= 0.0 {
        return Err(ClusterError::EdgelessGraph);
    }
    let mut search = Search {
        graph,
        two_m,
        labels: vec![0; n],
        intra: vec![0.0; n],
        degree: vec![0.0; n],
        best_q: f64::NEG_INFINITY,
        best: None,
    };
    search.recurse(0, 0);
    let best = search.best.expect("at least one partition was scored");
    Ok((best, search.best_q))
}

struct Search<'g> {
    graph: &'g WeightedGraph,
    two_m: f64,
    labels: Vec<usize>,
    /// Per cluster: Σ_{i≠j} A_ij over members plus 2·loops (running).
    intra: Vec<f64>,
    degree: Vec<f64>,
    best_q: f64,
    best: Option<Partition>,
}

impl Search<'_> {
    fn recurse(&mut self, node: usize, used: usize) {
        let n = self.graph.node_count();
        if node == n {
            let mut q = 0.0;
            for c in 0..used {
                let a = self.degree[c] / self.two_m;
                q += self.intra[c] / self.two_m - a * a;
            }
            if q > self.best_q {
                self.best_q = q;
                self.best = Some(Partition::from_labels(&self.labels));
            } else if q == self.best_q {
                let candidate = Partition::from_labels(&self.labels);
                let incumbent = self.best.as_ref().expect("set when best_q was set");
                if candidate.assignment() < incumbent.assignment() {
                    self.best = Some(candidate);
                }
            }
            return;
        }
        let k_v = self.graph.degree_weight(node);
        let loop_v = 2.0 * self.graph.loop_weight(node);
        let mut weight_to = vec![0.0f64; used + 1];
        for (nbr, w) in self.graph.neighbors(node) {
            if nbr < node {
                weight_to[self.labels[nbr]] += w;
            }
        }
        for c in 0..=used {
            let delta_intra = 2.0 * weight_to[c] + loop_v;
            self.labels[node] = c;
            self.intra[c] += delta_intra;
            self.degree[c] += k_v;
            self.recurse(node + 1, used.max(c + 1));
            self.intra[c] -= delta_intra;
            self.degree[c] -= k_v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_graphs::{triangle_partition, triangles};
    use super::super::{modularity, Partition};
    use super::*;

    #[test]
    fn single_edge_peak_is_one_cluster_at_zero() {
        let mut g = WeightedGraph::new(2);
        g.add_edge(0, 1, 1.0);
        let (p, q) = brute_force_best_partition(&g).unwrap();
        assert_eq!(p.cluster_count(), 1);
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn disjoint_triangles_peak_at_one_half() {
        let (p, q) = brute_force_best_partition(&triangles(false)).unwrap();
        assert_eq!(p, triangle_partition());
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bridged_triangles_peak_at_five_fourteenths() {
        let (p, q) = brute_force_best_partition(&triangles(true)).unwrap();
        assert_eq!(p, triangle_partition());
        assert!((q - 5.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn path_of_three_peak_is_the_single_cluster() {
        let mut g = WeightedGraph::new(3);
        g.add_edge(0, 1, 1.0);
        g.add_edge(1, 2, 1.0);
        // By direct evaluation over the 5 partitions of a 3-set, the best Q
        // is 0, attained by the whole path in one cluster.
        let (p, q) = brute_force_best_partition(&g).unwrap();
        assert_eq!(p.cluster_count(), 1);
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn reported_q_matches_independent_recomputation() {
        let g = triangles(true);
        let (p, q) = brute_force_best_partition(&g).unwrap();
        let recomputed = modularity(&g, &p).unwrap();
        assert!((q - recomputed).abs() < 1e-12);
    }

    #[test]
    fn node_cap_is_enforced() {
        let mut g = WeightedGraph::new(13);
        g.add_edge(0, 1, 1.0);
        assert!(matches!(
            brute_force_best_partition(&g),
            Err(ClusterError::TooManyNodes { nodes: 13 })
        ));
    }

    #[test]
    fn edgeless_graph_is_rejected() {
        let g = WeightedGraph::new(2);
        assert!(matches!(
            brute_force_best_partition(&g),
            Err(ClusterError::EdgelessGraph)
        ));
    }

    #[test]
    fn two_disjoint_edges_peak_at_the_pairing() {
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, 1.0);
        g.add_edge(2, 3, 1.0);
        let (p, q) = brute_force_best_partition(&g).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        assert_eq!(p, Partition::from_labels(&[0, 0, 1, 1]));
    }

    #[test]
    fn exact_q_ties_pick_the_lexicographically_smallest_partition() {
        // On a 4-cycle the maximum Q is exactly 0, attained by the whole
        // graph and by both opposite-edge pairings; the all-ones assignment
        // is the lexicographically smallest of those.
        let mut g = WeightedGraph::new(4);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            g.add_edge(a, b, 1.0);
        }
        let (p, q) = brute_force_best_partition(&g).unwrap();
        assert!(q.abs() < 1e-15);
        assert_eq!(p, Partition::from_labels(&[0, 0, 0, 0]));
    }
}
