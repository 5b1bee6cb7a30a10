//! Seeded multilevel transfer optimization: sweep nodes in shuffled order,
//! moving each to the neighboring cluster with the best positive modularity
//! gain, then coarsen clusters to single nodes and repeat on the condensed
//! graph until a level stops improving.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Partition;
use crate::graph::WeightedGraph;

/// Safety valve; local moves converge in a handful of sweeps in practice.
const MAX_SWEEPS_PER_LEVEL: usize = 200;

/// Local-move phase. Visits nodes in `order`, repeatedly, until a full sweep
/// makes no move; returns the raw cluster labels (initially one node per
/// cluster, labeled by node index).
///
/// A node moves only for a strictly positive gain; among equal-gain targets
/// the smallest cluster label wins, and staying put beats any tie with the
/// current cluster.
pub fn transfer_phase(graph: &WeightedGraph, order: &[usize]) -> Vec<usize> {
    let n = graph.node_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let two_m = graph.total_weight();
    if two_m <= 0.0 {
        return labels;
    }
    let k: Vec<f64> = (0..n).map(|v| graph.degree_weight(v)).collect();
    let mut sigma: Vec<f64> = k.clone();
    for _ in 0..MAX_SWEEPS_PER_LEVEL {
        let mut moved = false;
        for &v in order {
            let a = labels[v];
            sigma[a] -= k[v];
            let mut weight_to: BTreeMap<usize, f64> = BTreeMap::new();
            for (nbr, w) in graph.neighbors(v) {
                *weight_to.entry(labels[nbr]).or_insert(0.0) += w;
            }
            // score(c) is ΔQ of inserting v into c, rescaled by m > 0.
            let score = |c: usize, w: f64| w - k[v] * sigma[c] / two_m;
            let mut best_score = score(a, weight_to.get(&a).copied().unwrap_or(0.0));
            let mut best = a;
            for (&c, &w) in &weight_to {
                if c == a {
                    continue;
                }
                let s = score(c, w);
                if s > best_score {
                    best_score = s;
                    best = c;
                }
            }
            labels[v] = best;
            sigma[best] += k[v];
            moved |= best != a;
        }
        if !moved {
            break;
        }
    }
    labels
}

/// Condenses each cluster of `labels` to one node. Edge weights between
/// clusters are summed; each coarse node carries a self loop equal to its
/// cluster's interior pair weight plus inherited loops, which keeps Q
/// invariant. Returns the coarse graph and the node→coarse-index map
/// (coarse indices follow ascending cluster label).
pub fn coarsen(graph: &WeightedGraph, labels: &[usize]) -> (WeightedGraph, Vec<usize>) {
    let distinct: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
    let rank: BTreeMap<usize, usize> = distinct
        .into_iter()
        .enumerate()
        .map(|(rank, label)| (label, rank))
        .collect();
    let map: Vec<usize> = labels.iter().map(|l| rank[l]).collect();
    let mut coarse = WeightedGraph::new(rank.len());
    for node in 0..graph.node_count() {
        let c = map[node];
        let carried = graph.loop_weight(node);
        if carried != 0.0 {
            coarse.add_edge(c, c, carried);
        }
        for (nbr, w) in graph.neighbors(node) {
            if nbr > node {
                coarse.add_edge(c, map[nbr], w);
            }
        }
    }
    (coarse, map)
}

pub fn multilevel_transfer(graph: &WeightedGraph, seed: u64) -> Partition {
    let n = graph.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = graph.clone();
    let mut node_to_coarse: Vec<usize> = (0..n).collect();
    loop {
        let mut order: Vec<usize> = (0..current.node_count()).collect();
        order.shuffle(&mut rng);
        let labels = transfer_phase(&current, &order);
        let (coarse, map) = coarsen(&current, &labels);
        if coarse.node_count() == current.node_count() {
            break; // no move happened at this level
        }
        for entry in &mut node_to_coarse {
            *entry = map[*entry];
        }
        if coarse.node_count() == 1 {
            break;
        }
        current = coarse;
    }
    Partition::from_labels(&node_to_coarse)
}
