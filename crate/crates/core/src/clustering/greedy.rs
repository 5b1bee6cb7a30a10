//! Greedy agglomeration: from singletons, repeatedly merge the connected
//! cluster pair with the largest modularity gain while a positive gain
//! exists. Gains of merging only connected pairs are considered; merging
//! disconnected clusters can never raise Q.

use std::collections::BTreeMap;

use super::Partition;
use crate::graph::WeightedGraph;

pub fn greedy_agglomerative(graph: &WeightedGraph) -> Partition {
    let n = graph.node_count();
    let two_m = graph.total_weight();
    if two_m <= 0.0 {
        return Partition::singletons(n);
    }
    // Clusters are keyed by their smallest original node; merging keeps the
    // smaller key, so tie-breaking on (c, d) pairs is stable over time.
    let mut members: BTreeMap<usize, Vec<usize>> = (0..n).map(|v| (v, vec![v])).collect();
    let mut degree: BTreeMap<usize, f64> = (0..n).map(|v| (v, graph.degree_weight(v))).collect();
    let mut between: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, b, w) in graph.edges() {
        between.insert((a, b), w);
    }
    loop {
        // ΔQ of merging c and d = 2(W_cd/2m − a_c·a_d); first pair in key
        // order wins ties.
        let mut best: Option<((usize, usize), f64)> = None;
        for (&pair, &weight) in &between {
            let gain = 2.0
                * (weight / two_m - degree[&pair.0] * degree[&pair.1] / (two_m * two_m));
            if best.map_or(true, |(_, best_gain)| gain > best_gain) {
                best = Some((pair, gain));
            }
        }
        let Some(((c, d), gain)) = best else {
            break;
        };
        if gain <= 0.0 {
            break;
        }
        let absorbed = members.remove(&d).expect("cluster d is live");
        members.get_mut(&c).expect("cluster c is live").extend(absorbed);
        let absorbed_degree = degree.remove(&d).expect("cluster d is live");
        *degree.get_mut(&c).expect("cluster c is live") += absorbed_degree;
        let stale: Vec<((usize, usize), f64)> = between
            .range((d, 0)..(d + 1, 0))
            .map(|(&p, &w)| (p, w))
            .chain(
                between
                    .iter()
                    .filter(|((_, b), _)| *b == d)
                    .map(|(&p, &w)| (p, w)),
            )
            .collect();
        for (pair, weight) in stale {
            between.remove(&pair);
            let other = if pair.0 == d { pair.1 } else { pair.0 };
            if other == c {
                continue; // the merged edge becomes interior weight
            }
            let key = (other.min(c), other.max(c));
            *between.entry(key).or_insert(0.0) += weight;
        }
    }
    let mut labels = vec![0usize; n];
    for (&rep, cluster) in &members {
        for &node in cluster {
            labels[node] = rep;
        }
    }
    Partition::from_labels(&labels)
}
