//! Citation graph construction, top-cited selection, weak components, and
//! term filtering.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::corpus::{Corpus, PaperId, TermId};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("fraction {0} is outside (0, 1]")]
    FractionOutOfRange(f64),
    #[error("selected paper {0} is not in the reference corpus")]
    NotASubset(PaperId),
}

/// Directed citing→cited graph over a corpus.
///
/// Nodes are indexed by ascending paper id; invariants: no self loops, both
/// endpoints of every edge are nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CitationGraph {
    ids: Vec<PaperId>,
    index: BTreeMap<PaperId, usize>,
    out_edges: Vec<BTreeSet<usize>>,
    in_edges: Vec<BTreeSet<usize>>,
    edge_count: usize,
}

impl CitationGraph {
    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn ids(&self) -> &[PaperId] {
        &self.ids
    }

    pub fn id(&self, node: usize) -> &PaperId {
        &self.ids[node]
    }

    pub fn index_of(&self, id: &PaperId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Nodes cited by `node`.
    pub fn cites(&self, node: usize) -> &BTreeSet<usize> {
        &self.out_edges[node]
    }

    /// Nodes citing `node`.
    pub fn cited_by(&self, node: usize) -> &BTreeSet<usize> {
        &self.in_edges[node]
    }

    /// Directed edges ordered by (citing, cited) node index.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_edges
            .iter()
            .enumerate()
            .flat_map(|(citing, cited)| cited.iter().map(move |&c| (citing, c)))
    }

    /// Weighted undirected view: weight 1 per cited/citing pair, 2 when the
    /// citation is reciprocated.
    pub fn undirected_view(&self) -> WeightedGraph {
        let mut graph = WeightedGraph::new(self.node_count());
        for (citing, cited) in self.directed_edges() {
            graph.add_edge(citing, cited, 1.0);
        }
        graph
    }

    /// `citing<TAB>cited` lines ordered by id.
    pub fn edge_list_text(&self) -> String {
        let mut out = String::new();
        for (citing, cited) in self.directed_edges() {
            out.push_str(self.id(citing).as_str());
            out.push('\t');
            out.push_str(self.id(cited).as_str());
            out.push('\n');
        }
        out
    }
}

/// Builds the graph over the corpus; returns one warning per anachronistic
/// edge (citing paper older than the cited one).
pub fn build_graph(corpus: &Corpus) -> (CitationGraph, Vec<String>) {
    let ids: Vec<PaperId> = corpus.ids().cloned().collect();
    let index: BTreeMap<PaperId, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();
    let mut out_edges = vec![BTreeSet::new(); ids.len()];
    let mut in_edges = vec![BTreeSet::new(); ids.len()];
    let mut edge_count = 0usize;
    let mut warnings = Vec::new();
    for id in &ids {
        let record = corpus.get(id).expect("ids come from the corpus");
        let citing = index[id];
        for cited_id in &record.refs {
            let Some(&cited) = index.get(cited_id) else {
                continue;
            };
            let cited_record = corpus.get(cited_id).expect("refs stay inside the corpus");
            if record.year < cited_record.year {
                warnings.push(format!(
                    "anachronistic citation: {} ({}) cites {} ({})",
                    id, record.year, cited_id, cited_record.year
                ));
            }
            if out_edges[citing].insert(cited) {
                in_edges[cited].insert(citing);
                edge_count += 1;
            }
        }
    }
    (
        CitationGraph {
            ids,
            index,
            out_edges,
            in_edges,
            edge_count,
        },
        warnings,
    )
}

/// Weighted undirected simple graph with optional self-loop weights
/// (self loops arise from cluster coarsening only).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adj: Vec<BTreeMap<usize, f64>>,
    loops: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            adj: vec![BTreeMap::new(); n],
            loops: vec![0.0; n],
        }
    }

    /// Adds weight between `a` and `b`; `a == b` accumulates a self loop.
    pub fn add_edge(&mut self, a: usize, b: usize, weight: f64) {
        if a == b {
            self.loops[a] += weight;
        } else {
            *self.adj[a].entry(b).or_insert(0.0) += weight;
            *self.adj[b].entry(a).or_insert(0.0) += weight;
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Distinct non-loop edges.
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[node].iter().map(|(&n, &w)| (n, w))
    }

    pub fn degree_count(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn loop_weight(&self, node: usize) -> f64 {
        self.loops[node]
    }

    pub fn weight_between(&self, a: usize, b: usize) -> f64 {
        self.adj[a].get(&b).copied().unwrap_or(0.0)
    }

    /// Weighted degree: incident edge weight plus twice the self loop.
    pub fn degree_weight(&self, node: usize) -> f64 {
        self.adj[node].values().sum::<f64>() + 2.0 * self.loops[node]
    }

    /// Total edge-end weight (2m): the sum of all weighted degrees.
    pub fn total_weight(&self) -> f64 {
        (0..self.node_count()).map(|i| self.degree_weight(i)).sum()
    }

    /// Edges as (a, b, weight) with a < b, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, nbrs)| {
                nbrs.iter()
                    .filter(move |(&b, _)| a < b)
                    .map(move |(&b, &w)| (a, b, w))
            })
    }

    /// Subgraph induced by `nodes` (new indices follow `nodes` order).
    /// Self loops are carried over.
    pub fn induced(&self, nodes: &[usize]) -> WeightedGraph {
        let remap: BTreeMap<usize, usize> =
            nodes.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut graph = WeightedGraph::new(nodes.len());
        for (&old, &new) in &remap {
            graph.loops[new] = self.loops[old];
            for (nbr, w) in self.neighbors(old) {
                if let Some(&nbr_new) = remap.get(&nbr) {
                    if new < nbr_new {
                        graph.add_edge(new, nbr_new, w);
                    }
                }
            }
        }
        graph
    }
}

/// Selects `ceil(fraction × n)` papers under (times cited desc, year asc,
/// id asc). With `include_ties`, every paper tied with the cutoff citation
/// count is included as well. The result preserves the selection order.
pub fn select_top_cited(
    corpus: &Corpus,
    fraction: f64,
    include_ties: bool,
) -> Result<Corpus, GraphError> {
    if corpus.is_empty() {
        return Err(GraphError::EmptyCorpus);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(GraphError::FractionOutOfRange(fraction));
    }
    let mut order: Vec<&crate::corpus::PaperRecord> = corpus.records().iter().collect();
    order.sort_by(|a, b| {
        b.times_cited
            .cmp(&a.times_cited)
            .then(a.year.cmp(&b.year))
            .then(a.id.cmp(&b.id))
    });
    let n = order.len();
    // The epsilon guards against 0.2 × 5 ceiling to 2 through float noise.
    let k = ((fraction * n as f64) - 1e-9).ceil() as usize;
    let mut k = k.clamp(1, n);
    if include_ties {
        let cutoff = order[k - 1].times_cited;
        while k < n && order[k].times_cited == cutoff {
            k += 1;
        }
    }
    let ids: Vec<PaperId> = order[..k].iter().map(|r| r.id.clone()).collect();
    Ok(corpus.subset_in_order(&ids))
}

/// Share of index-reported citations captured by `selected`; 0 when the
/// reference corpus has none.
pub fn citation_coverage(selected: &Corpus, corpus: &Corpus) -> Result<f64, GraphError> {
    for id in selected.ids() {
        if !corpus.contains(id) {
            return Err(GraphError::NotASubset(id.clone()));
        }
    }
    let total = corpus.total_citations();
    if total == 0 {
        return Ok(0.0);
    }
    Ok(selected.total_citations() as f64 / total as f64)
}

/// Connected components of the undirected view, ordered by size descending
/// then smallest member; members ascend within each component.
pub fn weak_components(graph: &CitationGraph) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let mut component = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let label = components.len();
        let mut members = vec![start];
        component[start] = label;
        let mut queue = vec![start];
        while let Some(node) = queue.pop() {
            for &next in graph.cites(node).iter().chain(graph.cited_by(node)) {
                if component[next] == usize::MAX {
                    component[next] = label;
                    members.push(next);
                    queue.push(next);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    components
}

/// Keeps papers whose term sets include every required term; references are
/// re-restricted to the survivors.
pub fn filter_by_required_terms(corpus: &Corpus, required: &BTreeSet<TermId>) -> Corpus {
    let ids: Vec<PaperId> = corpus
        .records()
        .iter()
        .filter(|r| required.iter().all(|t| r.terms.contains(t)))
        .map(|r| r.id.clone())
        .collect();
    corpus.subset_in_order(&ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PaperRecord;

    fn record(id: &str, year: i32, cited: u32, refs: &[&str], terms: &[&str]) -> PaperRecord {
        PaperRecord {
            id: id.into(),
            title: format!("title {id}"),
            year,
            times_cited: cited,
            refs: refs.iter().map(|r| PaperId::from(*r)).collect(),
            terms: terms.iter().map(|t| TermId::from(*t)).collect(),
            institution: None,
            country: None,
        }
    }

    fn corpus(records: Vec<PaperRecord>) -> Corpus {
        Corpus::from_records(records).unwrap().0
    }

    #[test]
    fn single_citation_gives_one_directed_edge() {
        let c = corpus(vec![
            record("a", 1990, 0, &[], &[]),
            record("b", 1995, 0, &["a"], &[]),
        ]);
        let (graph, warnings) = build_graph(&c);
        assert!(warnings.is_empty());
        assert_eq!(graph.edge_count(), 1);
        let edges: Vec<_> = graph.directed_edges().collect();
        assert_eq!(edges, vec![(1, 0)]);
        assert_eq!(graph.edge_list_text(), "b\ta\n");
    }

    #[test]
    fn reciprocal_citations_weigh_two_undirected() {
        let c = corpus(vec![
            record("a", 1990, 0, &["b"], &[]),
            record("b", 1990, 0, &["a"], &[]),
        ]);
        let (graph, _) = build_graph(&c);
        assert_eq!(graph.edge_count(), 2);
        let view = graph.undirected_view();
        assert_eq!(view.edge_count(), 1);
        assert_eq!(view.weight_between(0, 1), 2.0);
    }

    #[test]
    fn refless_corpus_builds_an_edgeless_graph() {
        let c = corpus(vec![
            record("a", 1990, 0, &[], &[]),
            record("b", 1991, 0, &[], &[]),
        ]);
        let (graph, _) = build_graph(&c);
        assert_eq!(graph.edge_count(), 0);
        assert_eq!(graph.undirected_view().total_weight(), 0.0);
    }

    #[test]
    fn anachronistic_citation_warns_but_builds() {
        let c = corpus(vec![
            record("old", 1990, 0, &["new"], &[]),
            record("new", 2000, 0, &[], &[]),
        ]);
        let (graph, warnings) = build_graph(&c);
        assert_eq!(graph.edge_count(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("anachronistic"), "{}", warnings[0]);
    }

    fn counted_corpus(counts: &[u32]) -> Corpus {
        corpus(
            counts
                .iter()
                .enumerate()
                .map(|(i, &count)| record(&format!("p{i:02}"), 2000, count, &[], &[]))
                .collect(),
        )
    }

    #[test]
    fn fraction_point_two_of_ten_selects_the_top_two() {
        let c = counted_corpus(&[100, 50, 10, 5, 3, 2, 1, 1, 0, 0]);
        let selected = select_top_cited(&c, 0.2, false).unwrap();
        assert_eq!(selected.len(), 2);
        let mut picked: Vec<u32> = selected.records().iter().map(|r| r.times_cited).collect();
        picked.sort_unstable();
        assert_eq!(picked, vec![50, 100]);
    }

    #[test]
    fn selection_uses_ceiling_and_keeps_order() {
        let c = counted_corpus(&[5, 4, 3, 2, 1]);
        let selected = select_top_cited(&c, 0.5, false).unwrap();
        // ceil(2.5) = 3, ordered by count desc.
        let counts: Vec<u32> = selected.records().iter().map(|r| r.times_cited).collect();
        assert_eq!(counts, vec![5, 4, 3]);
    }

    #[test]
    fn fraction_one_returns_the_whole_corpus() {
        let c = counted_corpus(&[3, 2, 1]);
        let selected = select_top_cited(&c, 1.0, false).unwrap();
        assert_eq!(selected.len(), 3);
    }

    #[test]
    fn ties_at_the_cutoff_break_by_year_then_id() {
        let c = corpus(vec![
            record("late", 2005, 7, &[], &[]),
            record("early", 2001, 7, &[], &[]),
            record("top", 2003, 9, &[], &[]),
            record("least", 2002, 1, &[], &[]),
        ]);
        let selected = select_top_cited(&c, 0.5, false).unwrap();
        let ids: Vec<&str> = selected.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["top", "early"]);
        let with_ties = select_top_cited(&c, 0.5, true).unwrap();
        let ids: Vec<&str> = with_ties.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["top", "early", "late"]);
    }

    #[test]
    fn bad_fractions_are_rejected() {
        let c = counted_corpus(&[1]);
        assert!(matches!(
            select_top_cited(&c, 0.0, false),
            Err(GraphError::FractionOutOfRange(_))
        ));
        assert!(matches!(
            select_top_cited(&c, 1.5, false),
            Err(GraphError::FractionOutOfRange(_))
        ));
        assert!(matches!(
            select_top_cited(&c, f64::NAN, false),
            Err(GraphError::FractionOutOfRange(_))
        ));
        assert!(matches!(
            select_top_cited(&Corpus::default(), 0.5, false),
            Err(GraphError::EmptyCorpus)
        ));
    }

    #[test]
    fn coverage_matches_direct_summation() {
        let c = counted_corpus(&[100, 50, 10, 5, 3, 2, 1, 1, 0, 0]);
        let selected = select_top_cited(&c, 0.2, false).unwrap();
        let coverage = citation_coverage(&selected, &c).unwrap();
        assert!((coverage - 150.0 / 172.0).abs() < 1e-12);
        assert_eq!(citation_coverage(&c, &c).unwrap(), 1.0);
    }

    #[test]
    fn coverage_of_uncited_corpus_is_zero() {
        let c = counted_corpus(&[0, 0]);
        assert_eq!(citation_coverage(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn coverage_rejects_non_subsets() {
        let c = counted_corpus(&[1, 2]);
        let other = corpus(vec![record("zz", 2000, 5, &[], &[])]);
        assert!(matches!(
            citation_coverage(&other, &c),
            Err(GraphError::NotASubset(_))
        ));
    }

    #[test]
    fn two_disjoint_edges_make_two_components() {
        let c = corpus(vec![
            record("a", 1990, 0, &[], &[]),
            record("b", 1995, 0, &["a"], &[]),
            record("c", 1991, 0, &[], &[]),
            record("d", 1996, 0, &["c"], &[]),
        ]);
        let (graph, _) = build_graph(&c);
        let components = weak_components(&graph);
        assert_eq!(components.len(), 2);
        assert!(components.iter().all(|c| c.len() == 2));
        // Tie on size: the component holding the smallest id comes first.
        assert_eq!(graph.id(components[0][0]).as_str(), "a");
    }

    #[test]
    fn edgeless_graph_splits_into_singletons() {
        let c = counted_corpus(&[0, 0, 0]);
        let (graph, _) = build_graph(&c);
        let components = weak_components(&graph);
        assert_eq!(components.len(), 3);
        assert!(components.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn components_are_ordered_by_size_desc() {
        let c = corpus(vec![
            record("a", 1990, 0, &[], &[]),
            record("b", 1995, 0, &["a"], &[]),
            record("c", 1996, 0, &["a"], &[]),
            record("x", 1991, 0, &[], &[]),
            record("y", 1997, 0, &["x"], &[]),
        ]);
        let (graph, _) = build_graph(&c);
        let components = weak_components(&graph);
        assert_eq!(components.len(), 2);
        assert_eq!(components[0].len(), 3);
        assert_eq!(components[1].len(), 2);
    }

    #[test]
    fn empty_required_set_keeps_everything() {
        let c = counted_corpus(&[1, 2]);
        let filtered = filter_by_required_terms(&c, &BTreeSet::new());
        assert_eq!(filtered, c);
    }

    #[test]
    fn filtering_removes_inbound_references_too() {
        let c = corpus(vec![
            record("a", 1990, 0, &[], &["keep"]),
            record("b", 1995, 0, &["a"], &[]),
            record("c", 1996, 0, &["a", "b"], &["keep"]),
        ]);
        let required: BTreeSet<TermId> = ["keep".into()].into();
        let filtered = filter_by_required_terms(&c, &required);
        assert_eq!(filtered.len(), 2);
        assert!(filtered.get(&"b".into()).is_none());
        assert_eq!(
            filtered.get(&"c".into()).unwrap().refs,
            BTreeSet::from(["a".into()])
        );
    }

    #[test]
    fn induced_subgraph_keeps_weights() {
        let mut g = WeightedGraph::new(4);
        g.add_edge(0, 1, 2.0);
        g.add_edge(1, 2, 1.0);
        g.add_edge(2, 3, 1.0);
        let sub = g.induced(&[1, 2]);
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.weight_between(0, 1), 1.0);
        assert_eq!(sub.degree_weight(0), 1.0);
    }
}
