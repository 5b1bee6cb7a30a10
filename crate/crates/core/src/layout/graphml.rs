//! GraphML export with per-node position, cluster, rate, and score
//! attributes. Edge direction is preserved.

use std::fmt::Write;

use crate::clustering::Partition;
use crate::corpus::Corpus;
use crate::graph::CitationGraph;

use super::{escape_xml, LayoutError};

const NODE_KEYS: &[(&str, &str, &str)] = &[
    ("d0", "x", "double"),
    ("d1", "y", "double"),
    ("d2", "cluster", "int"),
    ("d3", "clinical_rate", "double"),
    ("d4", "hierarchy", "int"),
    ("d5", "effective_degree", "double"),
    ("d6", "year", "int"),
    ("d7", "institution", "string"),
    ("d8", "country", "string"),
];

/// Serializes the graph with node attributes x, y, cluster, clinical_rate,
/// hierarchy, effective_degree, year, and, where known, institution and
/// country. All per-node slices are indexed by graph node.
pub fn export_graphml(
    corpus: &Corpus,
    graph: &CitationGraph,
    positions: &[(f64, f64)],
    partition: &Partition,
    rates: &[f64],
    hierarchy: &[usize],
    effective: &[f64],
) -> Result<String, LayoutError> {
    let n = graph.node_count();
    let check = |len: usize, attribute: &'static str| {
        if len < n {
            Err(LayoutError::MissingAttribute {
                id: graph.id(len).to_string(),
                attribute,
            })
        } else {
            Ok(())
        }
    };
    check(positions.len(), "position")?;
    check(partition.assignment().len(), "cluster")?;
    check(rates.len(), "clinical_rate")?;
    check(hierarchy.len(), "hierarchy")?;
    check(effective.len(), "effective_degree")?;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, name, ty) in NODE_KEYS {
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"node\" attr.name=\"{name}\" attr.type=\"{ty}\"/>"
        );
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");

    for node in 0..n {
        let id = graph.id(node);
        let record = corpus.get(id).ok_or_else(|| LayoutError::MissingAttribute {
            id: id.to_string(),
            attribute: "year",
        })?;
        let _ = writeln!(out, "    <node id=\"{}\">", escape_xml(id.as_str()));
        let (x, y) = positions[node];
        let _ = writeln!(out, "      <data key=\"d0\">{x}</data>");
        let _ = writeln!(out, "      <data key=\"d1\">{y}</data>");
        let _ = writeln!(
            out,
            "      <data key=\"d2\">{}</data>",
            partition.assignment()[node]
        );
        let _ = writeln!(out, "      <data key=\"d3\">{}</data>", rates[node]);
        let _ = writeln!(out, "      <data key=\"d4\">{}</data>", hierarchy[node]);
        let _ = writeln!(out, "      <data key=\"d5\">{}</data>", effective[node]);
        let _ = writeln!(out, "      <data key=\"d6\">{}</data>", record.year);
        if let Some(institution) = &record.institution {
            let _ = writeln!(
                out,
                "      <data key=\"d7\">{}</data>",
                escape_xml(institution)
            );
        }
        if let Some(country) = &record.country {
            let _ = writeln!(out, "      <data key=\"d8\">{}</data>", escape_xml(country));
        }
        out.push_str("    </node>\n");
    }
    for (citing, cited) in graph.directed_edges() {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"/>",
            escape_xml(graph.id(citing).as_str()),
            escape_xml(graph.id(cited).as_str())
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    Ok(out)
}
