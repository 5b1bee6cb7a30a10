//! SVG rendering: the node-link map plus a condensed cluster panel.

use std::fmt::Write;

use crate::clustering::{MetaGraph, Partition};
use crate::graph::CitationGraph;
use crate::semantics::ClusterProfile;

use super::{LayoutError, Rgb};

const NODE_RADIUS: f64 = 4.0;
const META_PANEL_WIDTH: f64 = 400.0;
const META_NODE_MAX_RADIUS: f64 = 30.0;
const META_EDGE_MAX_STROKE: f64 = 5.0;

/// Everything the renderer draws. `profiles` and `cluster_colors` are
/// indexed by cluster label minus one.
pub struct SvgScene<'a> {
    pub graph: &'a CitationGraph,
    pub positions: &'a [(f64, f64)],
    pub node_colors: &'a [Rgb],
    pub partition: &'a Partition,
    pub meta: &'a MetaGraph,
    pub profiles: &'a [ClusterProfile],
    pub cluster_colors: &'a [Rgb],
    pub canvas: (f64, f64),
}

impl SvgScene<'_> {
    fn validate(&self) -> Result<(), LayoutError> {
        let n = self.graph.node_count();
        if self.positions.len() < n {
            return Err(LayoutError::MissingPosition {
                id: self.graph.id(self.positions.len()).to_string(),
            });
        }
        if self.positions.len() > n || self.node_colors.len() != n {
            return Err(LayoutError::Shape(format!(
                "{n} nodes, {} positions, {} colors",
                self.positions.len(),
                self.node_colors.len()
            )));
        }
        if self.partition.assignment().len() != n {
            return Err(LayoutError::Shape(format!(
                "partition covers {} of {n} nodes",
                self.partition.assignment().len()
            )));
        }
        let clusters = self.meta.sizes.len();
        if self.profiles.len() != clusters || self.cluster_colors.len() != clusters {
            return Err(LayoutError::Shape(format!(
                "{clusters} clusters, {} profiles, {} cluster colors",
                self.profiles.len(),
                self.cluster_colors.len()
            )));
        }
        for (i, profile) in self.profiles.iter().enumerate() {
            if profile.cluster as usize != i + 1 {
                return Err(LayoutError::Shape(format!(
                    "profile {i} labeled cluster {}",
                    profile.cluster
                )));
            }
        }
        Ok(())
    }
}

/// Renders the scene to a standalone SVG document. Byte-identical output
/// for identical inputs; the cluster panel appears only when the partition
/// has at least two clusters.
pub fn render_svg(scene: &SvgScene) -> Result<String, LayoutError> {
    scene.validate()?;
    let (width, height) = scene.canvas;
    let with_panel = scene.meta.sizes.len() >= 2;
    let total_width = if with_panel {
        width + META_PANEL_WIDTH
    } else {
        width
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt2(total_width),
        fmt2(height),
        fmt2(total_width),
        fmt2(height)
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
        fmt2(total_width),
        fmt2(height)
    );

    for (citing, cited) in scene.graph.directed_edges() {
        let (x1, y1) = scene.positions[citing];
        let (x2, y2) = scene.positions[cited];
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"0.50\" stroke-opacity=\"0.6\"/>",
            fmt2(x1),
            fmt2(y1),
            fmt2(x2),
            fmt2(y2)
        );
    }
    for node in 0..scene.graph.node_count() {
        let (x, y) = scene.positions[node];
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"#333333\" stroke-width=\"0.30\"><title>{}</title></circle>",
            fmt2(x),
            fmt2(y),
            fmt2(NODE_RADIUS),
            scene.node_colors[node].hex(),
            super::escape_xml(scene.graph.id(node).as_str())
        );
    }

    if with_panel {
        render_meta_panel(&mut out, scene, width, height);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_meta_panel(out: &mut String, scene: &SvgScene, offset_x: f64, height: f64) {
    let clusters = scene.meta.sizes.len();
    let center = (META_PANEL_WIDTH / 2.0, height / 2.0);
    let ring = 0.35 * META_PANEL_WIDTH.min(height);
    let centers: Vec<(f64, f64)> = (0..clusters)
        .map(|i| {
            let angle = -std::f64::consts::FRAC_PI_2
                + 2.0 * std::f64::consts::PI * i as f64 / clusters as f64;
            (
                center.0 + ring * angle.cos(),
                center.1 + ring * angle.sin(),
            )
        })
        .collect();
    let max_size = scene.meta.sizes.iter().copied().max().unwrap_or(1).max(1);
    let radius_scale = META_NODE_MAX_RADIUS / (max_size as f64).sqrt();
    let max_weight = scene.meta.edges.values().copied().max().unwrap_or(0);

    let _ = writeln!(
        out,
        "<g transform=\"translate({},0)\">",
        fmt2(offset_x)
    );
    let _ = writeln!(
        out,
        "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"{}\" stroke=\"#cccccc\" stroke-width=\"1.00\"/>",
        fmt2(height)
    );
    for (&(a, b), &weight) in &scene.meta.edges {
        let (x1, y1) = centers[(a - 1) as usize];
        let (x2, y2) = centers[(b - 1) as usize];
        let stroke = META_EDGE_MAX_STROKE * weight as f64 / max_weight as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#555555\" stroke-width=\"{}\"/>",
            fmt2(x1),
            fmt2(y1),
            fmt2(x2),
            fmt2(y2),
            fmt2(stroke)
        );
    }
    for (i, profile) in scene.profiles.iter().enumerate() {
        let (x, y) = centers[i];
        let radius = radius_scale * (scene.meta.sizes[i] as f64).sqrt();
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"#333333\" stroke-width=\"1.00\"/>",
            fmt2(x),
            fmt2(y),
            fmt2(radius),
            scene.cluster_colors[i].hex()
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">C{} ({}) {}</text>",
            fmt2(x),
            fmt2(y + radius + 14.0),
            profile.cluster,
            scene.meta.sizes[i],
            profile.stage
        );
    }
    out.push_str("</g>\n");
}

fn fmt2(value: f64) -> String {
    format!("{value:.2}")
}
