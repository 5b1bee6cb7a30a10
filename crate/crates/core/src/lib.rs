//! Citation-network mapping toolkit.
//!
//! The crate ingests a bibliographic corpus, selects the most-cited slice,
//! builds the citation graph among selected papers, clusters it by modularity,
//! classifies clusters by the share of clinical vocabulary in their records,
//! ranks papers by hierarchy and effective degree, and renders the result as
//! an annotated map (SVG), an interchange graph (GraphML), and tabular
//! exports.
//!
//! Modules mirror the pipeline stages and can be used independently; the
//! [`pipeline`] module wires them together end to end behind a single
//! configuration struct.

pub mod centrality;
pub mod clustering;
pub mod corpus;
pub mod fixture;
pub mod graph;
pub mod layout;
pub mod pipeline;
pub mod report;
pub mod semantics;

pub use corpus::{Corpus, PaperId, PaperRecord, TermId};
pub use graph::CitationGraph;
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError};
