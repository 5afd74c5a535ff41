//! Edge curvature of literal–clause graphs.

mod bfc;
mod bounds;
mod orc;
mod report;

use thiserror::Error;

pub(crate) use bfc::{assemble, bipartite_cycle_counts};
pub use bfc::{bfc_edge, bfc_terms, bfc_terms_bipartite, BfcTerms};
pub use bounds::{
    bfc_limit, expected_edge_lower_bound, expected_literal_degree, expected_lower_bound, lower_bound,
    orc_lower_bound, upper_bound, DEFAULT_TAIL_TOL,
};
pub use orc::orc_edge;
pub use report::{
    curvature_report, literal_mean_lower_bound, CurvatureMoments, CurvatureReport, EdgeRecord, Measure,
    Measures,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurvatureError {
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("no curvature measure requested")]
    NoMeasures,
    #[error("unknown measure `{0}` (expected bfc, orc, lower, upper)")]
    UnknownMeasure(String),
}
