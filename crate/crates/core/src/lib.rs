//! Ricci curvature of literal–clause graphs of random k-SAT formulas.
//!
//! The crate parses and generates CNF formulas, builds their bipartite
//! literal–clause graphs, computes Balanced Forman and Ollivier–Ricci edge
//! curvature, rewires graphs along their most negatively curved edges, and
//! ships a small DPLL solver for ground-truth labels.

pub mod analysis;
pub mod curvature;
pub mod formula;
pub mod gen;
pub mod graph;
pub mod lcg;
pub mod probe;
pub mod rewire;
pub mod rng;
pub mod solver;
pub mod transport;

pub use curvature::{
    bfc_edge, curvature_report, orc_edge, CurvatureError, CurvatureReport, Measure, Measures,
};
pub use formula::{parse_dimacs, read_dimacs, write_dimacs, Cnf, FormulaError, Literal};
pub use gen::{generate, generate_dataset, GenError, GenSpec, Label, Manifest, Model};
pub use graph::Graph;
pub use lcg::{build_lcg, LcgGraph};
pub use rewire::{rewire, rewired_to_cnf, RewireConfig, RewireTrace};
pub use solver::{solve_dpll, verify, SolveResult, Status};
