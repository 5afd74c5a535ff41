//! Fixtures shared by the criterion benchmarks.

use satcurv_core::gen::{generate, GenSpec, Model};
use satcurv_core::{build_lcg, Cnf, LcgGraph};

/// A fixed-width random formula; the same arguments always give the same formula.
pub fn formula(n_vars: usize, k: usize, alpha: f64, seed: u64) -> Cnf {
    generate(&GenSpec { n_vars, k, alpha, model: Model::FixedK, seed }).expect("valid spec")
}

pub fn graph(n_vars: usize, k: usize, alpha: f64, seed: u64) -> LcgGraph {
    build_lcg(&formula(n_vars, k, alpha, seed))
}
