//! Ollivier–Ricci curvature with uniform neighbor measures.

use super::CurvatureError;
use crate::graph::Graph;
use crate::transport::min_cost_transport;

/// `1 - W1(m_i, m_j)` where `m_v` is uniform on the neighbors of `v` and the
/// ground cost is the shortest-path distance in `g`.
///
/// Any neighbor of `i` is within 3 hops of any neighbor of `j` (through the
/// edge itself), so distances are read off adjacency: 0, 1, 2 (common
/// neighbor) or 3. Masses are scaled by `d_i * d_j` and the transport is
/// solved exactly over the integers.
pub fn orc_edge(g: &Graph, i: usize, j: usize) -> Result<f64, CurvatureError> {
    if i == j || i >= g.node_count() || j >= g.node_count() || !g.has_edge(i, j) {
        return Err(CurvatureError::NotAnEdge(i, j));
    }
    let (ni, nj) = (g.neighbors(i), g.neighbors(j));
    let cost: Vec<Vec<i64>> = ni
        .iter()
        .map(|&a| nj.iter().map(|&b| short_distance(g, a, b)).collect())
        .collect();
    let (di, dj) = (ni.len() as u64, nj.len() as u64);
    let plan = min_cost_transport(&vec![dj; ni.len()], &vec![di; nj.len()], &cost);
    Ok(1.0 - plan.cost as f64 / (di * dj) as f64)
}

/// Exact distance between two nodes known to be at most 3 apart.
fn short_distance(g: &Graph, a: usize, b: usize) -> i64 {
    if a == b {
        0
    } else if g.has_edge(a, b) {
        1
    } else if g.shares_neighbor(a, b) {
        2
    } else {
        3
    }
}
