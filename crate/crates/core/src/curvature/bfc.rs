//! Balanced Forman curvature.
//!
//! For an edge `i ~ j` with degrees `d_i`, `d_j` the curvature is zero when
//! `min(d_i, d_j) = 1`, otherwise
//!
//! ```text
//! 2/d_i + 2/d_j - 2 + 2 T / max(d) + T / min(d) + (S_i + S_j) / (gamma_max * max(d))
//! ```
//!
//! where `T` counts triangles on the edge, `S_i` counts neighbors `k` of `i`
//! (not adjacent to `j`) that close a diagonal-free 4-cycle `i-k-w-j`, and
//! `gamma_max` is the largest number of such cycles through a single node.

use serde::{Deserialize, Serialize};

use super::CurvatureError;
use crate::graph::{merge_common, Graph};

/// BFC of one edge together with the combinatorial counts behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BfcTerms {
    pub value: f64,
    pub triangles: usize,
    pub sq_i: usize,
    pub sq_j: usize,
    pub gamma_max: usize,
}

/// BFC of edge `(i, j)` on any simple graph.
pub fn bfc_edge(g: &Graph, i: usize, j: usize) -> Result<f64, CurvatureError> {
    bfc_terms(g, i, j).map(|t| t.value)
}

/// Full-formula BFC with its counts.
pub fn bfc_terms(g: &Graph, i: usize, j: usize) -> Result<BfcTerms, CurvatureError> {
    if i == j || i >= g.node_count() || j >= g.node_count() || !g.has_edge(i, j) {
        return Err(CurvatureError::NotAnEdge(i, j));
    }
    let triangles = g.common_neighbor_count(i, j);
    let (sq_i, gi) = square_side(g, i, j, false);
    let (sq_j, gj) = square_side(g, j, i, false);
    Ok(assemble(g.degree(i), g.degree(j), triangles, sq_i, sq_j, gi.max(gj)))
}

/// Triangle-free fast path; only valid on bipartite graphs.
///
/// On a bipartite graph no neighbor of `i` is adjacent to `j` and no
/// common neighbor of `k` and `j` is adjacent to `i`, so the per-node cycle
/// count reduces to `|N(k) ∩ N(j)| - 1` (the `-1` removes `i` itself).
pub fn bfc_terms_bipartite(g: &Graph, i: usize, j: usize) -> Result<BfcTerms, CurvatureError> {
    if i == j || i >= g.node_count() || j >= g.node_count() || !g.has_edge(i, j) {
        return Err(CurvatureError::NotAnEdge(i, j));
    }
    let (sq_i, gi) = square_side(g, i, j, true);
    let (sq_j, gj) = square_side(g, j, i, true);
    Ok(assemble(g.degree(i), g.degree(j), 0, sq_i, sq_j, gi.max(gj)))
}

/// On a bipartite graph, the 4-cycle count `|N(k) ∩ N(other)| - 1` of every
/// neighbor `k != other` of `base`, in neighbor order.
pub(crate) fn bipartite_cycle_counts(g: &Graph, base: usize, other: usize) -> Vec<(usize, usize)> {
    g.neighbors(base)
        .iter()
        .filter(|&&k| k != other)
        .map(|&k| (k, g.common_neighbor_count(k, other) - 1))
        .collect()
}

/// Counts members of the 4-cycle set on `base`'s side of `base ~ other`, and
/// the largest per-member cycle count.
fn square_side(g: &Graph, base: usize, other: usize, bipartite: bool) -> (usize, usize) {
    let n_base = g.neighbors(base);
    let n_other = g.neighbors(other);
    let mut members = 0;
    let mut gamma = 0;
    for &k in n_base {
        if k == other {
            continue;
        }
        let cycles = if bipartite {
            g.common_neighbor_count(k, other) - 1
        } else {
            if n_other.binary_search(&k).is_ok() {
                continue;
            }
            let mut c = 0;
            merge_common(g.neighbors(k), n_other, |w| {
                if w != base && n_base.binary_search(&w).is_err() {
                    c += 1;
                }
            });
            c
        };
        if cycles > 0 {
            members += 1;
            gamma = gamma.max(cycles);
        }
    }
    (members, gamma)
}

pub(crate) fn assemble(di: usize, dj: usize, triangles: usize, sq_i: usize, sq_j: usize, gamma: usize) -> BfcTerms {
    let (dmax, dmin) = (di.max(dj) as f64, di.min(dj) as f64);
    let value = if di.min(dj) == 1 {
        0.0
    } else {
        let t = triangles as f64;
        let mut v = 2.0 / di as f64 + 2.0 / dj as f64 - 2.0 + 2.0 * t / dmax + t / dmin;
        if sq_i + sq_j > 0 {
            // gamma >= 1 whenever a 4-cycle member exists; clamp for safety.
            v += (sq_i + sq_j) as f64 / (gamma.max(1) as f64 * dmax);
        }
        v
    };
    BfcTerms { value, triangles, sq_i, sq_j, gamma_max: gamma }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    #[test]
    fn star_edge_is_flat() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        assert_eq!(bfc_edge(&g, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn triangle_edge() {
        let t = bfc_terms(&cycle(3), 0, 1).unwrap();
        assert_eq!(t.triangles, 1);
        assert_eq!(t.value, 1.5);
    }

    #[test]
    fn four_cycle_edge() {
        let g = cycle(4);
        let t = bfc_terms(&g, 0, 1).unwrap();
        assert_eq!((t.triangles, t.sq_i, t.sq_j, t.gamma_max), (0, 1, 1, 1));
        assert_eq!(t.value, 1.0);
        assert_eq!(bfc_terms_bipartite(&g, 0, 1).unwrap(), t);
    }

    #[test]
    fn long_cycles_are_flat() {
        for n in 5..9 {
            assert_eq!(bfc_edge(&cycle(n), 0, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn not_an_edge() {
        let g = cycle(4);
        assert_eq!(bfc_edge(&g, 0, 2), Err(CurvatureError::NotAnEdge(0, 2)));
        assert_eq!(bfc_edge(&g, 0, 9), Err(CurvatureError::NotAnEdge(0, 9)));
    }

    #[test]
    fn symmetric_in_endpoints() {
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (4, 5), (5, 0), (2, 4)]);
        for (u, v) in g.edges() {
            assert_eq!(bfc_edge(&g, u, v).unwrap(), bfc_edge(&g, v, u).unwrap());
        }
    }
}
