//! Independent reference implementations used by the integration and
//! acceptance tests. Each one takes the slow, obvious route.
#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use satcurv_core::formula::Cnf;
use satcurv_core::graph::Graph;
use satcurv_core::rng::stream_rng;

/// Dense 0/1 adjacency matrix.
pub fn dense(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Balanced Forman curvature by explicit enumeration of triangles and of
/// 4-cycles `i-k-w-j` without diagonals.
pub fn bfc_brute(g: &Graph, i: usize, j: usize) -> f64 {
    let a = dense(g);
    let n = a.len();
    let deg = |v: usize| a[v].iter().filter(|&&x| x).count();
    let (di, dj) = (deg(i), deg(j));
    if di.min(dj) == 1 {
        return 0.0;
    }
    let triangles = (0..n).filter(|&k| a[i][k] && a[j][k]).count() as f64;
    // cycles[v]: number of diagonal-free 4-cycles through the edge that use v
    // as the neighbor of i (resp. j).
    let mut cyc_i = vec![0usize; n];
    let mut cyc_j = vec![0usize; n];
    for k in 0..n {
        for w in 0..n {
            let distinct = k != i && k != j && w != i && w != j && k != w;
            if distinct && a[i][k] && a[k][w] && a[w][j] && !a[k][j] && !a[i][w] {
                cyc_i[k] += 1;
                cyc_j[w] += 1;
            }
        }
    }
    let sq_i = cyc_i.iter().filter(|&&c| c > 0).count() as f64;
    let sq_j = cyc_j.iter().filter(|&&c| c > 0).count() as f64;
    let gamma = cyc_i.iter().chain(&cyc_j).copied().max().unwrap_or(0) as f64;
    let (dmax, dmin) = (di.max(dj) as f64, di.min(dj) as f64);
    let mut v = 2.0 / di as f64 + 2.0 / dj as f64 - 2.0 + 2.0 * triangles / dmax + triangles / dmin;
    if sq_i + sq_j > 0.0 {
        v += (sq_i + sq_j) / (gamma * dmax);
    }
    v
}

/// Ollivier–Ricci curvature as `1 - W1` with W1 from a dense transport LP
/// over BFS distances.
pub fn orc_lp(g: &Graph, i: usize, j: usize) -> f64 {
    let (ni, nj) = (g.neighbors(i).to_vec(), g.neighbors(j).to_vec());
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let mut vars = vec![];
    for &a in &ni {
        let dist = g.bfs_distances(a);
        vars.push(nj.iter().map(|&b| p.add_var(dist[b].unwrap() as f64, (0.0, f64::INFINITY))).collect::<Vec<_>>());
    }
    for row in &vars {
        let expr: Vec<_> = row.iter().map(|&v| (v, 1.0)).collect();
        p.add_constraint(expr.as_slice(), ComparisonOp::Eq, 1.0 / ni.len() as f64);
    }
    for b in 0..nj.len() {
        let expr: Vec<_> = vars.iter().map(|row| (row[b], 1.0)).collect();
        p.add_constraint(expr.as_slice(), ComparisonOp::Eq, 1.0 / nj.len() as f64);
    }
    1.0 - p.solve().expect("transport LP is feasible").objective()
}

/// Erdős–Rényi graph on `n` nodes with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = stream_rng(seed, 77);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random bipartite graph with sides `left` and `right`.
pub fn random_bipartite(left: usize, right: usize, p: f64, seed: u64) -> Graph {
    let mut rng = stream_rng(seed, 78);
    let mut g = Graph::new(left + right);
    for u in 0..left {
        for v in left..left + right {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random graph whose degrees never exceed `max_deg`.
pub fn random_bounded_degree(n: usize, attempts: usize, max_deg: usize, seed: u64) -> Graph {
    let mut rng = stream_rng(seed, 79);
    let mut g = Graph::new(n);
    for _ in 0..attempts {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v && g.degree(u) < max_deg && g.degree(v) < max_deg {
            g.add_edge(u, v);
        }
    }
    g
}

/// Satisfiability by enumerating all `2^N` assignments as bitmasks.
pub fn brute_force_sat(cnf: &Cnf) -> bool {
    let n = cnf.num_vars();
    assert!(n <= 24, "brute force is for small formulas");
    let masks: Vec<(u32, u32)> = cnf
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(pos, neg), l| {
                let bit = 1u32 << (l.var() - 1);
                if l.is_negated() {
                    (pos, neg | bit)
                } else {
                    (pos | bit, neg)
                }
            })
        })
        .collect();
    (0..1u32 << n).any(|x| masks.iter().all(|&(pos, neg)| (x & pos) != 0 || (!x & neg) != 0))
}
