//! Simple undirected graphs with sorted adjacency lists.

use std::collections::VecDeque;

/// Simple undirected graph on nodes `0..n`.
///
/// Neighbor lists are kept sorted so that set intersections are linear merges
/// and membership is a binary search.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edges: 0 }
    }

    /// Builds a graph from an edge list, ignoring self loops and repeats.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            if u != v {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Inserts `{u, v}`. Returns false if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v, "self loops are not allowed");
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edges += 1;
                true
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        match self.adj[u].binary_search(&v) {
            Ok(pos) => {
                self.adj[u].remove(pos);
                let pos = self.adj[v].binary_search(&u).expect("adjacency is symmetric");
                self.adj[v].remove(pos);
                self.edges -= 1;
                true
            }
            Err(_) => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Unweighted shortest-path distances from `source`; `None` means unreachable.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        self.bfs_within(source, usize::MAX)
    }

    /// Like [`Graph::bfs_distances`] but stops expanding past `radius`.
    pub fn bfs_within(&self, source: usize, radius: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du >= radius {
                continue;
            }
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Nodes at distance exactly `r` from `node`, ascending.
    pub fn sphere(&self, node: usize, r: usize) -> Vec<usize> {
        self.bfs_within(node, r)
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == Some(r))
            .map(|(v, _)| v)
            .collect()
    }

    /// Nodes at distance at most `r` from `node`, ascending.
    pub fn ball(&self, node: usize, r: usize) -> Vec<usize> {
        self.bfs_within(node, r)
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_some())
            .map(|(v, _)| v)
            .collect()
    }

    /// Number of common neighbors of `u` and `v`.
    pub fn common_neighbor_count(&self, u: usize, v: usize) -> usize {
        let mut n = 0;
        merge_common(&self.adj[u], &self.adj[v], |_| n += 1);
        n
    }

    /// Whether `u` and `v` share at least one neighbor.
    pub fn shares_neighbor(&self, u: usize, v: usize) -> bool {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_bipartite_split(&self, left: usize) -> bool {
        self.edges().all(|(u, v)| (u < left) != (v < left))
    }
}

/// Calls `f` on every element common to two sorted slices.
pub(crate) fn merge_common(a: &[usize], b: &[usize], mut f: impl FnMut(usize)) {
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                f(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
}
