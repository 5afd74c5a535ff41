//! Literal–clause graphs.
//!
//! Node layout in the underlying [`Graph`]: literal ids `0..2N` first
//! (`2(var-1) + negated`), then clause `c` at `2N + c`. Literals that never
//! occur stay in the node set as isolated nodes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Cnf, Literal};
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LcgError {
    #[error("edge ({lit}, {clause}) outside a graph with {n_literals} literals and {n_clauses} clauses")]
    EdgeOutOfRange { lit: usize, clause: usize, n_literals: usize, n_clauses: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcgGraph {
    n_vars: usize,
    n_clauses: usize,
    graph: Graph,
}

/// JSON interchange form: `{n_vars, n_clauses, edges: [[lit_id, clause_id], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphExport {
    pub n_vars: usize,
    pub n_clauses: usize,
    pub edges: Vec<[usize; 2]>,
}

pub fn build_lcg(cnf: &Cnf) -> LcgGraph {
    let mut g = LcgGraph::empty(cnf.num_vars(), cnf.num_clauses());
    for (c, clause) in cnf.clauses().iter().enumerate() {
        for lit in clause {
            g.add_edge(lit.id(), c);
        }
    }
    g
}

impl LcgGraph {
    pub fn empty(n_vars: usize, n_clauses: usize) -> Self {
        LcgGraph { n_vars, n_clauses, graph: Graph::new(2 * n_vars + n_clauses) }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_literals(&self) -> usize {
        2 * self.n_vars
    }

    pub fn n_clauses(&self) -> usize {
        self.n_clauses
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn clause_node(&self, clause: usize) -> usize {
        self.n_literals() + clause
    }

    pub fn lit_node(&self, lit: usize) -> usize {
        lit
    }

    pub fn is_literal_node(&self, node: usize) -> bool {
        node < self.n_literals()
    }

    /// Clause index of a clause node.
    pub fn clause_of(&self, node: usize) -> usize {
        debug_assert!(!self.is_literal_node(node));
        node - self.n_literals()
    }

    /// Orders the endpoints of a graph edge as `(literal id, clause id)`.
    pub fn edge_ids(&self, u: usize, v: usize) -> (usize, usize) {
        if self.is_literal_node(u) {
            (u, self.clause_of(v))
        } else {
            (v, self.clause_of(u))
        }
    }

    pub fn literal_degree(&self, lit: usize) -> usize {
        self.graph.degree(lit)
    }

    pub fn clause_degree(&self, clause: usize) -> usize {
        self.graph.degree(self.clause_node(clause))
    }

    pub fn has_edge(&self, lit: usize, clause: usize) -> bool {
        self.graph.has_edge(lit, self.clause_node(clause))
    }

    /// Adds literal `lit` to clause `clause`. Returns false if already present.
    pub fn add_edge(&mut self, lit: usize, clause: usize) -> bool {
        assert!(lit < self.n_literals() && clause < self.n_clauses, "edge out of range");
        let c = self.clause_node(clause);
        self.graph.add_edge(lit, c)
    }

    /// Removes literal `lit` from clause `clause`. Returns false if absent.
    pub fn remove_edge(&mut self, lit: usize, clause: usize) -> bool {
        assert!(lit < self.n_literals() && clause < self.n_clauses, "edge out of range");
        let c = self.clause_node(clause);
        self.graph.remove_edge(lit, c)
    }

    /// Literal ids of a clause, ascending.
    pub fn clause_literals(&self, clause: usize) -> &[usize] {
        self.graph.neighbors(self.clause_node(clause))
    }

    /// All edges as `(literal id, clause id)`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nl = self.n_literals();
        (0..nl)
            .flat_map(|lit| self.graph.neighbors(lit).iter().map(move |&c| (lit, c - nl)))
            .collect()
    }

    /// Checks that every edge joins a literal node to a clause node.
    pub fn is_bipartite(&self) -> bool {
        self.graph.is_bipartite_split(self.n_literals())
    }

    pub fn export(&self) -> GraphExport {
        GraphExport {
            n_vars: self.n_vars,
            n_clauses: self.n_clauses,
            edges: self.edges().into_iter().map(|(l, c)| [l, c]).collect(),
        }
    }

    pub fn from_export(e: &GraphExport) -> Result<Self, LcgError> {
        let mut g = LcgGraph::empty(e.n_vars, e.n_clauses);
        for &[lit, clause] in &e.edges {
            if lit >= g.n_literals() || clause >= g.n_clauses {
                return Err(LcgError::EdgeOutOfRange {
                    lit,
                    clause,
                    n_literals: g.n_literals(),
                    n_clauses: g.n_clauses,
                });
            }
            g.add_edge(lit, clause);
        }
        Ok(g)
    }

    /// Literal of a literal id, for readability at call sites.
    pub fn literal(&self, lit: usize) -> Literal {
        Literal::from_id(lit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Literal as L;

    #[test]
    fn unit_clause_graph() {
        let cnf = Cnf::new(1, vec![vec![L::pos(1)]]).unwrap();
        let g = build_lcg(&cnf);
        assert_eq!(g.n_literals(), 2);
        assert_eq!(g.n_clauses(), 1);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.literal_degree(0), 1);
        assert_eq!(g.literal_degree(1), 0);
        assert_eq!(g.clause_degree(0), 1);
        assert!(g.is_bipartite());
    }

    #[test]
    fn two_clause_degrees() {
        let cnf = Cnf::new(2, vec![vec![L::pos(1), L::neg(2)], vec![L::pos(1), L::pos(2)]]).unwrap();
        let g = build_lcg(&cnf);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.literal_degree(L::pos(1).id()), 2);
        assert_eq!(g.edges(), vec![(0, 0), (0, 1), (2, 1), (3, 0)]);
    }

    #[test]
    fn distances_on_single_edge_and_path() {
        let g = build_lcg(&Cnf::new(1, vec![vec![L::pos(1)]]).unwrap());
        let d = g.graph().bfs_distances(0);
        assert_eq!(d[g.clause_node(0)], Some(1));
        assert_eq!(d[1], None);
        assert!(g.graph().sphere(0, 2).is_empty());

        let g = build_lcg(&Cnf::new(2, vec![vec![L::pos(1), L::pos(2)]]).unwrap());
        assert_eq!(g.graph().bfs_distances(0)[2], Some(2));
    }

    #[test]
    fn export_round_trip() {
        let cnf = Cnf::new(2, vec![vec![L::pos(1), L::neg(2)], vec![L::neg(1)]]).unwrap();
        let g = build_lcg(&cnf);
        let e = g.export();
        assert_eq!(e.edges, vec![[0, 0], [1, 1], [3, 0]]);
        assert_eq!(LcgGraph::from_export(&e).unwrap(), g);
        let bad = GraphExport { n_vars: 1, n_clauses: 1, edges: vec![[2, 0]] };
        assert!(LcgGraph::from_export(&bad).is_err());
    }
}
