//! Curvature-guided stochastic rewiring of literal–clause graphs.
//!
//! Each iteration targets the edge `(i, j)` with the most negative Balanced
//! Forman curvature and adds one edge `(k, l)` with `k` a clause of literal
//! `i` and `l` a literal of clause `j`, closing a new 4-cycle `i-k-l-j`.
//! With probability `p` the new edge is drawn uniformly from the candidates;
//! otherwise the candidate that most increases the curvature of `(i, j)` is
//! taken. Additions only ever join a literal to a clause, so the graph stays
//! bipartite, and every clause only gains literals.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{assemble, bfc_terms_bipartite, bipartite_cycle_counts};
use crate::formula::{Cnf, FormulaError, Literal};
use crate::lcg::LcgGraph;
use crate::rng::stream_rng;

#[derive(Debug, Error, PartialEq)]
pub enum RewireError {
    #[error("invalid rewiring config: {0}")]
    InvalidConfig(String),
    #[error("graph has an edge inside one side of the literal/clause partition")]
    BipartitenessViolated,
    #[error("graph has {got_vars} variables and {got_clauses} clauses, formula has {want_vars} and {want_clauses}")]
    ShapeMismatch { got_vars: usize, got_clauses: usize, want_vars: usize, want_clauses: usize },
    #[error("clause {clause} lost literal {literal}; the graph must contain every original edge")]
    NotSupergraph { clause: usize, literal: i64 },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Which curvatures are refreshed after an edge is added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateScope {
    /// Exactly the edges whose curvature can change: those incident to `k` or
    /// `l`, and those joining `N(k)` to `N(l)`. A subset of the radius-2 ball.
    #[default]
    Affected,
    /// Every edge reachable by a walk of at most `recompute_radius` steps
    /// from an endpoint of the new edge. A new edge `(k, l)` only changes the
    /// curvature of edges with an endpoint in `N[k]` or `N[l]`, which is
    /// exactly radius 2; radius 1 would miss some.
    Ball,
    /// Only the targeted edge and the new edge; other values may go stale.
    Endpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewireConfig {
    /// Number of iterations; `None` means `ceil(0.2 |E|)`.
    pub iterations: Option<usize>,
    /// Probability of taking a uniformly random candidate instead of the best one.
    pub random_prob: f64,
    pub seed: u64,
    pub recompute_radius: usize,
    pub update_scope: UpdateScope,
}

impl Default for RewireConfig {
    fn default() -> Self {
        RewireConfig { iterations: None, random_prob: 0.3, seed: 0, recompute_radius: 2, update_scope: UpdateScope::Affected }
    }
}

impl RewireConfig {
    pub fn resolved_iterations(&self, edge_count: usize) -> usize {
        self.iterations.unwrap_or_else(|| default_iterations(edge_count))
    }

    pub fn validate(&self) -> Result<(), RewireError> {
        if !(0.0..=1.0).contains(&self.random_prob) {
            return Err(RewireError::InvalidConfig(format!("random_prob {} outside [0, 1]", self.random_prob)));
        }
        if self.update_scope == UpdateScope::Ball && self.recompute_radius < 2 {
            return Err(RewireError::InvalidConfig("recompute_radius below 2 leaves stale curvatures".into()));
        }
        Ok(())
    }
}

/// `ceil(0.2 |E|)`.
pub fn default_iterations(edge_count: usize) -> usize {
    edge_count.div_ceil(5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewireMode {
    Random,
    Greedy,
}

/// One applied addition. Edges are `(literal id, clause id)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewireStep {
    pub iteration: usize,
    pub target_edge: (usize, usize),
    pub chosen_edge: (usize, usize),
    pub mode: RewireMode,
    /// Curvature of the target edge after the addition minus before.
    pub delta: f64,
    pub mean_bfc_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewireTrace {
    pub iterations: usize,
    pub records: Vec<RewireStep>,
    /// Iterations that added nothing: `skipped_empty + skipped_nonimproving`.
    pub skipped_count: usize,
    /// Target edge had no candidate.
    pub skipped_empty: usize,
    /// Greedy branch whose best candidate would lower the target's curvature.
    pub skipped_nonimproving: usize,
    pub initial_mean_bfc: Option<f64>,
    pub final_mean_bfc: Option<f64>,
}

/// Total order on (curvature, lit, clause) for the most-negative queue.
#[derive(Debug, Clone, Copy)]
struct Key(f64, usize, usize);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1)).then(self.2.cmp(&other.2))
    }
}

/// Edge curvatures kept in sync with a mutating graph.
struct CurvatureState {
    values: BTreeMap<(usize, usize), f64>,
    queue: BTreeSet<Key>,
}

impl CurvatureState {
    fn new(g: &LcgGraph) -> Self {
        let mut s = CurvatureState { values: BTreeMap::new(), queue: BTreeSet::new() };
        for (lit, clause) in g.edges() {
            s.refresh(g, lit, clause);
        }
        s
    }

    fn refresh(&mut self, g: &LcgGraph, lit: usize, clause: usize) {
        let v = edge_bfc(g, lit, clause);
        if let Some(old) = self.values.insert((lit, clause), v) {
            self.queue.remove(&Key(old, lit, clause));
        }
        self.queue.insert(Key(v, lit, clause));
    }

    fn most_negative(&self) -> Option<Key> {
        self.queue.first().copied()
    }

    fn mean(&self) -> Option<f64> {
        (!self.values.is_empty()).then(|| self.values.values().sum::<f64>() / self.values.len() as f64)
    }
}

fn edge_bfc(g: &LcgGraph, lit: usize, clause: usize) -> f64 {
    bfc_terms_bipartite(g.graph(), lit, g.clause_node(clause)).expect("edge exists").value
}

/// Candidate additions for target `(lit, clause)`, sorted by `(lit, clause)`.
fn candidates(g: &LcgGraph, lit: usize, clause: usize) -> Vec<(usize, usize)> {
    let graph = g.graph();
    let j = g.clause_node(clause);
    let mut out = Vec::new();
    for &k in graph.neighbors(lit) {
        if k == j {
            continue;
        }
        for &l in graph.neighbors(j) {
            if l != lit && !graph.has_edge(l, k) {
                out.push((l, g.clause_of(k)));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Curvature of a target edge `(i, j)` under each single candidate addition.
///
/// Adding `(l, k)` with `k ∈ N(i)` and `l ∈ N(j)` leaves both endpoint
/// degrees unchanged and raises exactly two 4-cycle counts by one: that of
/// `k` towards `j` and that of `l` towards `i`. Every candidate is therefore
/// scored in O(log d) from the counts of the current graph.
struct TargetProfile {
    di: usize,
    dj: usize,
    sq_i: usize,
    sq_j: usize,
    gamma: usize,
    cycles_i: Vec<(usize, usize)>,
    cycles_j: Vec<(usize, usize)>,
}

impl TargetProfile {
    fn new(g: &LcgGraph, lit: usize, clause: usize) -> Self {
        let graph = g.graph();
        let j = g.clause_node(clause);
        let cycles_i = bipartite_cycle_counts(graph, lit, j);
        let cycles_j = bipartite_cycle_counts(graph, j, lit);
        let side = |c: &[(usize, usize)]| c.iter().filter(|x| x.1 > 0).count();
        let gamma = cycles_i.iter().chain(&cycles_j).map(|x| x.1).max().unwrap_or(0);
        TargetProfile {
            di: graph.degree(lit),
            dj: graph.degree(j),
            sq_i: side(&cycles_i),
            sq_j: side(&cycles_j),
            gamma,
            cycles_i,
            cycles_j,
        }
    }

    /// Curvature after adding literal node `l` to clause node `k`.
    fn after(&self, l: usize, k: usize) -> f64 {
        let count = |c: &[(usize, usize)], v: usize| c[c.binary_search_by_key(&v, |x| x.0).expect("neighbor")].1;
        let (ck, cl) = (count(&self.cycles_i, k), count(&self.cycles_j, l));
        let sq_i = self.sq_i + usize::from(ck == 0);
        let sq_j = self.sq_j + usize::from(cl == 0);
        assemble(self.di, self.dj, 0, sq_i, sq_j, self.gamma.max(ck + 1).max(cl + 1)).value
    }
}

/// Runs the rewiring loop on a copy of `g`.
///
/// Graphs without edges, or zero iterations, come back unchanged with an
/// empty trace.
pub fn rewire(g: &LcgGraph, cfg: &RewireConfig) -> Result<(LcgGraph, RewireTrace), RewireError> {
    cfg.validate()?;
    let mut g = g.clone();
    let iterations = cfg.resolved_iterations(g.edge_count());
    let mut state = CurvatureState::new(&g);
    let initial_mean_bfc = state.mean();
    let mut trace = RewireTrace {
        iterations,
        records: Vec::new(),
        skipped_count: 0,
        skipped_empty: 0,
        skipped_nonimproving: 0,
        initial_mean_bfc,
        final_mean_bfc: initial_mean_bfc,
    };
    let mut rng = stream_rng(cfg.seed, 0);

    for iteration in 0..iterations {
        let Some(Key(ric, lit, clause)) = state.most_negative() else { break };
        let target = (lit, clause);
        let cands = candidates(&g, lit, clause);
        if cands.is_empty() {
            trace.skipped_empty += 1;
            continue;
        }
        let profile = TargetProfile::new(&g, lit, clause);
        let score = |c: (usize, usize)| profile.after(c.0, g.clause_node(c.1));
        let (mode, chosen, ric_after) = if rng.random_bool(cfg.random_prob) {
            let c = cands[rng.random_range(0..cands.len())];
            (RewireMode::Random, c, score(c))
        } else {
            let mut best = (cands[0], score(cands[0]));
            for &c in &cands[1..] {
                let v = score(c);
                if v > best.1 {
                    best = (c, v);
                }
            }
            if best.1 < ric {
                trace.skipped_nonimproving += 1;
                continue;
            }
            (RewireMode::Greedy, best.0, best.1)
        };

        g.add_edge(chosen.0, chosen.1);
        refresh_around(&mut state, &g, cfg, target, chosen);
        debug_assert_eq!(state.values[&target], ric_after, "candidate score disagrees with recompute");
        trace.records.push(RewireStep {
            iteration,
            target_edge: target,
            chosen_edge: chosen,
            mode,
            delta: ric_after - ric,
            mean_bfc_after: state.mean().expect("graph has edges"),
        });
    }

    if !g.is_bipartite() {
        return Err(RewireError::BipartitenessViolated);
    }
    trace.skipped_count = trace.skipped_empty + trace.skipped_nonimproving;
    trace.final_mean_bfc = state.mean();
    Ok((g, trace))
}

fn refresh_around(
    state: &mut CurvatureState,
    g: &LcgGraph,
    cfg: &RewireConfig,
    target: (usize, usize),
    added: (usize, usize),
) {
    match cfg.update_scope {
        UpdateScope::Endpoints => {
            state.refresh(g, target.0, target.1);
            state.refresh(g, added.0, added.1);
        }
        UpdateScope::Affected => {
            let graph = g.graph();
            let (l, k) = (added.0, g.clause_node(added.1));
            let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
            edges.extend(graph.neighbors(l).iter().map(|&c| g.edge_ids(l, c)));
            edges.extend(graph.neighbors(k).iter().map(|&x| g.edge_ids(x, k)));
            let n_l = graph.neighbors(l);
            for &x in graph.neighbors(k) {
                crate::graph::merge_common(graph.neighbors(x), n_l, |c| {
                    edges.insert(g.edge_ids(x, c));
                });
            }
            for (lit, clause) in edges {
                state.refresh(g, lit, clause);
            }
        }
        UpdateScope::Ball => {
            let graph = g.graph();
            let r = cfg.recompute_radius - 1;
            let near_a = graph.bfs_within(added.0, r);
            let near_b = graph.bfs_within(g.clause_node(added.1), r);
            let mut edges = BTreeSet::new();
            for u in (0..graph.node_count()).filter(|&u| near_a[u].is_some() || near_b[u].is_some()) {
                for &v in graph.neighbors(u) {
                    edges.insert(g.edge_ids(u, v));
                }
            }
            for (lit, clause) in edges {
                state.refresh(g, lit, clause);
            }
        }
    }
}

/// Reads a rewired graph back as a formula over the same variables.
///
/// Each clause keeps its original literals in their original order, followed
/// by the literals it gained, ascending by literal id.
pub fn rewired_to_cnf(g: &LcgGraph, original: &Cnf) -> Result<Cnf, RewireError> {
    if g.n_vars() != original.num_vars() || g.n_clauses() != original.num_clauses() {
        return Err(RewireError::ShapeMismatch {
            got_vars: g.n_vars(),
            got_clauses: g.n_clauses(),
            want_vars: original.num_vars(),
            want_clauses: original.num_clauses(),
        });
    }
    if !g.is_bipartite() {
        return Err(RewireError::BipartitenessViolated);
    }
    let mut clauses = Vec::with_capacity(original.num_clauses());
    for (c, orig) in original.clauses().iter().enumerate() {
        let mut lits = orig.clone();
        for lit in orig {
            if !g.has_edge(lit.id(), c) {
                return Err(RewireError::NotSupergraph { clause: c, literal: lit.to_dimacs() });
            }
        }
        let before: BTreeSet<usize> = orig.iter().map(|l| l.id()).collect();
        lits.extend(g.clause_literals(c).iter().filter(|id| !before.contains(id)).map(|&id| Literal::from_id(id)));
        clauses.push(lits);
    }
    Ok(Cnf::new(original.num_vars(), clauses)?)
}
