//! Fixed-weight message passing on literal–clause graphs and its
//! input–output Jacobian.
//!
//! Layer `t` (0-based) updates one side of the graph and leaves the other
//! untouched: clauses on even `t`, literals on odd `t`. An updated node `v`
//! computes
//!
//! ```text
//! m_v  = AGG_{u in N(v)} (A_t h_u + a_t)
//! h_v' = sigma(W_t [h_v; m_v] + b_t)
//! ```
//!
//! with `AGG` the mean or sum and `A_t`, `[W_t]` scaled to spectral norm 0.9.
//! Information moves one hop per layer, so a node more than `L` hops from the
//! source has an exactly zero Jacobian block.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{curvature_report, Measure, Measures};
use crate::lcg::LcgGraph;
use crate::rng::stream_rng;

pub const SPECTRAL_SCALE: f64 = 0.9;

#[derive(Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("features: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("invalid probe config: {0}")]
    InvalidConfig(String),
    #[error("node {0} is out of range")]
    NodeOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    #[default]
    Tanh,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub layers: usize,
    pub hidden_dim: usize,
    pub seed: u64,
    pub aggregation: Aggregation,
    pub nonlinearity: Nonlinearity,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            layers: 6,
            hidden_dim: 8,
            seed: 0,
            aggregation: Aggregation::Mean,
            nonlinearity: Nonlinearity::Tanh,
        }
    }
}

struct Layer {
    updates_clauses: bool,
    msg: DMatrix<f64>,
    msg_bias: DVector<f64>,
    w_self: DMatrix<f64>,
    w_msg: DMatrix<f64>,
    bias: DVector<f64>,
}

/// Node states of every layer plus the pre-activations of updated nodes.
pub struct ForwardTrace {
    /// `states[t][v]` is `h_v` after `t` layers; `states[0]` is the input.
    pub states: Vec<Vec<DVector<f64>>>,
    /// `pre[t][v]` for nodes updated by layer `t`, `None` otherwise.
    pre: Vec<Vec<Option<DVector<f64>>>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[DVector<f64>] {
        self.states.last().expect("at least the input state")
    }
}

pub struct Probe {
    cfg: ProbeConfig,
    layers: Vec<Layer>,
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-scale..scale))
}

fn spectral_scaled(m: DMatrix<f64>) -> DMatrix<f64> {
    let top = m.singular_values().max();
    if top > 0.0 {
        m * (SPECTRAL_SCALE / top)
    } else {
        m
    }
}

/// Seeded input features, uniform in `[-1, 1)` per coordinate.
pub fn default_features(nodes: usize, dim: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = stream_rng(seed, 1);
    (0..nodes).map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))).collect()
}

impl Probe {
    /// Draws all layer weights from stream 0 of `cfg.seed`.
    pub fn new(cfg: &ProbeConfig) -> Result<Self, ProbeError> {
        let d = cfg.hidden_dim;
        if d == 0 {
            return Err(ProbeError::InvalidConfig("hidden_dim must be at least 1".into()));
        }
        let mut rng = stream_rng(cfg.seed, 0);
        let layers = (0..cfg.layers)
            .map(|t| {
                let msg = spectral_scaled(uniform_matrix(&mut rng, d, d, 1.0));
                let msg_bias = DVector::from_fn(d, |_, _| rng.random_range(-0.1..0.1));
                let w = spectral_scaled(uniform_matrix(&mut rng, d, 2 * d, 1.0));
                let bias = DVector::from_fn(d, |_, _| rng.random_range(-0.1..0.1));
                Layer {
                    updates_clauses: t % 2 == 0,
                    msg,
                    msg_bias,
                    w_self: w.columns(0, d).into_owned(),
                    w_msg: w.columns(d, d).into_owned(),
                    bias,
                }
            })
            .collect();
        Ok(Probe { cfg: cfg.clone(), layers })
    }

    pub fn config(&self) -> &ProbeConfig {
        &self.cfg
    }

    /// Weights of layer `t`: `(updates_clauses, A_t, W_t self block, W_t message block)`.
    pub fn layer_weights(&self, t: usize) -> (bool, &DMatrix<f64>, &DMatrix<f64>, &DMatrix<f64>) {
        let l = &self.layers[t];
        (l.updates_clauses, &l.msg, &l.w_self, &l.w_msg)
    }

    fn check_features(&self, g: &LcgGraph, x: &[DVector<f64>]) -> Result<(), ProbeError> {
        let n = g.graph().node_count();
        if x.len() != n {
            return Err(ProbeError::DimensionMismatch { expected: format!("{n} nodes"), got: format!("{}", x.len()) });
        }
        if let Some(bad) = x.iter().find(|v| v.len() != self.cfg.hidden_dim) {
            return Err(ProbeError::DimensionMismatch {
                expected: format!("dimension {}", self.cfg.hidden_dim),
                got: format!("dimension {}", bad.len()),
            });
        }
        Ok(())
    }

    fn updated(&self, g: &LcgGraph, layer: &Layer, v: usize) -> bool {
        g.is_literal_node(v) != layer.updates_clauses
    }

    fn scale(&self, deg: usize) -> f64 {
        match self.cfg.aggregation {
            Aggregation::Mean if deg > 0 => 1.0 / deg as f64,
            _ => 1.0,
        }
    }

    fn activate(&self, pre: &DVector<f64>) -> DVector<f64> {
        match self.cfg.nonlinearity {
            Nonlinearity::Tanh => pre.map(f64::tanh),
            Nonlinearity::Identity => pre.clone(),
        }
    }

    fn activation_slope(&self, pre: &DVector<f64>) -> DVector<f64> {
        match self.cfg.nonlinearity {
            Nonlinearity::Tanh => pre.map(|z| 1.0 - z.tanh().powi(2)),
            Nonlinearity::Identity => DVector::from_element(pre.len(), 1.0),
        }
    }

    pub fn forward_trace(&self, g: &LcgGraph, features: &[DVector<f64>]) -> Result<ForwardTrace, ProbeError> {
        self.check_features(g, features)?;
        let graph = g.graph();
        let d = self.cfg.hidden_dim;
        let mut states = vec![features.to_vec()];
        let mut pre = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let h = states.last().unwrap();
            let mut next = h.clone();
            let mut layer_pre = vec![None; h.len()];
            for v in 0..h.len() {
                if !self.updated(g, layer, v) {
                    continue;
                }
                let mut m = DVector::zeros(d);
                for &u in graph.neighbors(v) {
                    m += &layer.msg * &h[u] + &layer.msg_bias;
                }
                m *= self.scale(graph.degree(v));
                let z = &layer.w_self * &h[v] + &layer.w_msg * m + &layer.bias;
                next[v] = self.activate(&z);
                layer_pre[v] = Some(z);
            }
            states.push(next);
            pre.push(layer_pre);
        }
        Ok(ForwardTrace { states, pre })
    }

    /// Output node states after all layers.
    pub fn forward(&self, g: &LcgGraph, features: &[DVector<f64>]) -> Result<Vec<DVector<f64>>, ProbeError> {
        Ok(self.forward_trace(g, features)?.states.pop().unwrap())
    }

    /// `d h_target^(L) / d x_source^(0)` by forward-mode accumulation.
    ///
    /// Tangents are carried only on nodes reachable from `source` in the
    /// layers done so far and able to reach `target` in the layers left.
    pub fn jacobian(
        &self,
        g: &LcgGraph,
        trace: &ForwardTrace,
        source: usize,
        target: usize,
    ) -> Result<DMatrix<f64>, ProbeError> {
        let graph = g.graph();
        let n = graph.node_count();
        for v in [source, target] {
            if v >= n {
                return Err(ProbeError::NodeOutOfRange(v));
            }
        }
        let d = self.cfg.hidden_dim;
        let l = self.layers.len();
        let to_target = graph.bfs_within(target, l);
        let mut tangent: BTreeMap<usize, DMatrix<f64>> = BTreeMap::new();
        if to_target[source].is_some() {
            tangent.insert(source, DMatrix::identity(d, d));
        }
        for (t, layer) in self.layers.iter().enumerate() {
            if tangent.is_empty() {
                break;
            }
            let remaining = l - t - 1;
            let useful = |v: usize| to_target[v].is_some_and(|r| r <= remaining);
            let mut frontier: Vec<usize> = tangent.keys().copied().collect();
            for &v in tangent.keys() {
                frontier.extend(graph.neighbors(v));
            }
            frontier.sort_unstable();
            frontier.dedup();
            let mut next = BTreeMap::new();
            for v in frontier.into_iter().filter(|&v| useful(v)) {
                if !self.updated(g, layer, v) {
                    if let Some(tv) = tangent.get(&v) {
                        next.insert(v, tv.clone());
                    }
                    continue;
                }
                let mut dm = DMatrix::zeros(d, d);
                let mut any = false;
                for u in graph.neighbors(v) {
                    if let Some(tu) = tangent.get(u) {
                        dm += &layer.msg * tu;
                        any = true;
                    }
                }
                let mut dz = &layer.w_msg * dm * self.scale(graph.degree(v));
                if let Some(tv) = tangent.get(&v) {
                    dz += &layer.w_self * tv;
                    any = true;
                }
                if !any {
                    continue;
                }
                let slope = self.activation_slope(trace.pre[t][v].as_ref().expect("updated node has a pre-activation"));
                for (r, s) in slope.iter().enumerate() {
                    dz.row_mut(r).scale_mut(*s);
                }
                next.insert(v, dz);
            }
            tangent = next;
        }
        Ok(tangent.remove(&target).unwrap_or_else(|| DMatrix::zeros(d, d)))
    }

    /// Frobenius norm of [`Probe::jacobian`].
    pub fn sensitivity(&self, g: &LcgGraph, trace: &ForwardTrace, source: usize, target: usize) -> Result<f64, ProbeError> {
        Ok(self.jacobian(g, trace, source, target)?.norm())
    }

    /// Central-difference estimate of [`Probe::jacobian`].
    pub fn finite_difference_jacobian(
        &self,
        g: &LcgGraph,
        features: &[DVector<f64>],
        source: usize,
        target: usize,
        step: f64,
    ) -> Result<DMatrix<f64>, ProbeError> {
        let d = self.cfg.hidden_dim;
        let mut jac = DMatrix::zeros(d, d);
        let mut x = features.to_vec();
        for c in 0..d {
            let orig = x[source][c];
            x[source][c] = orig + step;
            let plus = self.forward(g, &x)?[target].clone();
            x[source][c] = orig - step;
            let minus = self.forward(g, &x)?[target].clone();
            x[source][c] = orig;
            jac.set_column(c, &((plus - minus) / (2.0 * step)));
        }
        Ok(jac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRecord {
    pub source: usize,
    pub target: usize,
    /// Hop distance; `None` when disconnected.
    pub distance: Option<usize>,
    pub jacobian_norm: f64,
}

/// Sensitivity of `target` to `source` under seeded default features.
pub fn sensitivity(g: &LcgGraph, source: usize, target: usize, cfg: &ProbeConfig) -> Result<SensitivityRecord, ProbeError> {
    let probe = Probe::new(cfg)?;
    let x = default_features(g.graph().node_count(), cfg.hidden_dim, cfg.seed);
    let trace = probe.forward_trace(g, &x)?;
    let jacobian_norm = probe.sensitivity(g, &trace, source, target)?;
    let distance = g.graph().bfs_within(source, usize::MAX)[target];
    Ok(SensitivityRecord { source, target, distance, jacobian_norm })
}

/// How many edges and pairs per edge [`curvature_sensitivity_profile`] samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub edge_samples: usize,
    pub pair_samples: usize,
    pub seed: u64,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec { edge_samples: 200, pair_samples: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub edge_lit: usize,
    pub edge_clause: usize,
    pub bfc: f64,
    /// 0 for the most negative tenth of all edges, 9 for the least negative.
    pub decile: usize,
    pub mean_sensitivity: f64,
    pub pairs: usize,
}

/// Literal pairs `(s, t)` at distance 4 whose shortest path `s-c-i-j-t`
/// crosses the designated edge `(i, j)`.
fn crossing_pairs(g: &LcgGraph, lit: usize, clause: usize) -> Vec<(usize, usize)> {
    let graph = g.graph();
    let j = g.clause_node(clause);
    let mut pairs = Vec::new();
    for &c in graph.neighbors(lit).iter().filter(|&&c| c != j) {
        for &s in graph.neighbors(c).iter().filter(|&&s| s != lit) {
            for &t in graph.neighbors(j).iter().filter(|&&t| t != lit && t != s) {
                if !graph.shares_neighbor(s, t) {
                    pairs.push((s, t));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Mean distance-4 sensitivity across sampled edges, with each edge's BFC
/// and BFC decile.
///
/// Samples `edge_samples` edges and, for each, up to `pair_samples` literal
/// pairs at distance 4 whose shortest path runs through it. Edges with no
/// such pair are left out; an empty result is logged as a warning.
pub fn curvature_sensitivity_profile(
    g: &LcgGraph,
    cfg: &ProbeConfig,
    spec: &ProfileSpec,
) -> Result<Vec<ProfileRow>, ProbeError> {
    if spec.pair_samples == 0 || spec.edge_samples == 0 {
        return Err(ProbeError::InvalidConfig("edge_samples and pair_samples must be at least 1".into()));
    }
    let edges = g.edges();
    if edges.is_empty() {
        log::warn!("graph has no edges; empty sensitivity profile");
        return Ok(Vec::new());
    }
    let probe = Probe::new(cfg)?;
    let x = default_features(g.graph().node_count(), cfg.hidden_dim, cfg.seed);
    let trace = probe.forward_trace(g, &x)?;
    let report = curvature_report(g, Measures::only(Measure::Bfc)).expect("graph has edges");
    let bfc: Vec<f64> = report.edges.iter().map(|r| r.bfc.unwrap()).collect();

    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| bfc[a].total_cmp(&bfc[b]).then(a.cmp(&b)));
    let mut decile = vec![0; edges.len()];
    for (rank, &e) in order.iter().enumerate() {
        decile[e] = rank * 10 / edges.len();
    }

    let mut rng = stream_rng(spec.seed, 2);
    let mut chosen = index::sample(&mut rng, edges.len(), spec.edge_samples.min(edges.len())).into_vec();
    chosen.sort_unstable();
    let mut rows = Vec::new();
    for e in chosen {
        let (lit, clause) = edges[e];
        let mut pairs = crossing_pairs(g, lit, clause);
        if pairs.is_empty() {
            continue;
        }
        if pairs.len() > spec.pair_samples {
            let mut keep = index::sample(&mut rng, pairs.len(), spec.pair_samples).into_vec();
            keep.sort_unstable();
            pairs = keep.into_iter().map(|i| pairs[i]).collect();
        }
        let mut total = 0.0;
        for &(s, t) in &pairs {
            total += probe.sensitivity(g, &trace, s, t)?;
        }
        rows.push(ProfileRow {
            edge_lit: lit,
            edge_clause: clause,
            bfc: bfc[e],
            decile: decile[e],
            mean_sensitivity: total / pairs.len() as f64,
            pairs: pairs.len(),
        });
    }
    if rows.is_empty() {
        log::warn!("no literal pairs at distance 4 through the sampled edges; empty sensitivity profile");
    }
    Ok(rows)
}

/// Pair-weighted mean sensitivity over a profile.
pub fn profile_mean(rows: &[ProfileRow]) -> Option<f64> {
    let pairs: usize = rows.iter().map(|r| r.pairs).sum();
    (pairs > 0).then(|| rows.iter().map(|r| r.mean_sensitivity * r.pairs as f64).sum::<f64>() / pairs as f64)
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from("edge_lit,edge_clause,bfc,decile,mean_sensitivity,pairs\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.edge_lit, r.edge_clause, r.bfc, r.decile, r.mean_sensitivity, r.pairs
        ));
    }
    out
}
