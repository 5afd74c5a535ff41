use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bfc_terms_bipartite, lower_bound, orc_edge, upper_bound, CurvatureError};
use crate::lcg::LcgGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Bfc,
    Orc,
    Lower,
    Upper,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Bfc, Measure::Orc, Measure::Lower, Measure::Upper];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Bfc => "bfc",
            Measure::Orc => "orc",
            Measure::Lower => "lower",
            Measure::Upper => "upper",
        }
    }
}

/// Set of requested measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Measures {
    pub bfc: bool,
    pub orc: bool,
    pub lower: bool,
    pub upper: bool,
}

impl Measures {
    pub fn all() -> Self {
        Measures { bfc: true, orc: true, lower: true, upper: true }
    }

    pub fn only(m: Measure) -> Self {
        let mut s = Measures::default();
        s.set(m);
        s
    }

    pub fn set(&mut self, m: Measure) {
        match m {
            Measure::Bfc => self.bfc = true,
            Measure::Orc => self.orc = true,
            Measure::Lower => self.lower = true,
            Measure::Upper => self.upper = true,
        }
    }

    pub fn contains(&self, m: Measure) -> bool {
        match m {
            Measure::Bfc => self.bfc,
            Measure::Orc => self.orc,
            Measure::Lower => self.lower,
            Measure::Upper => self.upper,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Measure> + '_ {
        Measure::ALL.into_iter().filter(|m| self.contains(*m))
    }

    pub fn is_empty(&self) -> bool {
        self.iter().next().is_none()
    }
}

impl FromStr for Measures {
    type Err = CurvatureError;

    /// Comma-separated names, e.g. `bfc,lower`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Measures::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m = match part {
                "bfc" => Measure::Bfc,
                "orc" => Measure::Orc,
                "lower" => Measure::Lower,
                "upper" => Measure::Upper,
                other => return Err(CurvatureError::UnknownMeasure(other.to_string())),
            };
            out.set(m);
        }
        if out.is_empty() {
            return Err(CurvatureError::NoMeasures);
        }
        Ok(out)
    }
}

/// Per-edge values for the requested measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub lit: usize,
    pub clause: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bfc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

impl EdgeRecord {
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Bfc => self.bfc,
            Measure::Orc => self.orc,
            Measure::Lower => self.lower,
            Measure::Upper => self.upper,
        }
    }
}

/// Means and population variances over edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMoments {
    pub edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_bfc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_bfc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_orc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_orc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_upper: Option<f64>,
}

impl CurvatureMoments {
    pub fn mean(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Bfc => self.mean_bfc,
            Measure::Orc => self.mean_orc,
            Measure::Lower => self.mean_lower,
            Measure::Upper => self.mean_upper,
        }
    }

    pub fn var(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Bfc => self.var_bfc,
            Measure::Orc => self.var_orc,
            Measure::Lower => self.var_lower,
            Measure::Upper => self.var_upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub measures: Measures,
    pub edges: Vec<EdgeRecord>,
    pub moments: CurvatureMoments,
}

/// Computes the requested measures on every edge, in `(lit, clause)` order.
///
/// Edges are processed in parallel; moments are reduced sequentially in edge
/// order so the result does not depend on the thread schedule.
pub fn curvature_report(g: &LcgGraph, measures: Measures) -> Result<CurvatureReport, CurvatureError> {
    if measures.is_empty() {
        return Err(CurvatureError::NoMeasures);
    }
    let edges = g.edges();
    if edges.is_empty() {
        return Err(CurvatureError::EmptyGraph);
    }
    let graph = g.graph();
    let m = g.n_clauses();
    let records: Vec<EdgeRecord> = edges
        .par_iter()
        .map(|&(lit, clause)| {
            let (u, v) = (g.lit_node(lit), g.clause_node(clause));
            let (dl, dc) = (graph.degree(u), graph.degree(v));
            EdgeRecord {
                lit,
                clause,
                bfc: measures.bfc.then(|| bfc_terms_bipartite(graph, u, v).expect("edge exists").value),
                orc: measures.orc.then(|| orc_edge(graph, u, v).expect("edge exists")),
                lower: measures.lower.then(|| lower_bound(dl, dc)),
                upper: measures.upper.then(|| upper_bound(dl, dc, m)),
            }
        })
        .collect();

    let stat = |m: Measure| -> (Option<f64>, Option<f64>) {
        if !measures.contains(m) {
            return (None, None);
        }
        let xs: Vec<f64> = records.iter().map(|r| r.get(m).unwrap()).collect();
        let (mean, var) = mean_var(&xs);
        (Some(mean), Some(var))
    };
    let (mean_bfc, var_bfc) = stat(Measure::Bfc);
    let (mean_orc, var_orc) = stat(Measure::Orc);
    let (mean_lower, var_lower) = stat(Measure::Lower);
    let (mean_upper, var_upper) = stat(Measure::Upper);
    Ok(CurvatureReport {
        measures,
        moments: CurvatureMoments {
            edge_count: records.len(),
            mean_bfc,
            var_bfc,
            mean_orc,
            var_orc,
            mean_lower,
            var_lower,
            mean_upper,
            var_upper,
        },
        edges: records,
    })
}

/// Population mean and variance (two-pass).
pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

impl CurvatureReport {
    /// One row per edge; only requested measures get a column.
    pub fn to_csv(&self) -> String {
        let cols: Vec<Measure> = self.measures.iter().collect();
        let mut out = String::from("lit,clause");
        for m in &cols {
            out.push(',');
            out.push_str(m.name());
        }
        out.push('\n');
        for r in &self.edges {
            write!(out, "{},{}", r.lit, r.clause).unwrap();
            for m in &cols {
                write!(out, ",{}", r.get(*m).unwrap()).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Average over non-isolated literals of the mean lower bound of their edges.
///
/// With every clause of width `k` each literal's edges share the same bound,
/// so this is the per-literal quantity whose expectation is
/// [`super::expected_lower_bound`].
pub fn literal_mean_lower_bound(g: &LcgGraph) -> Option<f64> {
    let graph = g.graph();
    let per_literal: Vec<f64> = (0..g.n_literals())
        .filter(|&l| graph.degree(l) > 0)
        .map(|l| {
            let d = graph.degree(l);
            graph.neighbors(l).iter().map(|&c| lower_bound(d, graph.degree(c))).sum::<f64>() / d as f64
        })
        .collect();
    (!per_literal.is_empty()).then(|| per_literal.iter().sum::<f64>() / per_literal.len() as f64)
}
