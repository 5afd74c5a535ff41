//! Curvature-based hardness heuristics, correlation, and parameter sweeps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{
    curvature_report, expected_lower_bound, CurvatureError, CurvatureReport, Measure, Measures, DEFAULT_TAIL_TOL,
};
use crate::formula::read_dimacs;
use crate::gen::{generate_with_stream, GenError, GenSpec, Manifest, Model};
use crate::lcg::{build_lcg, LcgGraph};
use crate::rng::cell_stream;
use crate::solver::{solve_dpll, Status};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("curvature report has no BFC moments")]
    MissingBfc,
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("an input has zero variance")]
    DegenerateVariance,
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {message}")]
    Instance { path: PathBuf, message: String },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
}

/// `omega = -mean_ric * alpha`, `omega_star = omega / var_ric`.
///
/// A graph with zero curvature variance has `omega_star = +inf` and
/// `omega_star_infinite = true`; JSON renders the infinity as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessScores {
    pub alpha: f64,
    pub mean_ric: f64,
    pub var_ric: f64,
    pub omega: f64,
    pub omega_star: f64,
    pub omega_star_infinite: bool,
}

impl HardnessScores {
    pub fn from_moments(mean_ric: f64, var_ric: f64, alpha: f64) -> Self {
        let omega = -mean_ric * alpha;
        let (omega_star, omega_star_infinite) =
            if var_ric > 0.0 { (omega / var_ric, false) } else { (f64::INFINITY, true) };
        HardnessScores { alpha, mean_ric, var_ric, omega, omega_star, omega_star_infinite }
    }
}

/// Scores of one graph from its BFC moments; `alpha = M / N`.
pub fn hardness(g: &LcgGraph, report: &CurvatureReport) -> Result<HardnessScores, AnalysisError> {
    if g.edge_count() == 0 || report.moments.edge_count == 0 {
        return Err(AnalysisError::EmptyGraph);
    }
    let (Some(mean), Some(var)) = (report.moments.mean_bfc, report.moments.var_bfc) else {
        return Err(AnalysisError::MissingBfc);
    };
    Ok(HardnessScores::from_moments(mean, var, g.n_clauses() as f64 / g.n_vars() as f64))
}

/// Scores a DIMACS file.
pub fn file_hardness(path: &Path) -> Result<HardnessScores, AnalysisError> {
    let wrap = |message: String| AnalysisError::Instance { path: path.to_path_buf(), message };
    let parsed = read_dimacs(path).map_err(|e| wrap(e.to_string()))?;
    let g = build_lcg(&parsed.cnf);
    let report = curvature_report(&g, Measures::only(Measure::Bfc)).map_err(|e| wrap(e.to_string()))?;
    hardness(&g, &report).map_err(|e| wrap(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessRow {
    pub path: String,
    #[serde(flatten)]
    pub scores: HardnessScores,
}

/// Dataset averages `omega_bar`, `omega_star_bar`, `alpha_bar` plus per-instance rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHardness {
    pub omega_bar: f64,
    pub omega_star_bar: f64,
    pub alpha_bar: f64,
    pub rows: Vec<HardnessRow>,
}

/// Scores every instance listed in a manifest (paths relative to its directory).
pub fn dataset_hardness(manifest_path: &Path) -> Result<DatasetHardness, AnalysisError> {
    let manifest = Manifest::read(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let paths: Vec<(String, PathBuf)> =
        manifest.instances.iter().map(|e| (e.path.clone(), dir.join(&e.path))).collect();
    files_hardness(&paths)
}

/// Scores `(label, path)` pairs; the label is what appears in the `path` column.
pub fn files_hardness(paths: &[(String, PathBuf)]) -> Result<DatasetHardness, AnalysisError> {
    if paths.is_empty() {
        return Err(AnalysisError::InvalidSpec("no instances".into()));
    }
    let rows: Vec<HardnessRow> = paths
        .par_iter()
        .map(|(label, path)| file_hardness(path).map(|scores| HardnessRow { path: label.clone(), scores }))
        .collect::<Result<_, _>>()?;
    let n = rows.len() as f64;
    let avg = |f: fn(&HardnessScores) -> f64| rows.iter().map(|r| f(&r.scores)).sum::<f64>() / n;
    Ok(DatasetHardness {
        omega_bar: avg(|s| s.omega),
        omega_star_bar: avg(|s| s.omega_star),
        alpha_bar: avg(|s| s.alpha),
        rows,
    })
}

impl DatasetHardness {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path,alpha,mean_ric,var_ric,omega,omega_star\n");
        for r in &self.rows {
            let s = &r.scores;
            writeln!(out, "{},{},{},{},{},{}", r.path, s.alpha, s.mean_ric, s.var_ric, s.omega, s.omega_star).unwrap();
        }
        out
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, AnalysisError> {
    if xs.len() != ys.len() {
        return Err(AnalysisError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(AnalysisError::TooFewPoints(xs.len()));
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::DegenerateVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub n_vars: usize,
    pub samples: usize,
    pub seed: u64,
    pub measures: Measures,
    pub model: Model,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: &str| Err(AnalysisError::InvalidSpec(m.into()));
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        if self.alphas.windows(2).any(|w| w[0] >= w[1]) || self.alphas.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return bad("alpha grid must be positive and strictly increasing");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return bad("k list must be non-empty and positive");
        }
        if self.measures.is_empty() {
            return bad("no measures requested");
        }
        Ok(())
    }
}

/// Aggregate of one measure over the `samples` instances of a `(k, alpha)` cell.
///
/// `mean` is the mean over instances of each instance's edge mean, `stderr`
/// its standard error (sample standard deviation / sqrt(samples)), and `var`
/// the mean over instances of each instance's edge variance. Failed cells
/// carry `error` and no statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub alpha: f64,
    pub measure: Measure,
    pub mean: Option<f64>,
    pub var: Option<f64>,
    pub stderr: Option<f64>,
    pub samples: usize,
    pub analytic_lb: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Runs every `(k, alpha)` cell. Instance `s` of cell `c` (row-major over
/// `ks × alphas`) uses RNG stream `cell_stream(c, s)`; with a single `k`
/// these are the same instances [`crate::solver::sat_probability_curve`] draws.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, AnalysisError> {
    spec.validate()?;
    let cells: Vec<(usize, f64)> = spec.ks.iter().flat_map(|&k| spec.alphas.iter().map(move |&a| (k, a))).collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..spec.samples).map(move |s| (c, s))).collect();
    let reports: Vec<Result<CurvatureReport, String>> = jobs
        .par_iter()
        .map(|&(c, s)| {
            let (k, alpha) = cells[c];
            let g = GenSpec { n_vars: spec.n_vars, k, alpha, model: spec.model, seed: spec.seed };
            let cnf = generate_with_stream(&g, cell_stream(c, s)).map_err(|e| e.to_string())?;
            curvature_report(&build_lcg(&cnf), spec.measures).map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::new();
    for (c, &(k, alpha)) in cells.iter().enumerate() {
        let cell = &reports[c * spec.samples..(c + 1) * spec.samples];
        let analytic_lb = expected_lower_bound(alpha, k, DEFAULT_TAIL_TOL);
        let failure = cell.iter().find_map(|r| r.as_ref().err()).cloned();
        if let Some(e) = &failure {
            log::warn!("sweep cell k={k} alpha={alpha} failed: {e}");
        }
        for m in spec.measures.iter() {
            let mut row =
                SweepRow { k, alpha, measure: m, mean: None, var: None, stderr: None, samples: 0, analytic_lb, error: None };
            match &failure {
                Some(e) => row.error = Some(e.clone()),
                None => {
                    let means: Vec<f64> = cell.iter().map(|r| r.as_ref().unwrap().moments.mean(m).unwrap()).collect();
                    let vars: Vec<f64> = cell.iter().map(|r| r.as_ref().unwrap().moments.var(m).unwrap()).collect();
                    let n = means.len() as f64;
                    let mean = means.iter().sum::<f64>() / n;
                    let stderr = if means.len() > 1 {
                        (means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
                    } else {
                        0.0
                    };
                    row.mean = Some(mean);
                    row.var = Some(vars.iter().sum::<f64>() / n);
                    row.stderr = Some(stderr);
                    row.samples = means.len();
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV with header `k,alpha,measure,mean,var,stderr,samples,analytic_lb`;
/// failed cells have empty statistic fields.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,alpha,measure,mean,var,stderr,samples,analytic_lb\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.k,
            r.alpha,
            r.measure.name(),
            opt(r.mean),
            opt(r.var),
            opt(r.stderr),
            r.samples,
            r.analytic_lb
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsRow {
    pub alpha: f64,
    pub mean_bfc: f64,
    pub var_bfc: f64,
    pub frac_sat: f64,
    pub sat: usize,
    pub unsat: usize,
    pub unknown: usize,
}

/// Per alpha: mean over instances of the BFC mean and variance, and the DPLL
/// SAT fraction among decided instances, all on the same FixedK instances.
pub fn moments_vs_solvability(
    k: usize,
    n_vars: usize,
    alphas: &[f64],
    samples: usize,
    seed: u64,
    budget: u64,
) -> Result<Vec<MomentsRow>, AnalysisError> {
    let jobs: Vec<(usize, usize)> = (0..alphas.len()).flat_map(|a| (0..samples).map(move |s| (a, s))).collect();
    let results: Vec<Result<(f64, f64, Status), AnalysisError>> = jobs
        .par_iter()
        .map(|&(a, s)| {
            let g = GenSpec { n_vars, k, alpha: alphas[a], model: Model::FixedK, seed };
            let cnf = generate_with_stream(&g, cell_stream(a, s))?;
            let report = curvature_report(&build_lcg(&cnf), Measures::only(Measure::Bfc))?;
            let status = solve_dpll(&cnf, budget).status;
            Ok((report.moments.mean_bfc.unwrap(), report.moments.var_bfc.unwrap(), status))
        })
        .collect();
    let results: Vec<(f64, f64, Status)> = results.into_iter().collect::<Result<_, _>>()?;
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(a, &alpha)| {
            let cell = &results[a * samples..(a + 1) * samples];
            let n = cell.len() as f64;
            let count = |st| cell.iter().filter(|x| x.2 == st).count();
            let (sat, unsat, unknown) = (count(Status::Sat), count(Status::Unsat), count(Status::Unknown));
            if unknown > 0 {
                log::warn!("alpha={alpha}: {unknown} instance(s) exceeded the decision budget");
            }
            MomentsRow {
                alpha,
                mean_bfc: cell.iter().map(|x| x.0).sum::<f64>() / n,
                var_bfc: cell.iter().map(|x| x.1).sum::<f64>() / n,
                frac_sat: if sat + unsat > 0 { sat as f64 / (sat + unsat) as f64 } else { f64::NAN },
                sat,
                unsat,
                unknown,
            }
        })
        .collect())
}
