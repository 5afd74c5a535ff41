//! Random k-SAT instances and labeled datasets.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{write_dimacs, Cnf, Literal};
use crate::rng::stream_rng;
use crate::solver::{solve_dpll, Status};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("i/o error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Model {
    /// Each clause picks `k` distinct variables uniformly and negates each with probability 1/2.
    #[default]
    #[serde(rename = "fixed-k")]
    FixedK,
    /// Each (clause, literal) pair is an edge with marginal probability `k / 2N`.
    #[serde(rename = "bernoulli")]
    BernoulliBipartite,
}

impl std::str::FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed-k" | "fixedk" => Ok(Model::FixedK),
            "bernoulli" | "bernoulli-bipartite" => Ok(Model::BernoulliBipartite),
            other => Err(format!("unknown model `{other}` (expected fixed-k or bernoulli)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_vars: usize,
    pub k: usize,
    pub alpha: f64,
    pub model: Model,
    pub seed: u64,
}

impl GenSpec {
    /// M = round(alpha * N), ties to even.
    pub fn clause_count(&self) -> usize {
        (self.alpha * self.n_vars as f64).round_ties_even() as usize
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidSpec(m));
        if self.n_vars == 0 {
            return bad("n_vars must be at least 1".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        match self.model {
            Model::FixedK if self.k > self.n_vars => {
                return bad(format!("k = {} exceeds n_vars = {}", self.k, self.n_vars));
            }
            Model::BernoulliBipartite if self.k > 2 * self.n_vars => {
                return bad(format!("k = {} exceeds 2 * n_vars = {}", self.k, 2 * self.n_vars));
            }
            _ => {}
        }
        if self.clause_count() == 0 {
            return bad(format!("alpha * n_vars = {} rounds to zero clauses", self.alpha * self.n_vars as f64));
        }
        Ok(())
    }
}

/// Generates instance 0 of `spec`.
pub fn generate(spec: &GenSpec) -> Result<Cnf, GenError> {
    generate_instance(spec, 0)
}

/// Generates the `index`-th instance of `spec` from its own RNG stream.
pub fn generate_instance(spec: &GenSpec, index: u64) -> Result<Cnf, GenError> {
    generate_with_stream(spec, index)
}

pub(crate) fn generate_with_stream(spec: &GenSpec, stream: u64) -> Result<Cnf, GenError> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, stream);
    let m = spec.clause_count();
    let n = spec.n_vars;
    let clauses = match spec.model {
        Model::FixedK => (0..m)
            .map(|_| {
                index::sample(&mut rng, n, spec.k)
                    .into_iter()
                    .map(|v| Literal::new(v as u32 + 1, rng.random_bool(0.5)))
                    .collect()
            })
            .collect(),
        Model::BernoulliBipartite => {
            let slots = 2 * n;
            let q = raw_edge_probability(spec.k, slots);
            (0..m)
                .map(|_| {
                    if q == 0.0 {
                        return vec![Literal::from_id(rng.random_range(0..slots))];
                    }
                    loop {
                        let clause: Vec<Literal> = (0..slots)
                            .filter(|_| rng.random_bool(q))
                            .map(Literal::from_id)
                            .collect();
                        if !clause.is_empty() {
                            break clause;
                        }
                    }
                })
                .collect()
        }
    };
    Ok(Cnf::new(n, clauses).expect("generator output is valid"))
}

/// Per-pair probability `q` such that, after rejecting empty clauses, each
/// literal is in a clause with probability exactly `k / slots`:
/// `q / (1 - (1 - q)^slots) = k / slots`.
///
/// Returns 0 for `k = 1`, the limit in which a clause is a single uniform literal.
pub fn raw_edge_probability(k: usize, slots: usize) -> f64 {
    let target = k as f64 / slots as f64;
    if k <= 1 {
        return 0.0;
    }
    if k >= slots {
        return 1.0;
    }
    let conditional = |q: f64| q / -(slots as f64 * (-q).ln_1p()).exp_m1();
    let (mut lo, mut hi) = (0.0_f64, target);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if conditional(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "unknown")]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub label: Label,
    pub m_clauses: usize,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub model: Model,
    pub k: usize,
    pub n_vars: usize,
    pub alpha: f64,
    pub seed: u64,
    pub instances: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Manifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self, GenError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| GenError::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|e| GenError::Manifest(format!("{}: {e}", path.display())))
    }
}

/// Options for [`generate_dataset`].
#[derive(Debug, Clone)]
pub struct DatasetOptions {
    pub count: usize,
    pub label: bool,
    pub decision_budget: u64,
    pub out_dir: PathBuf,
    pub prefix: String,
}

/// Writes `count` DIMACS files plus `manifest.json` into `out_dir`.
///
/// Instance `i` comes from RNG stream `i` of `spec.seed`. When labeling, an
/// instance whose solve exceeds the decision budget is labeled `unknown`.
pub fn generate_dataset(spec: &GenSpec, opts: &DatasetOptions) -> Result<Manifest, GenError> {
    spec.validate()?;
    if opts.count == 0 {
        return Err(GenError::InvalidSpec("count must be at least 1".into()));
    }
    fs::create_dir_all(&opts.out_dir).map_err(|source| GenError::Io { path: opts.out_dir.clone(), source })?;

    let entries: Vec<Result<ManifestEntry, GenError>> = (0..opts.count as u64)
        .into_par_iter()
        .map(|i| {
            let cnf = generate_instance(spec, i)?;
            let name = format!("{}_{:05}.cnf", opts.prefix, i);
            let path = opts.out_dir.join(&name);
            fs::write(&path, write_dimacs(&cnf)).map_err(|source| GenError::Io { path, source })?;
            let label = if opts.label {
                match solve_dpll(&cnf, opts.decision_budget).status {
                    Status::Sat => Label::Sat,
                    Status::Unsat => Label::Unsat,
                    Status::Unknown => Label::Unknown,
                }
            } else {
                Label::Unknown
            };
            Ok(ManifestEntry { path: name, label, m_clauses: cnf.num_clauses(), index: i })
        })
        .collect();

    let manifest = Manifest {
        model: spec.model,
        k: spec.k,
        n_vars: spec.n_vars,
        alpha: spec.alpha,
        seed: spec.seed,
        instances: entries.into_iter().collect::<Result<_, _>>()?,
    };
    let path = opts.out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|source| GenError::Io { path, source })?;
    Ok(manifest)
}
