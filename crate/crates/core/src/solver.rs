//! DPLL with unit propagation and pure-literal elimination.
//!
//! Meant for ground-truth labels on desk-scale instances, not for speed
//! records. Clause state is tracked with satisfied/free counters per clause
//! and active-occurrence counters per literal, all undone on backtrack.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Cnf;
use crate::gen::{generate_with_stream, GenError, GenSpec, Model};
use crate::rng::cell_stream;

pub const DEFAULT_DECISION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("assignment covers {given} variables but the formula uses {needed}")]
    IncompleteAssignment { given: usize, needed: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: Status,
    /// Indexed by `var - 1`; present iff `status == Sat`.
    pub assignment: Option<Vec<bool>>,
    pub stats: SolveStats,
}

/// True iff every clause has a satisfied literal.
pub fn verify(cnf: &Cnf, assignment: &[bool]) -> Result<bool, SolverError> {
    let needed = cnf.max_var_used();
    if assignment.len() < needed {
        return Err(SolverError::IncompleteAssignment { given: assignment.len(), needed });
    }
    Ok(cnf.clauses().iter().all(|c| c.iter().any(|l| l.eval(assignment))))
}

/// Solves `cnf`, giving up with `Unknown` after `budget` branching decisions.
pub fn solve_dpll(cnf: &Cnf, budget: u64) -> SolveResult {
    let start = Instant::now();
    let mut dpll = Dpll::new(cnf);
    let status = dpll.run(budget);
    let assignment = (status == Status::Sat).then(|| {
        let a: Vec<bool> = dpll.value.iter().map(|v| *v == Some(true)).collect();
        debug_assert_eq!(verify(cnf, &a), Ok(true));
        a
    });
    SolveResult {
        status,
        assignment,
        stats: SolveStats { decisions: dpll.decisions, propagations: dpll.propagations, elapsed: start.elapsed() },
    }
}

struct Dpll {
    /// Clause literals as literal ids.
    clauses: Vec<Vec<usize>>,
    /// Clauses containing each literal id.
    occurs: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    sat_count: Vec<u32>,
    free_count: Vec<u32>,
    /// Number of unsatisfied clauses containing each literal.
    active: Vec<u32>,
    unsat_clauses: usize,
    trail: Vec<usize>,
    decisions: u64,
    propagations: u64,
}

struct Decision {
    trail_len: usize,
    lit: usize,
    flipped: bool,
}

impl Dpll {
    fn new(cnf: &Cnf) -> Self {
        let n = cnf.num_vars();
        let clauses: Vec<Vec<usize>> =
            cnf.clauses().iter().map(|c| c.iter().map(|l| l.id()).collect()).collect();
        let mut occurs = vec![Vec::new(); 2 * n];
        let mut active = vec![0u32; 2 * n];
        for (ci, c) in clauses.iter().enumerate() {
            for &l in c {
                occurs[l].push(ci);
                active[l] += 1;
            }
        }
        Dpll {
            free_count: clauses.iter().map(|c| c.len() as u32).collect(),
            sat_count: vec![0; clauses.len()],
            unsat_clauses: clauses.len(),
            clauses,
            occurs,
            value: vec![None; n],
            active,
            trail: Vec::new(),
            decisions: 0,
            propagations: 0,
        }
    }

    fn lit_value(&self, lit: usize) -> Option<bool> {
        self.value[lit / 2].map(|v| v != (lit % 2 == 1))
    }

    /// Makes `lit` true. Returns false on conflict; `units` collects clauses
    /// that became unit.
    fn assign(&mut self, lit: usize, units: &mut Vec<usize>) -> bool {
        self.value[lit / 2] = Some(lit.is_multiple_of(2));
        self.trail.push(lit);
        let mut ok = true;
        for i in 0..self.occurs[lit].len() {
            let c = self.occurs[lit][i];
            if self.sat_count[c] == 0 {
                self.unsat_clauses -= 1;
                for &m in &self.clauses[c] {
                    self.active[m] -= 1;
                }
            }
            self.sat_count[c] += 1;
            self.free_count[c] -= 1;
        }
        let neg = lit ^ 1;
        for i in 0..self.occurs[neg].len() {
            let c = self.occurs[neg][i];
            self.free_count[c] -= 1;
            if self.sat_count[c] == 0 {
                match self.free_count[c] {
                    0 => ok = false,
                    1 => units.push(c),
                    _ => {}
                }
            }
        }
        ok
    }

    fn unassign_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let lit = self.trail.pop().unwrap();
            for i in 0..self.occurs[lit].len() {
                let c = self.occurs[lit][i];
                self.sat_count[c] -= 1;
                self.free_count[c] += 1;
                if self.sat_count[c] == 0 {
                    self.unsat_clauses += 1;
                    for &m in &self.clauses[c] {
                        self.active[m] += 1;
                    }
                }
            }
            for &c in &self.occurs[lit ^ 1] {
                self.free_count[c] += 1;
            }
            self.value[lit / 2] = None;
        }
    }

    /// Unit propagation and pure-literal elimination to a fixpoint.
    fn simplify(&mut self, mut units: Vec<usize>) -> bool {
        loop {
            while let Some(c) = units.pop() {
                if self.sat_count[c] > 0 {
                    continue;
                }
                if self.free_count[c] == 0 {
                    return false;
                }
                let lit = self.clauses[c]
                    .iter()
                    .copied()
                    .find(|&l| self.lit_value(l).is_none())
                    .expect("free literal exists");
                self.propagations += 1;
                if !self.assign(lit, &mut units) {
                    return false;
                }
            }
            let mut changed = false;
            for var in 0..self.value.len() {
                if self.value[var].is_some() {
                    continue;
                }
                let (pos, neg) = (2 * var, 2 * var + 1);
                let pure = match (self.active[pos], self.active[neg]) {
                    (p, 0) if p > 0 => pos,
                    (0, q) if q > 0 => neg,
                    _ => continue,
                };
                changed = true;
                if !self.assign(pure, &mut units) {
                    return false;
                }
            }
            if !changed && units.is_empty() {
                return true;
            }
        }
    }

    /// Most frequent unassigned variable over unsatisfied clauses, ties by index.
    /// Tries the more frequent polarity first.
    fn pick_branch(&self) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        for var in 0..self.value.len() {
            if self.value[var].is_some() {
                continue;
            }
            let score = self.active[2 * var] + self.active[2 * var + 1];
            if score > 0 && best.is_none_or(|(s, _)| score > s) {
                best = Some((score, var));
            }
        }
        best.map(|(_, var)| {
            if self.active[2 * var + 1] > self.active[2 * var] {
                2 * var + 1
            } else {
                2 * var
            }
        })
    }

    fn initial_units(&self) -> Vec<usize> {
        (0..self.clauses.len()).filter(|&c| self.free_count[c] == 1).collect()
    }

    fn run(&mut self, budget: u64) -> Status {
        let mut stack: Vec<Decision> = Vec::new();
        let mut ok = self.simplify(self.initial_units());
        loop {
            if ok {
                if self.unsat_clauses == 0 {
                    return Status::Sat;
                }
                let lit = self.pick_branch().expect("unsatisfied clause has a free variable");
                if self.decisions >= budget {
                    return Status::Unknown;
                }
                self.decisions += 1;
                stack.push(Decision { trail_len: self.trail.len(), lit, flipped: false });
                let mut units = Vec::new();
                ok = self.assign(lit, &mut units) && self.simplify(units);
            } else {
                loop {
                    let Some(top) = stack.last_mut() else {
                        return Status::Unsat;
                    };
                    let (len, lit) = (top.trail_len, top.lit);
                    self.unassign_to(len);
                    if top.flipped {
                        stack.pop();
                        continue;
                    }
                    top.flipped = true;
                    let mut units = Vec::new();
                    ok = self.assign(lit ^ 1, &mut units) && self.simplify(units);
                    break;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatCurvePoint {
    pub alpha: f64,
    pub sat: usize,
    pub unsat: usize,
    pub unknown: usize,
    /// Fraction SAT among decided instances.
    pub fraction: f64,
    /// Binomial standard error of `fraction`.
    pub stderr: f64,
}

#[derive(Debug, Clone)]
pub struct SatCurveSpec {
    pub k: usize,
    pub n_vars: usize,
    pub alphas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub budget: u64,
}

/// Monte Carlo estimate of P(SAT) over fixed-width random instances.
///
/// Instances that exhaust the budget count as unknown and are left out of
/// the fraction (with a logged warning).
pub fn sat_probability_curve(spec: &SatCurveSpec) -> Result<Vec<SatCurvePoint>, GenError> {
    let jobs: Vec<(usize, usize)> =
        (0..spec.alphas.len()).flat_map(|a| (0..spec.samples).map(move |s| (a, s))).collect();
    let statuses: Vec<Result<Status, GenError>> = jobs
        .par_iter()
        .map(|&(a, s)| {
            let g = GenSpec { n_vars: spec.n_vars, k: spec.k, alpha: spec.alphas[a], model: Model::FixedK, seed: spec.seed };
            let cnf = generate_with_stream(&g, cell_stream(a, s))?;
            Ok(solve_dpll(&cnf, spec.budget).status)
        })
        .collect();
    let statuses: Vec<Status> = statuses.into_iter().collect::<Result<_, _>>()?;
    Ok(spec
        .alphas
        .iter()
        .enumerate()
        .map(|(a, &alpha)| {
            let cell = &statuses[a * spec.samples..(a + 1) * spec.samples];
            let count = |st| cell.iter().filter(|&&x| x == st).count();
            let (sat, unsat, unknown) = (count(Status::Sat), count(Status::Unsat), count(Status::Unknown));
            if unknown > 0 {
                log::warn!("alpha={alpha}: {unknown} instance(s) exceeded the decision budget");
            }
            let decided = (sat + unsat) as f64;
            let (fraction, stderr) = if decided > 0.0 {
                let f = sat as f64 / decided;
                (f, (f * (1.0 - f) / decided).sqrt())
            } else {
                (f64::NAN, f64::NAN)
            };
            SatCurvePoint { alpha, sat, unsat, unknown, fraction, stderr }
        })
        .collect())
}

/// Alpha at which a non-increasing fit of the curve crosses 1/2.
///
/// Fits the fractions with isotonic (non-increasing) regression, then
/// interpolates linearly between the bracketing grid points.
pub fn half_crossing(points: &[SatCurvePoint]) -> Option<f64> {
    let pts: Vec<&SatCurvePoint> = points.iter().filter(|p| p.fraction.is_finite()).collect();
    let fit = isotonic_decreasing(&pts.iter().map(|p| p.fraction).collect::<Vec<_>>());
    for w in 0..pts.len().saturating_sub(1) {
        let (f0, f1) = (fit[w], fit[w + 1]);
        if f0 >= 0.5 && f1 < 0.5 {
            let t = if f0 == f1 { 0.0 } else { (f0 - 0.5) / (f0 - f1) };
            return Some(pts[w].alpha + t * (pts[w + 1].alpha - pts[w].alpha));
        }
    }
    None
}

/// Pool-adjacent-violators fit constrained to be non-increasing.
fn isotonic_decreasing(ys: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &y in ys {
        blocks.push((y, 1));
        while blocks.len() > 1 {
            let (m1, c1) = blocks[blocks.len() - 1];
            let (m0, c0) = blocks[blocks.len() - 2];
            if m0 >= m1 {
                break;
            }
            blocks.pop();
            let c = c0 + c1;
            *blocks.last_mut().unwrap() = ((m0 * c0 as f64 + m1 * c1 as f64) / c as f64, c);
        }
    }
    blocks.into_iter().flat_map(|(m, c)| std::iter::repeat_n(m, c)).collect()
}
