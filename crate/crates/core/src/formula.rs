//! CNF formulas and the DIMACS interchange format.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("no `p cnf` header before clause data")]
    MissingHeader,
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: second `p` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("variable {var} out of range 1..={num_vars}")]
    VarOutOfRange { var: u64, num_vars: usize },
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("last clause is missing its `0` terminator")]
    UnterminatedClause,
    #[error("i/o error: {0}")]
    Io(String),
}

/// A variable or its negation. Variables are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Literal { var, negated }
    }

    pub fn pos(var: u32) -> Self {
        Literal::new(var, false)
    }

    pub fn neg(var: u32) -> Self {
        Literal::new(var, true)
    }

    /// Signed DIMACS form, e.g. `-3`.
    pub fn from_dimacs(x: i64) -> Option<Self> {
        if x == 0 || x.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal::new(x.unsigned_abs() as u32, x < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    /// Literal node index in the literal-clause graph: `2(var-1) + negated`.
    pub fn from_id(id: usize) -> Self {
        Literal::new((id / 2 + 1) as u32, id % 2 == 1)
    }

    pub fn id(self) -> usize {
        2 * (self.var as usize - 1) + self.negated as usize
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn negate(self) -> Self {
        Literal { var: self.var, negated: !self.negated }
    }

    /// Truth value under an assignment indexed by `var - 1`.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var as usize - 1] != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Findings from ingesting a formula. Serialized as the validation report.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dedup_count: usize,
    pub tautology_count: usize,
    pub warnings: Vec<String>,
}

/// A formula in conjunctive normal form.
///
/// Every clause is non-empty, free of repeated literals, and only mentions
/// variables in `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    /// Builds a formula, dropping repeated literals inside a clause.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        Self::with_report(num_vars, clauses).map(|(cnf, _)| cnf)
    }

    pub fn with_report(
        num_vars: usize,
        clauses: Vec<Vec<Literal>>,
    ) -> Result<(Self, ValidationReport), FormulaError> {
        let mut report = ValidationReport::default();
        let mut out = Vec::with_capacity(clauses.len());
        for (index, clause) in clauses.into_iter().enumerate() {
            if clause.is_empty() {
                return Err(FormulaError::EmptyClause { index });
            }
            let mut kept: Vec<Literal> = Vec::with_capacity(clause.len());
            for lit in clause {
                if lit.var as usize > num_vars {
                    return Err(FormulaError::VarOutOfRange { var: lit.var as u64, num_vars });
                }
                if kept.contains(&lit) {
                    report.dedup_count += 1;
                } else {
                    kept.push(lit);
                }
            }
            if kept.iter().any(|l| kept.contains(&l.negate())) {
                report.tautology_count += 1;
                report.warnings.push(format!("clause {index} is tautological"));
            }
            out.push(kept);
        }
        if report.dedup_count > 0 {
            report
                .warnings
                .push(format!("removed {} duplicate literal(s)", report.dedup_count));
        }
        Ok((Cnf { num_vars, clauses: out }, report))
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Clause density M / N.
    pub fn alpha(&self) -> f64 {
        self.clauses.len() as f64 / self.num_vars as f64
    }

    /// Largest variable index that occurs in some clause.
    pub fn max_var_used(&self) -> usize {
        self.clauses.iter().flatten().map(|l| l.var as usize).max().unwrap_or(0)
    }
}

/// Result of [`parse_dimacs`]: the formula plus what was fixed up on the way in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub cnf: Cnf,
    pub report: ValidationReport,
}

/// Parses DIMACS CNF.
///
/// Lines starting with `c` are comments and a line starting with `%` ends the
/// clause data (SATLIB convention). Clauses may span lines; each ends at `0`.
pub fn parse_dimacs(input: &[u8]) -> Result<Parsed, FormulaError> {
    let text = std::str::from_utf8(input).map_err(|_| FormulaError::InvalidUtf8)?;
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(FormulaError::DuplicateHeader { line: line_no });
            }
            let malformed = || FormulaError::MalformedHeader { line: line_no, text: trimmed.to_string() };
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(malformed());
            }
            let n = parts[2].parse::<usize>().map_err(|_| malformed())?;
            let m = parts[3].parse::<usize>().map_err(|_| malformed())?;
            header = Some((n, m));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(FormulaError::MissingHeader);
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| FormulaError::InvalidToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                if current.is_empty() {
                    return Err(FormulaError::EmptyClause { index: clauses.len() });
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if value.unsigned_abs() > num_vars as u64 {
                return Err(FormulaError::VarOutOfRange { var: value.unsigned_abs(), num_vars });
            }
            current.push(Literal::from_dimacs(value).expect("nonzero and in range"));
        }
    }

    let (num_vars, declared) = header.ok_or(FormulaError::MissingHeader)?;
    if !current.is_empty() {
        return Err(FormulaError::UnterminatedClause);
    }
    if clauses.len() != declared {
        return Err(FormulaError::ClauseCountMismatch { declared, found: clauses.len() });
    }
    let (cnf, report) = Cnf::with_report(num_vars, clauses)?;
    Ok(Parsed { cnf, report })
}

/// Canonical DIMACS text: header, then one `0`-terminated clause per line.
pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            out.push_str(&lit.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

pub fn read_dimacs(path: impl AsRef<Path>) -> Result<Parsed, FormulaError> {
    let bytes = fs::read(path.as_ref())
        .map_err(|e| FormulaError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_dimacs(&bytes)
}
