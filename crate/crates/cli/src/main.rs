//! `satcurv`: curvature of literal–clause graphs from the command line.
//!
//! Every subcommand parses its flags, calls one library entry point and
//! writes the result. Exit status is 0 on success, 1 when the library
//! reports an error and 2 on a usage error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use satcurv_core::analysis::{dataset_hardness, files_hardness, sweep, sweep_csv, SweepSpec};
use satcurv_core::gen::{generate, generate_dataset, DatasetOptions, GenSpec, Model};
use satcurv_core::probe::{
    curvature_sensitivity_profile, profile_csv, sensitivity, Aggregation, Nonlinearity, ProbeConfig, ProfileSpec,
};
use satcurv_core::rewire::{rewire, rewired_to_cnf, RewireConfig, UpdateScope};
use satcurv_core::solver::{half_crossing, sat_probability_curve, SatCurveSpec, Status, DEFAULT_DECISION_BUDGET};
use satcurv_core::{build_lcg, curvature_report, read_dimacs, solve_dpll, write_dimacs, Cnf, Measures};

#[derive(Debug, Parser)]
#[command(name = "satcurv", version, about = "Ricci curvature of literal-clause graphs of k-SAT formulas")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Upper bound on worker threads (default: all cores).
    #[arg(long, global = true, env = "SATCURV_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (directory for `gen --count`); standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random formula, or a labeled dataset with --count.
    Gen(GenArgs),
    /// Parse and validate a DIMACS file.
    ParseCheck(InArg),
    /// Per-edge curvature of a formula's literal-clause graph.
    Curvature(CurvatureArgs),
    /// Curvature-guided edge addition.
    Rewire(RewireArgs),
    /// Decide satisfiability with DPLL.
    Solve(SolveArgs),
    /// Curvature moments over a (k, alpha) grid.
    Sweep(SweepArgs),
    /// Curvature hardness scores for a dataset or a list of files.
    Hardness(HardnessArgs),
    /// Distance-4 Jacobian sensitivity of a fixed-weight message-passing network.
    Probe(ProbeArgs),
    /// Fraction of satisfiable random formulas against alpha.
    SatCurve(SatCurveArgs),
}

#[derive(Debug, Args)]
struct InArg {
    /// Input DIMACS file.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    k: usize,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Clause density M / N.
    #[arg(long)]
    alpha: f64,
    /// `fixed-k` or `bernoulli`.
    #[arg(long, default_value = "fixed-k")]
    model: Model,
    /// Write this many instances and a manifest into the --out directory.
    #[arg(long)]
    count: Option<usize>,
    /// Label dataset instances with DPLL.
    #[arg(long)]
    label: bool,
    /// DPLL decision budget for labels.
    #[arg(long, default_value_t = DEFAULT_DECISION_BUDGET)]
    budget: u64,
    /// File name prefix for dataset instances.
    #[arg(long, default_value = "inst")]
    prefix: String,
    /// Also write the literal-clause graph as JSON (single-instance mode).
    #[arg(long)]
    graph_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvatureArgs {
    #[command(flatten)]
    input: InArg,
    /// Comma-separated subset of bfc, orc, lower, upper.
    #[arg(long, default_value = "bfc")]
    measures: Measures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    Affected,
    Ball,
    Endpoints,
}

#[derive(Debug, Args)]
struct RewireArgs {
    #[command(flatten)]
    input: InArg,
    /// Iterations (default: ceil(0.2 |E|)).
    #[arg(long)]
    iters: Option<usize>,
    /// Probability of a random instead of a greedy step.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Which curvatures are refreshed after each addition.
    #[arg(long, value_enum, default_value_t = ScopeArg::Affected)]
    scope: ScopeArg,
    /// Walk radius for `--scope ball`.
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Write the per-iteration trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the rewired literal-clause graph as JSON.
    #[arg(long)]
    graph_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InArg,
    /// Give up after this many branching decisions.
    #[arg(long, default_value_t = DEFAULT_DECISION_BUDGET)]
    budget: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated clause widths.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// Comma-separated list, or `start:stop:step`.
    #[arg(long, value_parser = parse_alphas)]
    alphas: Alphas,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value = "bfc")]
    measures: Measures,
    #[arg(long, default_value = "fixed-k")]
    model: Model,
}

#[derive(Debug, Args)]
struct HardnessArgs {
    /// Dataset manifest written by `gen --count`.
    #[arg(long, conflicts_with = "files", required_unless_present = "files")]
    manifest: Option<PathBuf>,
    /// DIMACS files to score.
    files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AggArg {
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ActArg {
    Tanh,
    Identity,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    #[command(flatten)]
    input: InArg,
    #[arg(long, default_value_t = 6)]
    layers: usize,
    #[arg(long, default_value_t = 8)]
    hidden: usize,
    #[arg(long, value_enum, default_value_t = AggArg::Mean)]
    aggregation: AggArg,
    #[arg(long, value_enum, default_value_t = ActArg::Tanh)]
    nonlinearity: ActArg,
    /// Edges sampled for the profile.
    #[arg(long, default_value_t = 200)]
    edges: usize,
    /// Distance-4 pairs sampled per edge.
    #[arg(long, default_value_t = 4)]
    pairs: usize,
    /// Instead of a profile, report one source node's influence on --target.
    #[arg(long, requires = "target")]
    source: Option<usize>,
    #[arg(long, requires = "source")]
    target: Option<usize>,
}

#[derive(Debug, Args)]
struct SatCurveArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Comma-separated list, or `start:stop:step`.
    #[arg(long, value_parser = parse_alphas)]
    alphas: Alphas,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_DECISION_BUDGET)]
    budget: u64,
}

#[derive(Debug, Clone)]
struct Alphas(Vec<f64>);

/// `3,3.5,4` or `3:5:0.1` (inclusive; grid points rounded to 1e-9).
fn parse_alphas(s: &str) -> Result<Alphas, String> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step.is_nan() || step <= 0.0 || b < a {
                return Err("range needs start <= stop and step > 0".into());
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect()
        }
        _ => return Err("expected a comma list or start:stop:step".into()),
    };
    Ok(Alphas(values))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen(a) => cmd_gen(g, a),
        Command::ParseCheck(a) => {
            let parsed = load(&a.input)?;
            #[derive(Serialize)]
            struct Check<'a> {
                num_vars: usize,
                num_clauses: usize,
                alpha: f64,
                #[serde(flatten)]
                report: &'a satcurv_core::formula::ValidationReport,
            }
            let c = &parsed.cnf;
            let check = Check { num_vars: c.num_vars(), num_clauses: c.num_clauses(), alpha: c.alpha(), report: &parsed.report };
            let text = match g.format {
                Format::Json => json(&check),
                Format::Csv => format!(
                    "num_vars,num_clauses,alpha,dedup_count,tautology_count\n{},{},{},{},{}\n",
                    check.num_vars, check.num_clauses, check.alpha, check.report.dedup_count, check.report.tautology_count
                ),
            };
            for w in &parsed.report.warnings {
                eprintln!("warning: {w}");
            }
            emit(g, &text)
        }
        Command::Curvature(a) => {
            let cnf = load(&a.input.input)?.cnf;
            let report = curvature_report(&build_lcg(&cnf), a.measures)?;
            emit(g, &match g.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
            })
        }
        Command::Rewire(a) => cmd_rewire(g, a),
        Command::Solve(a) => {
            let cnf = load(&a.input.input)?.cnf;
            let result = solve_dpll(&cnf, a.budget);
            let text = match g.format {
                Format::Json => json(&result),
                Format::Csv => solve_text(&cnf, &result),
            };
            emit(g, &text)
        }
        Command::Sweep(a) => {
            let spec = SweepSpec {
                ks: a.k.clone(),
                alphas: a.alphas.0.clone(),
                n_vars: a.n,
                samples: a.samples,
                seed: g.seed,
                measures: a.measures,
                model: a.model,
            };
            let rows = sweep(&spec)?;
            emit(g, &match g.format {
                Format::Json => json(&rows),
                Format::Csv => sweep_csv(&rows),
            })
        }
        Command::Hardness(a) => {
            let result = match &a.manifest {
                Some(m) => dataset_hardness(m)?,
                None => {
                    let paths: Vec<(String, PathBuf)> =
                        a.files.iter().map(|p| (p.display().to_string(), p.clone())).collect();
                    files_hardness(&paths)?
                }
            };
            emit(g, &match g.format {
                Format::Json => json(&result),
                Format::Csv => result.to_csv(),
            })
        }
        Command::Probe(a) => cmd_probe(g, a),
        Command::SatCurve(a) => {
            let spec = SatCurveSpec {
                k: a.k,
                n_vars: a.n,
                alphas: a.alphas.0.clone(),
                samples: a.samples,
                seed: g.seed,
                budget: a.budget,
            };
            let points = sat_probability_curve(&spec)?;
            let crossing = half_crossing(&points);
            let text = match g.format {
                Format::Json => json(&serde_json::json!({ "points": points, "half_crossing": crossing })),
                Format::Csv => {
                    let mut s = String::from("alpha,sat,unsat,unknown,fraction,stderr\n");
                    for p in &points {
                        s += &format!("{},{},{},{},{},{}\n", p.alpha, p.sat, p.unsat, p.unknown, p.fraction, p.stderr);
                    }
                    s
                }
            };
            emit(g, &text)
        }
    }
}

fn cmd_gen(g: &Global, a: &GenArgs) -> Result<()> {
    let spec = GenSpec { n_vars: a.n, k: a.k, alpha: a.alpha, model: a.model, seed: g.seed };
    let Some(count) = a.count else {
        let cnf = generate(&spec)?;
        if let Some(path) = &a.graph_json {
            write_file(path, &json(&build_lcg(&cnf).export()))?;
        }
        return emit(g, &write_dimacs(&cnf));
    };
    let Some(dir) = &g.out else {
        bail!("gen --count needs --out <directory>");
    };
    if a.graph_json.is_some() {
        bail!("--graph-json applies to single-instance generation only");
    }
    let opts = DatasetOptions {
        count,
        label: a.label,
        decision_budget: a.budget,
        out_dir: dir.clone(),
        prefix: a.prefix.clone(),
    };
    generate_dataset(&spec, &opts)?;
    Ok(())
}

fn cmd_rewire(g: &Global, a: &RewireArgs) -> Result<()> {
    let cnf = load(&a.input.input)?.cnf;
    let cfg = RewireConfig {
        iterations: a.iters,
        random_prob: a.p,
        seed: g.seed,
        recompute_radius: a.radius,
        update_scope: match a.scope {
            ScopeArg::Affected => UpdateScope::Affected,
            ScopeArg::Ball => UpdateScope::Ball,
            ScopeArg::Endpoints => UpdateScope::Endpoints,
        },
    };
    let (rewired, trace) = rewire(&build_lcg(&cnf), &cfg)?;
    if let Some(path) = &a.trace {
        write_file(path, &json(&trace))?;
    }
    if let Some(path) = &a.graph_json {
        write_file(path, &json(&rewired.export()))?;
    }
    emit(g, &write_dimacs(&rewired_to_cnf(&rewired, &cnf)?))
}

fn cmd_probe(g: &Global, a: &ProbeArgs) -> Result<()> {
    let cnf = load(&a.input.input)?.cnf;
    let lcg = build_lcg(&cnf);
    let cfg = ProbeConfig {
        layers: a.layers,
        hidden_dim: a.hidden,
        seed: g.seed,
        aggregation: match a.aggregation {
            AggArg::Mean => Aggregation::Mean,
            AggArg::Sum => Aggregation::Sum,
        },
        nonlinearity: match a.nonlinearity {
            ActArg::Tanh => Nonlinearity::Tanh,
            ActArg::Identity => Nonlinearity::Identity,
        },
    };
    if let (Some(s), Some(t)) = (a.source, a.target) {
        let rec = sensitivity(&lcg, s, t, &cfg)?;
        let dist = rec.distance.map(|d| d.to_string()).unwrap_or_default();
        return emit(g, &match g.format {
            Format::Json => json(&rec),
            Format::Csv => format!("source,target,distance,jacobian_norm\n{},{},{},{}\n", rec.source, rec.target, dist, rec.jacobian_norm),
        });
    }
    let spec = ProfileSpec { edge_samples: a.edges, pair_samples: a.pairs, seed: g.seed };
    let rows = curvature_sensitivity_profile(&lcg, &cfg, &spec)?;
    emit(g, &match g.format {
        Format::Json => json(&rows),
        Format::Csv => profile_csv(&rows),
    })
}

fn solve_text(cnf: &Cnf, r: &satcurv_core::SolveResult) -> String {
    match (r.status, &r.assignment) {
        (Status::Sat, Some(x)) => {
            let mut s = String::from("s SATISFIABLE\nv");
            for (i, &b) in x.iter().enumerate().take(cnf.num_vars()) {
                let v = i as i64 + 1;
                s += &format!(" {}", if b { v } else { -v });
            }
            s + " 0\n"
        }
        (Status::Unsat, _) => "s UNSATISFIABLE\n".into(),
        _ => "s UNKNOWN\n".into(),
    }
}

fn load(path: &Path) -> Result<satcurv_core::formula::Parsed> {
    read_dimacs(path).with_context(|| format!("reading {}", path.display()))
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.out {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                // A reader that stops early (`| head`) is not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing standard output"),
                _ => Ok(()),
            }
        }
    }
}
