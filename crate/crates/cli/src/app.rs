//! Command definitions and their implementations. Commands write results to
//! the supplied `out` stream and diagnostics and timings to `err`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use annc_core::{
    simplify_dfd, Backend, CurveIndex, Error as CoreError, IndexParams, Metric, Mode, QueryResult, SimplifyOutcome,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig, CSV_HEADER};
use crate::curvefile::{self, ReadError};
use crate::workload::{WorkloadSpec, DEFAULT_SEED};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const CAPACITY: i32 = 4;
    pub const FORMAT: i32 = 5;
    pub const CHECK_FAILED: i32 = 6;
}

#[derive(Debug, Parser)]
#[command(
    name = "annc",
    version,
    about = "Approximate near-neighbour index for polygonal curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from a curve file.
    Build(BuildArgs),
    /// Answer near-neighbour queries against an index.
    Query(QueryArgs),
    /// Answer range-counting queries against an index.
    Count(QueryArgs),
    /// Simplify curves to at most k vertices under the Fréchet distance.
    Simplify(SimplifyArgs),
    /// Compare the index against a linear scan on seeded random workloads.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nn,
    Count,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Nn => Mode::NearNeighbor,
            ModeArg::Count => Mode::RangeCount,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Hash,
    Trie,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Hash => Backend::Hash,
            BackendArg::Trie => Backend::Trie,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    /// n=20, m in {2,3,4}, d in {1,2}, p in {inf,1,2}, eps in {0.25,0.5,1}.
    Desk,
    /// m=8, k in {2,3}, Fréchet, d in {1,2}, eps in {0.25,0.5,1}.
    Asym,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Input curve file (one JSON record per line).
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_metric)]
    pub metric: Metric,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, value_enum, default_value = "nn")]
    pub mode: ModeArg,
    /// Build the short-query variant for queries of exactly k vertices.
    #[arg(long)]
    pub k: Option<usize>,
    /// Supported query lengths (comma separated); defaults depend on the metric.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "hash")]
    pub backend: BackendArg,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = annc_core::candidates::DEFAULT_MAX_CANDIDATES)]
    pub max_candidates: u64,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Index file written by `build`.
    pub index: PathBuf,
    /// Query curve file.
    pub queries: PathBuf,
    #[arg(long, value_enum, default_value = "hash")]
    pub backend: BackendArg,
    /// Reject the index unless it was built with this metric.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<Metric>,
    /// Reject the index unless it was built with this epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Reject the index unless it was built with this radius.
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimplifyArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub radius: f64,
    /// Approximation of the enclosing-ball routine.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_metric, default_value = "dfd")]
    pub metric: Metric,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, value_enum, default_value = "nn")]
    pub mode: ModeArg,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 200)]
    pub queries: usize,
    /// Run a predefined grid of configurations instead of a single one.
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    #[arg(long, value_enum, default_value = "hash")]
    pub backend: BackendArg,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = annc_core::candidates::DEFAULT_MAX_CANDIDATES)]
    pub max_candidates: u64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn code_for(e: &CoreError) -> i32 {
    match e {
        CoreError::Capacity { .. } => exit::CAPACITY,
        CoreError::Format(_) | CoreError::Corrupt(_) => exit::FORMAT,
        CoreError::Io(_) => exit::RUNTIME,
        _ => exit::USAGE,
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::new(code_for(&e), e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(exit::RUNTIME, e.to_string())
    }
}

fn read_input(path: &Path) -> Result<Vec<annc_core::Curve>, Failure> {
    curvefile::read(path).map_err(|e| {
        let code = match e {
            ReadError::Io(_) => exit::RUNTIME,
            ReadError::Parse { .. } => exit::PARSE,
            ReadError::Empty => exit::USAGE,
        };
        Failure::new(code, format!("{}: {e}", path.display()))
    })
}

/// Runs a parsed command, returning the process exit code.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let result = match cli.command {
        Command::Build(a) => build(a, out, err),
        Command::Query(a) => query(a, Mode::NearNeighbor, out, err),
        Command::Count(a) => query(a, Mode::RangeCount, out, err),
        Command::Simplify(a) => simplify(a, out),
        Command::Bench(a) => bench_cmd(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn build(a: BuildArgs, out: &mut impl Write, err: &mut impl Write) -> Result<i32, Failure> {
    let curves = read_input(&a.input)?;
    let mut params = IndexParams::new(a.epsilon, a.radius, a.metric)
        .mode(a.mode.into())
        .backend(a.backend.into())
        .threads(a.threads)
        .max_candidates(a.max_candidates);
    if let Some(k) = a.k {
        params = params.asymmetric(k);
    }
    if let Some(ls) = a.lengths {
        params = params.query_lengths(ls);
    }
    let started = Instant::now();
    let index = CurveIndex::build(&curves, params)?;
    let elapsed = started.elapsed();
    index.save(&a.out)?;
    for (id, n) in &index.stats().candidates {
        writeln!(out, "curve {id}: {n} candidates")?;
    }
    for id in &index.stats().skipped {
        writeln!(
            out,
            "curve {id}: no {}-vertex simplification within r, skipped",
            a.k.unwrap_or(0)
        )?;
    }
    let sizes = index.dictionary_sizes();
    for &(len, n) in &sizes {
        writeln!(out, "length {len}: {n} entries")?;
    }
    writeln!(out, "dictionary size: {}", sizes.iter().map(|&(_, n)| n).sum::<usize>())?;
    writeln!(err, "build time: {:.3} ms", elapsed.as_secs_f64() * 1e3)?;
    Ok(exit::OK)
}

fn query(a: QueryArgs, mode: Mode, out: &mut impl Write, err: &mut impl Write) -> Result<i32, Failure> {
    let index = CurveIndex::load(&a.index, a.backend.into())?;
    let p = index.params();
    if a.metric.is_some_and(|m| m != p.metric)
        || a.epsilon.is_some_and(|e| e != p.epsilon)
        || a.radius.is_some_and(|r| r != p.r)
    {
        return Err(Failure::new(
            exit::FORMAT,
            format!(
                "index was built with metric={} epsilon={} radius={}",
                p.metric, p.epsilon, p.r
            ),
        ));
    }
    if p.mode != mode {
        return Err(Failure::new(
            exit::USAGE,
            format!("index was built in {:?} mode", p.mode),
        ));
    }
    let (queries, rejected) = curvefile::read_lenient(&a.queries).map_err(|e| {
        Failure::new(
            if matches!(e, ReadError::Io(_)) {
                exit::RUNTIME
            } else {
                exit::PARSE
            },
            format!("{}: {e}", a.queries.display()),
        )
    })?;
    for r in &rejected {
        writeln!(err, "skipped line {}: {}", r.line, r.message)?;
    }
    let started = Instant::now();
    let mut answered = 0usize;
    for (line, q) in &queries {
        let outcome = match mode {
            Mode::NearNeighbor => index.query(q).map(|res| match res {
                QueryResult::Match { id, guarantee } => format!("{}\t{id}\t{guarantee}", q.id()),
                QueryResult::NoMatch => format!("{}\tNO\t{}", q.id(), p.guarantee()),
            }),
            Mode::RangeCount => index.count(q).map(|c| format!("{}\t{c}", q.id())),
        };
        match outcome {
            Ok(text) => {
                writeln!(out, "{text}")?;
                answered += 1;
            }
            Err(e) => writeln!(err, "skipped line {line} (query {}): {e}", q.id())?,
        }
    }
    writeln!(
        err,
        "answered {answered} queries in {:.3} ms",
        started.elapsed().as_secs_f64() * 1e3
    )?;
    Ok(exit::OK)
}

fn simplify(a: SimplifyArgs, out: &mut impl Write) -> Result<i32, Failure> {
    let curves = read_input(&a.input)?;
    for c in &curves {
        match simplify_dfd(c, a.k, a.radius, a.epsilon)? {
            SimplifyOutcome::Simplified(pi) => {
                let rows: Vec<&[f64]> = pi.points().collect();
                let json = serde_json::to_string(&rows).map_err(|e| Failure::new(exit::RUNTIME, e.to_string()))?;
                writeln!(out, "{}\t{json}", c.id())?;
            }
            SimplifyOutcome::Infeasible => writeln!(out, "{}\tINFEASIBLE", c.id())?,
        }
    }
    Ok(exit::OK)
}

fn bench_cmd(a: BenchArgs, out: &mut impl Write, err: &mut impl Write) -> Result<i32, Failure> {
    let mut spec = WorkloadSpec::new(a.n, a.m, a.d, a.metric, a.epsilon, a.radius);
    spec.queries = a.queries;
    spec.k = a.k;
    spec.seed = a.seed;
    if spec.n == 0 || spec.m == 0 || spec.d == 0 || a.k.is_some_and(|k| k == 0 || k > a.m) {
        return Err(Failure::new(exit::USAGE, "bench needs n, m, d >= 1 and 1 <= k <= m"));
    }
    let specs = match a.suite {
        None => vec![spec],
        Some(SuiteArg::Desk) => bench::desk_suite(a.seed),
        Some(SuiteArg::Asym) => bench::asymmetric_suite(a.seed),
    };
    let template = BenchConfig {
        workload: specs[0].clone(),
        mode: a.mode.into(),
        backend: a.backend.into(),
        max_candidates: a.max_candidates,
        threads: a.threads,
    };
    let mut csv = Vec::new();
    writeln!(csv, "{CSV_HEADER}")?;
    let outcomes = bench::run_suite(&specs, a.mode.into(), &template, &mut csv, err)?;
    match &a.out {
        Some(path) => fs::write(path, &csv)?,
        None => out.write_all(&csv)?,
    }
    let mut violations = 0;
    let mut false_pos = 0;
    let mut failed = Vec::new();
    for o in &outcomes {
        match o {
            bench::SuiteOutcome::Ran(r) => {
                violations += r.violations + r.simplification_violations;
                false_pos += r.false_pos;
            }
            bench::SuiteOutcome::Failed { error, .. } => failed.push(error),
        }
    }
    writeln!(out, "violations: {violations}")?;
    writeln!(out, "false positives: {false_pos}")?;
    writeln!(out, "configurations not built: {}", failed.len())?;
    if let Some(e) = failed.first() {
        return Ok(code_for(e));
    }
    Ok(if violations + false_pos == 0 {
        exit::OK
    } else {
        exit::CHECK_FAILED
    })
}
