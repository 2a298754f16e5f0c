//! Oracle-checked benchmarking of the index on seeded workloads.

use std::io::{self, Write};
use std::time::Instant;

use annc_core::oracle::{count_within, linear_scan_nn};
use annc_core::{distance, Backend, CurveIndex, IndexParams, Metric, Mode, QueryResult, Result};

use crate::workload::{generate, WorkloadSpec};

pub const CSV_HEADER: &str = "workload,metric,eps,r,n,m,d,violations,false_pos,p50_us,p99_us";

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub workload: WorkloadSpec,
    pub mode: Mode,
    pub backend: Backend,
    pub max_candidates: u64,
    pub threads: usize,
}

impl BenchConfig {
    pub fn new(workload: WorkloadSpec, mode: Mode) -> Self {
        BenchConfig {
            workload,
            mode,
            backend: Backend::Hash,
            max_candidates: annc_core::candidates::DEFAULT_MAX_CANDIDATES,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub workload: String,
    pub spec: WorkloadSpec,
    pub mode: Mode,
    /// Near-neighbour: near queries answered `NO`. Counting: counts below
    /// the number of inputs within `r`.
    pub violations: usize,
    /// Near-neighbour: returned curves farther than `(1+ε)r`. Counting:
    /// counts above the number of inputs within `(1+ε)r`.
    pub false_pos: usize,
    /// Asymmetric index only: stored simplifications farther than `2r` from
    /// their input curve.
    pub simplification_violations: usize,
    pub dictionary_entries: usize,
    pub build_secs: f64,
    pub p50_us: f64,
    pub p99_us: f64,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.false_pos == 0 && self.simplification_violations == 0
    }

    pub fn csv_row(&self) -> String {
        let s = &self.spec;
        let mode = match self.mode {
            Mode::NearNeighbor => "nn",
            Mode::RangeCount => "count",
        };
        format!(
            "{}-{mode},{},{},{},{},{},{},{},{},{:.3},{:.3}",
            self.workload,
            s.metric,
            s.epsilon,
            s.r,
            s.n,
            s.m,
            s.d,
            self.violations,
            self.false_pos,
            self.p50_us,
            self.p99_us
        )
    }
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn run(cfg: &BenchConfig) -> Result<BenchReport> {
    let spec = &cfg.workload;
    let work = generate(spec)?;
    let mut params = IndexParams::new(spec.epsilon, spec.r, spec.metric)
        .mode(cfg.mode)
        .backend(cfg.backend)
        .max_candidates(cfg.max_candidates)
        .threads(cfg.threads);
    if let Some(k) = spec.k {
        params = params.asymmetric(k);
    }
    let started = Instant::now();
    let index = CurveIndex::build(&work.curves, params)?;
    let build_secs = started.elapsed().as_secs_f64();

    let mut simplification_violations = 0;
    if spec.k.is_some() {
        for c in &work.curves {
            if let Some(pi) = index.simplification(c.id()) {
                if distance(c, pi, Metric::Frechet)? > 2.0 * spec.r {
                    simplification_violations += 1;
                }
            }
        }
    }

    let guarantee = (1.0 + spec.epsilon) * spec.r;
    let mut violations = 0;
    let mut false_pos = 0;
    let mut times = Vec::with_capacity(work.queries.len());
    for q in &work.queries {
        match cfg.mode {
            Mode::NearNeighbor => {
                let t = Instant::now();
                let answer = index.query(q)?;
                times.push(t.elapsed().as_secs_f64() * 1e6);
                let truth = linear_scan_nn(&work.curves, q, spec.metric, spec.r)?;
                match answer {
                    QueryResult::Match { id, .. } => {
                        let c = index.curve(&id).expect("returned ids are registered");
                        if distance(c, q, spec.metric)? > guarantee {
                            false_pos += 1;
                        }
                    }
                    QueryResult::NoMatch => {
                        if truth.nearest_distance <= spec.r {
                            violations += 1;
                        }
                    }
                }
            }
            Mode::RangeCount => {
                let t = Instant::now();
                let count = index.count(q)? as usize;
                times.push(t.elapsed().as_secs_f64() * 1e6);
                if count < count_within(&work.curves, q, spec.metric, spec.r)? {
                    violations += 1;
                }
                if count > count_within(&work.curves, q, spec.metric, guarantee)? {
                    false_pos += 1;
                }
            }
        }
    }
    times.sort_by(f64::total_cmp);
    Ok(BenchReport {
        workload: spec.name(),
        spec: spec.clone(),
        mode: cfg.mode,
        violations,
        false_pos,
        simplification_violations,
        dictionary_entries: index.dictionary_sizes().iter().map(|&(_, n)| n).sum(),
        build_secs,
        p50_us: percentile(&times, 50.0),
        p99_us: percentile(&times, 99.0),
    })
}

/// The desk-scale grid: `n = 20`, `m ∈ {2,3,4}`, `d ∈ {1,2}`,
/// `p ∈ {∞,1,2}`, `ε ∈ {0.25,0.5,1}`, 200 queries each.
pub fn desk_suite(seed: u64) -> Vec<WorkloadSpec> {
    let mut out = Vec::new();
    for d in [1, 2] {
        for m in [2, 3, 4] {
            for metric in [Metric::Frechet, Metric::Dtw, Metric::Lp(2.0)] {
                for eps in [0.25, 0.5, 1.0] {
                    let mut w = WorkloadSpec::new(20, m, d, metric, eps, 1.0);
                    w.seed = seed;
                    out.push(w);
                }
            }
        }
    }
    out
}

/// The short-query grid: `m = 8`, `k ∈ {2,3}`, Fréchet, `d ∈ {1,2}`, `ε ∈ {0.25,0.5,1}`.
pub fn asymmetric_suite(seed: u64) -> Vec<WorkloadSpec> {
    let mut out = Vec::new();
    for d in [1, 2] {
        for k in [2, 3] {
            for eps in [0.25, 0.5, 1.0] {
                let mut w = WorkloadSpec::new(20, 8, d, Metric::Frechet, eps, 1.0);
                w.k = Some(k);
                w.seed = seed;
                out.push(w);
            }
        }
    }
    out
}

/// Outcome of one configuration in a suite run.
#[derive(Debug)]
pub enum SuiteOutcome {
    Ran(BenchReport),
    Failed {
        spec: WorkloadSpec,
        mode: Mode,
        error: annc_core::Error,
    },
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, SuiteOutcome::Ran(r) if r.passed())
    }
}

/// Runs every configuration, writing a CSV row per successful run and a
/// diagnostic line per failure to `log`.
pub fn run_suite(
    specs: &[WorkloadSpec],
    mode: Mode,
    template: &BenchConfig,
    csv: &mut impl Write,
    log: &mut impl Write,
) -> io::Result<Vec<SuiteOutcome>> {
    let mut outcomes = Vec::with_capacity(specs.len());
    for spec in specs {
        let cfg = BenchConfig {
            workload: spec.clone(),
            mode,
            ..template.clone()
        };
        match run(&cfg) {
            Ok(report) => {
                writeln!(csv, "{}", report.csv_row())?;
                writeln!(
                    log,
                    "{} entries={} build={:.2}s",
                    report.csv_row(),
                    report.dictionary_entries,
                    report.build_secs
                )?;
                outcomes.push(SuiteOutcome::Ran(report));
            }
            Err(error) => {
                writeln!(
                    log,
                    "{} {} eps={} m={} d={} mode={mode:?}: {error}",
                    spec.name(),
                    spec.metric,
                    spec.epsilon,
                    spec.m,
                    spec.d
                )?;
                outcomes.push(SuiteOutcome::Failed {
                    spec: spec.clone(),
                    mode,
                    error,
                });
            }
        }
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 50.0), 50.0);
        assert_eq!(percentile(&v, 99.0), 99.0);
        assert_eq!(percentile(&[3.0], 99.0), 3.0);
        assert_eq!(percentile(&[], 50.0), 0.0);
    }

    #[test]
    fn small_bench_is_clean() {
        for mode in [Mode::NearNeighbor, Mode::RangeCount] {
            let mut spec = WorkloadSpec::new(5, 2, 1, Metric::Frechet, 1.0, 1.0);
            spec.queries = 20;
            let report = run(&BenchConfig::new(spec, mode)).unwrap();
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.csv_row().split(',').count(), CSV_HEADER.split(',').count());
        }
    }

    #[test]
    fn suites_cover_the_grid() {
        assert_eq!(desk_suite(1).len(), 54);
        assert_eq!(asymmetric_suite(1).len(), 12);
    }
}
