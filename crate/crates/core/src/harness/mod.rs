//! Benchmark suites: dynamize each program, run every configuration under
//! each requested mode, and report timings and counters as CSV.

mod csv_out;
mod suite;

use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

pub use csv_out::{emit_csv, write_csv, CSV_HEADER};
pub use suite::{BenchmarkSpec, Suite};

use crate::checker::TypingMode;
use crate::dynamizer::{sample_lattice, ConfigKind, ConfigSample, DynamizeError, SampleOptions};
use crate::pipeline::{compile_program, CompileOptions, Passes};
use crate::runtime::{run_program, Counters, Mode, Outcome, RunOptions};
use crate::surface::{parse_source, Program, SyntaxError};

/// One configuration run under one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub benchmark: String,
    pub config: String,
    pub ratio: f64,
    pub mode: Mode,
    pub dfo: bool,
    pub typing: TypingMode,
    /// Disabled passes joined with `+`.
    pub disabled: String,
    /// Mean wall time of the executions, compilation excluded.
    pub time_s: f64,
    pub reps: usize,
    pub counters: Counters,
    pub outcome: Outcome,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Manifest { path: PathBuf, source: toml::de::Error },
    #[error("{path}: {source}")]
    Syntax { path: PathBuf, source: SyntaxError },
    #[error("{name}: {source}")]
    Dynamize { name: String, source: DynamizeError },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("no benchmark named {0:?} in the suite")]
    UnknownBenchmark(String),
}

/// Settings shared by every run of a suite.
#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub modes: Vec<Mode>,
    /// Repetitions for sampled configurations.
    pub reps: usize,
    /// Repetitions for the fully typed and fully untyped endpoints.
    pub endpoint_reps: usize,
    pub sampling: SampleOptions,
    pub dfo: bool,
    pub typing: TypingMode,
    pub passes: Passes,
    /// Use each benchmark's small input instead of its regular one.
    pub quick: bool,
    /// Run configurations on several threads. Timings become noisy.
    pub parallel: bool,
    /// Restrict the suite to these benchmarks.
    pub only: Vec<String>,
    pub max_depth: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            modes: Mode::ALL.to_vec(),
            reps: 10,
            endpoint_reps: 50,
            sampling: SampleOptions::default(),
            dfo: false,
            typing: TypingMode::Gradual,
            passes: Passes::default(),
            quick: false,
            parallel: false,
            only: Vec::new(),
            max_depth: RunOptions::default().max_depth,
        }
    }
}

impl BenchOptions {
    fn compile_options(&self) -> CompileOptions {
        CompileOptions { typing: self.typing, dfo: self.dfo, passes: self.passes }
    }
}

/// A configuration to execute.
#[derive(Clone, Copy, Debug)]
pub struct Job<'a> {
    pub benchmark: &'a str,
    pub config: &'a str,
    pub ratio: f64,
    pub program: &'a Program,
    pub input: &'a str,
}

/// Compiles the job's program once and executes it `reps` times (once if it
/// fails).
pub fn run_config(job: &Job, mode: Mode, reps: usize, opts: &BenchOptions) -> RunRecord {
    let copts = opts.compile_options();
    let mut record = RunRecord {
        benchmark: job.benchmark.to_string(),
        config: job.config.to_string(),
        ratio: job.ratio,
        mode,
        dfo: opts.dfo,
        typing: opts.typing,
        disabled: opts.passes.disabled_label(),
        time_s: 0.0,
        reps: 0,
        counters: Counters::default(),
        outcome: Outcome::OtherError,
    };
    let Ok(core) = compile_program(job.program, &copts) else {
        return record;
    };
    let ropts = RunOptions { mode, dfo: opts.dfo, max_depth: opts.max_depth };
    let mut total = Duration::ZERO;
    for rep in 0..reps.max(1) {
        let report = run_program(&core, &ropts, job.input, &mut io::sink());
        total += report.elapsed;
        record.reps = rep + 1;
        if rep == 0 {
            record.counters = report.counters;
            record.outcome = report.outcome();
        }
        if report.result.is_err() {
            break;
        }
    }
    record.time_s = total.as_secs_f64() / record.reps as f64;
    record
}

/// Dynamized configurations of one benchmark.
pub fn lattice_of(spec: &BenchmarkSpec, dir: &Path, sampling: &SampleOptions) -> Result<(Program, Vec<ConfigSample>), HarnessError> {
    let path = dir.join(&spec.file);
    let text = std::fs::read_to_string(&path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    let program = parse_source(&text).map_err(|source| HarnessError::Syntax { path, source })?;
    let configs =
        sample_lattice(&program, sampling).map_err(|source| HarnessError::Dynamize { name: spec.name.clone(), source })?;
    Ok((program, configs))
}

/// Runs every configuration of every selected benchmark under every mode.
/// Failing configurations are recorded, not fatal.
pub fn run_benchmark_suite(dir: &Path, opts: &BenchOptions) -> Result<Vec<RunRecord>, HarnessError> {
    let suite = Suite::load(dir)?;
    for name in &opts.only {
        if suite.get(name).is_none() {
            return Err(HarnessError::UnknownBenchmark(name.clone()));
        }
    }
    let mut jobs = Vec::new();
    let mut lattices = Vec::new();
    for spec in suite.benchmarks.iter().filter(|b| opts.only.is_empty() || opts.only.contains(&b.name)) {
        lattices.push((spec, lattice_of(spec, dir, &opts.sampling)?.1));
    }
    for (spec, configs) in &lattices {
        let input = if opts.quick { &spec.quick_input } else { &spec.input };
        for c in configs {
            let reps = if c.kind == ConfigKind::Sampled { opts.reps } else { opts.endpoint_reps };
            for &mode in &opts.modes {
                let job = Job { benchmark: &spec.name, config: &c.id, ratio: c.ratio, program: &c.program, input };
                jobs.push((job, mode, reps));
            }
        }
    }
    let run = |(job, mode, reps): &(Job, Mode, usize)| run_config(job, *mode, *reps, opts);
    let mut records: Vec<RunRecord> = if opts.parallel {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    sort_records(&mut records);
    Ok(records)
}

/// Orders by benchmark, then ratio; ties keep their order.
pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| a.benchmark.cmp(&b.benchmark).then(a.ratio.total_cmp(&b.ratio)));
}
