use std::io::{self, IsTerminal, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evgrad::checker::{elaborate_static, TypingMode};
use evgrad::dynamizer::{sample_lattice, write_lattice, SampleOptions};
use evgrad::harness::{emit_csv, run_benchmark_suite, write_csv, BenchOptions, HarnessError};
use evgrad::pipeline::{compile, emit, CompileError, CompileOptions, Passes, Stage};
use evgrad::runtime::{run_program, Mode, RunOptions};
use evgrad::surface::parse_source;

const EXIT_STATIC: u8 = 2;
const EXIT_BLAME: u8 = 3;
const EXIT_RUNTIME: u8 = 4;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 66;

#[derive(Parser)]
#[command(name = "evgrad", version, about = "Compile, run and benchmark gradually typed programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile and execute a program.
    Run {
        file: PathBuf,
        #[command(flatten)]
        compile: CompileFlags,
        #[arg(long, default_value = "g")]
        mode: Mode,
        /// Print event counters as JSON on stderr.
        #[arg(long)]
        counters: bool,
        /// Read program input from this file instead of stdin.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = RunOptions::default().max_depth)]
        max_depth: usize,
    },
    /// Typecheck a program without running it.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "gradual")]
        typing: TypingMode,
    },
    /// Print the program after a compilation stage.
    Emit {
        file: PathBuf,
        #[arg(long, default_value = "core")]
        emit: Stage,
        #[command(flatten)]
        compile: CompileFlags,
    },
    /// Sample partially typed configurations of a fully typed program.
    Dynamize {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        samples_per_node: usize,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run every dynamized configuration of a benchmark suite.
    Bench(BenchFlags),
}

#[derive(Args)]
struct CompileFlags {
    #[arg(long, default_value = "gradual")]
    typing: TypingMode,
    /// Keep floats unboxed in statically typed positions.
    #[arg(long)]
    dfo: bool,
    /// Disable an optimization pass (simplify, germs, prune, direct).
    #[arg(long = "no-opt", value_name = "PASS", num_args = 1.., value_parser = parse_pass)]
    no_opt: Vec<String>,
}

impl CompileFlags {
    fn options(&self) -> CompileOptions {
        let mut passes = Passes::default();
        for p in &self.no_opt {
            passes.disable(p).expect("validated by clap");
        }
        CompileOptions { typing: self.typing, dfo: self.dfo, passes }
    }
}

fn parse_pass(s: &str) -> Result<String, String> {
    Passes::default().disable(s).map(|_| s.to_string())
}

#[derive(Args)]
struct BenchFlags {
    /// Directory holding `suite.toml` and the benchmark programs.
    suite: PathBuf,
    /// Modes to run; all three by default.
    #[arg(long = "mode", value_delimiter = ',')]
    modes: Vec<Mode>,
    /// Repetitions per sampled configuration.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Repetitions for the fully typed and untyped endpoints.
    #[arg(long, default_value_t = 50)]
    endpoint_reps: usize,
    #[arg(long, default_value_t = 10)]
    samples_per_node: usize,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Only run these benchmarks.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Use the small inputs from the suite manifest.
    #[arg(long)]
    quick: bool,
    /// Run configurations concurrently; timings become unreliable.
    #[arg(long)]
    parallel: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    compile: CompileFlags,
}

fn read_file(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_IO)
    })
}

fn static_failure(path: &Path, source: &str, e: &CompileError) -> ExitCode {
    let span = match e {
        CompileError::Syntax(s) => s.span(),
        CompileError::Type(t) => t.span(),
    };
    let (line, col) = span.line_col(source);
    eprintln!("{}:{line}:{col}: {e}", path.display());
    ExitCode::from(EXIT_STATIC)
}

fn cmd_run(file: &Path, flags: &CompileFlags, mode: Mode, counters: bool, input: Option<&Path>, max_depth: usize) -> ExitCode {
    let source = match read_file(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let input = match input {
        Some(p) => match read_file(p) {
            Ok(s) => s,
            Err(code) => return code,
        },
        None => {
            let mut s = String::new();
            if !io::stdin().is_terminal() && io::stdin().read_to_string(&mut s).is_err() {
                s.clear();
            }
            s
        }
    };
    let core = match compile(&source, &flags.options()) {
        Ok(c) => c,
        Err(e) => return static_failure(file, &source, &e),
    };
    let ropts = RunOptions { mode, dfo: flags.dfo, max_depth };
    let mut stdout = io::stdout();
    let report = run_program(&core, &ropts, &input, &mut stdout);
    let _ = stdout.flush();
    if counters {
        eprintln!("{}", serde_json::to_string(&report.counters).expect("counters serialize"));
    }
    match &report.result {
        Ok(v) => {
            if v != "()" {
                println!("{v}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            match e.span() {
                Some(span) => {
                    let (line, col) = span.line_col(&source);
                    eprintln!("{}:{line}:{col}: {e}", file.display());
                }
                None => eprintln!("{}: {e}", file.display()),
            }
            ExitCode::from(if e.is_blame() { EXIT_BLAME } else { EXIT_RUNTIME })
        }
    }
}

fn cmd_check(file: &Path, typing: TypingMode) -> ExitCode {
    let source = match read_file(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let result = parse_source(&source)
        .map_err(CompileError::from)
        .and_then(|p| elaborate_static(&p, typing).map(|e| e.main.ty.clone()).map_err(CompileError::from));
    match result {
        Ok(ty) => {
            println!("{ty}");
            ExitCode::SUCCESS
        }
        Err(e) => static_failure(file, &source, &e),
    }
}

fn cmd_emit(file: &Path, stage: Stage, flags: &CompileFlags) -> ExitCode {
    let source = match read_file(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match emit(&source, &flags.options(), stage) {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => static_failure(file, &source, &e),
    }
}

fn cmd_dynamize(file: &Path, opts: SampleOptions, out_dir: &Path) -> ExitCode {
    let source = match read_file(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let program = match parse_source(&source) {
        Ok(p) => p,
        Err(e) => return static_failure(file, &source, &e.into()),
    };
    let configs = match sample_lattice(&program, &opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return ExitCode::from(EXIT_STATIC);
        }
    };
    let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("config");
    match write_lattice(out_dir, stem, &configs) {
        Ok(manifest) => {
            println!("{} configurations, manifest {}", configs.len(), manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn cmd_bench(flags: &BenchFlags) -> ExitCode {
    let copts = flags.compile.options();
    let opts = BenchOptions {
        modes: if flags.modes.is_empty() { Mode::ALL.to_vec() } else { flags.modes.clone() },
        reps: flags.reps.max(1),
        endpoint_reps: flags.endpoint_reps.max(1),
        sampling: SampleOptions { samples_per_node: flags.samples_per_node, bins: flags.bins, seed: flags.seed },
        dfo: copts.dfo,
        typing: copts.typing,
        passes: copts.passes,
        quick: flags.quick,
        parallel: flags.parallel,
        only: flags.only.clone(),
        ..BenchOptions::default()
    };
    let records = match run_benchmark_suite(&flags.suite, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                HarnessError::Syntax { .. } | HarnessError::Dynamize { .. } => EXIT_STATIC,
                _ => EXIT_IO,
            };
            return ExitCode::from(code);
        }
    };
    let written = match &flags.out {
        Some(path) => emit_csv(&records, path).map_err(|e| e.to_string()),
        None => write_csv(&records, io::stdout().lock()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match &cli.command {
        Command::Run { file, compile, mode, counters, input, max_depth } => {
            cmd_run(file, compile, *mode, *counters, input.as_deref(), *max_depth)
        }
        Command::Check { file, typing } => cmd_check(file, *typing),
        Command::Emit { file, emit, compile } => cmd_emit(file, *emit, compile),
        Command::Dynamize { file, samples_per_node, bins, seed, out_dir } => {
            let opts = SampleOptions { samples_per_node: *samples_per_node, bins: *bins, seed: *seed };
            cmd_dynamize(file, opts, out_dir)
        }
        Command::Bench(flags) => cmd_bench(flags),
    }
}
