//! Instrumented evaluator for closure-converted core programs.

mod machine;
mod value;

use std::fmt;
use std::io::Write;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

pub use value::{Body, Closure, Obj, Value, VariantVal};

use crate::midend::CoreProgram;
use crate::span::Span;
use crate::types::{ElimKind, Type};

/// Heap semantics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    /// Proxied structures and proxied closures.
    #[default]
    G,
    /// Proxied structures, monotonic closures.
    MC,
    /// Monotonic structures and closures.
    MV,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::G, Mode::MC, Mode::MV];

    pub fn name(self) -> &'static str {
        match self {
            Mode::G => "g",
            Mode::MC => "mc",
            Mode::MV => "mv",
        }
    }

    pub(crate) fn monotonic_closures(self) -> bool {
        self != Mode::G
    }

    pub(crate) fn monotonic_structures(self) -> bool {
        self == Mode::MV
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "g" => Ok(Mode::G),
            "mc" => Ok(Mode::MC),
            "mv" => Ok(Mode::MV),
            _ => Err(format!("unknown mode {s:?} (expected g, mc or mv)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub mode: Mode,
    pub dfo: bool,
    /// Maximum number of nested non-tail calls.
    pub max_depth: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { mode: Mode::G, dfo: false, max_depth: 1_000_000 }
    }
}

/// Event totals for one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub trans_ops: u64,
    pub proxy_allocs: u64,
    /// Proxies of closures; included in `proxy_allocs`.
    pub closure_proxies: u64,
    pub heap_allocs: u64,
    pub float_boxes: u64,
    pub germ_checks: u64,
    pub cast_errors: u64,
    /// Heap values whose evidence became strictly more precise.
    pub ev_refinements: u64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RuntimeError {
    #[error("cast error in {context}: evidence {from} is inconsistent with {to}")]
    Cast { span: Span, context: &'static str, from: Type, to: Type },
    #[error("germ check failed: cannot {kind} a value with evidence {found}")]
    Germ { span: Span, kind: ElimKind, found: Type },
    #[error("division by zero")]
    DivisionByZero { span: Span },
    #[error("index {index} out of bounds for vector of length {len}")]
    IndexOutOfBounds { span: Span, index: i64, len: usize },
    #[error("negative vector length {len}")]
    NegativeLength { span: Span, len: i64 },
    #[error("call depth exceeded {limit}")]
    StackOverflow { span: Span, limit: usize },
    #[error("{message}")]
    Input { span: Span, message: String },
    #[error("output error: {0}")]
    Output(String),
}

impl RuntimeError {
    pub fn span(&self) -> Option<Span> {
        use RuntimeError::*;
        match self {
            Cast { span, .. }
            | Germ { span, .. }
            | DivisionByZero { span }
            | IndexOutOfBounds { span, .. }
            | NegativeLength { span, .. }
            | StackOverflow { span, .. }
            | Input { span, .. } => Some(*span),
            Output(_) => None,
        }
    }

    /// Cast and germ failures, as opposed to ordinary runtime errors.
    pub fn is_blame(&self) -> bool {
        matches!(self, RuntimeError::Cast { .. } | RuntimeError::Germ { .. })
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Printed final value.
    Value(String),
    CastError,
    GermError,
    OtherError,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Value(_) => "value",
            Outcome::CastError => "cast-error",
            Outcome::GermError => "germ-error",
            Outcome::OtherError => "other-error",
        }
    }

    pub fn is_blame(&self) -> bool {
        matches!(self, Outcome::CastError | Outcome::GermError)
    }

    /// Cast and germ errors are two reports of the same failed consistency
    /// judgment; which one fires depends on whether germ ascriptions were
    /// specialized. Comparisons across configurations use this class.
    pub fn class(&self) -> OutcomeClass {
        match self {
            Outcome::Value(v) => OutcomeClass::Value(v.clone()),
            Outcome::CastError | Outcome::GermError => OutcomeClass::Blame,
            Outcome::OtherError => OutcomeClass::Other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeClass {
    Value(String),
    Blame,
    Other,
}

/// Result of one execution. The final value is rendered so that reports
/// can leave the thread that ran the program.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub result: Result<String, RuntimeError>,
    pub counters: Counters,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn outcome(&self) -> Outcome {
        match &self.result {
            Ok(v) => Outcome::Value(v.clone()),
            Err(RuntimeError::Cast { .. }) => Outcome::CastError,
            Err(RuntimeError::Germ { .. }) => Outcome::GermError,
            Err(_) => Outcome::OtherError,
        }
    }
}

/// Runs `p` on the calling thread. Deep recursion needs a correspondingly
/// large stack; see [`run_program`].
pub fn run_on_current_thread(p: &CoreProgram, opts: &RunOptions, input: &str, out: &mut dyn Write) -> RunReport {
    execute(p, opts, opts.max_depth, input, out)
}

#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = std::time::Instant::now();
    let r = f();
    (r, start.elapsed())
}

/// Browsers expose no monotonic clock to this target; runs report zero time.
#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    (f(), Duration::ZERO)
}

fn execute(p: &CoreProgram, opts: &RunOptions, depth_limit: usize, input: &str, out: &mut dyn Write) -> RunReport {
    let mut m = machine::Machine::new(p, opts, depth_limit, input, out);
    let (result, elapsed) = timed(|| m.run().map(|v| v.to_string()).map_err(|e| *e));
    let mut counters = m.counters;
    if matches!(&result, Err(e) if e.is_blame()) {
        counters.cast_errors = 1;
    }
    RunReport { result, counters, elapsed }
}

/// Native stack budget per nested call, with headroom over measured use
/// (about 0.9 KiB optimized, 4.8 KiB unoptimized).
const STACK_PER_CALL: usize = if cfg!(debug_assertions) { 6 << 10 } else { 1536 };
const STACK_BASE: usize = 8 << 20;
const STACK_CAP: usize = 3 << 30;

/// Runs `p` on a dedicated thread whose stack is sized for `opts.max_depth`
/// nested calls. The stack is capped; if the cap cannot hold that many
/// levels, the depth limit is lowered to what fits.
pub fn run_program(p: &CoreProgram, opts: &RunOptions, input: &str, out: &mut (dyn Write + Send)) -> RunReport {
    let stack = STACK_BASE.saturating_add(opts.max_depth.saturating_mul(STACK_PER_CALL)).min(STACK_CAP);
    let limit = opts.max_depth.min((stack - STACK_BASE) / STACK_PER_CALL);
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .name("evgrad-vm".into())
            .stack_size(stack)
            .spawn_scoped(s, || execute(p, opts, limit, input, out))
            .expect("spawn evaluator thread")
            .join()
            .expect("evaluator thread panicked")
    })
}
