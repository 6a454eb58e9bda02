//! Browser bindings. Every export returns a JSON string so the page never
//! has to catch exceptions.

use evgrad::checker::TypingMode;
use evgrad::dynamizer::{enumerate_annotation_sites, sample_lattice, ConfigKind, SampleOptions};
use evgrad::pipeline::{compile, emit as emit_stage, CompileError, CompileOptions, Stage};
use evgrad::runtime::{run_on_current_thread, Counters, Mode, RunOptions};
use evgrad::surface::{parse_source, pretty_program};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// The page runs on the browser's main stack, which holds far fewer frames
/// than the CLI's dedicated thread.
const MAX_DEPTH: usize = 800;

#[derive(Serialize)]
struct RunResult {
    outcome: &'static str,
    value: Option<String>,
    output: String,
    error: Option<String>,
    counters: Option<Counters>,
}

#[derive(Serialize)]
struct EmitResult {
    text: Option<String>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Config {
    id: String,
    kind: ConfigKind,
    ratio: f64,
    bin: usize,
    source: String,
}

#[derive(Serialize)]
struct DynamizeResult {
    type_nodes: usize,
    configs: Vec<Config>,
    error: Option<String>,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("results serialize")
}

fn located(source: &str, e: &CompileError) -> String {
    let span = match e {
        CompileError::Syntax(s) => s.span(),
        CompileError::Type(t) => t.span(),
    };
    let (line, col) = span.line_col(source);
    format!("{line}:{col}: {e}")
}

fn options(typing: &str, dfo: bool) -> Result<CompileOptions, String> {
    Ok(CompileOptions { typing: typing.parse::<TypingMode>()?, dfo, ..CompileOptions::default() })
}

fn failed(outcome: &'static str, error: String) -> String {
    json(&RunResult { outcome, value: None, output: String::new(), error: Some(error), counters: None })
}

/// Compiles and runs `source` under `mode` (`g`, `mc` or `mv`) with
/// `typing` (`gradual` or `static`).
#[wasm_bindgen]
pub fn run(source: &str, mode: &str, dfo: bool, typing: &str, input: &str) -> String {
    let (copts, mode) = match (options(typing, dfo), mode.parse::<Mode>()) {
        (Ok(c), Ok(m)) => (c, m),
        (Err(e), _) | (_, Err(e)) => return failed("usage-error", e),
    };
    let core = match compile(source, &copts) {
        Ok(c) => c,
        Err(e) => return failed("static-error", located(source, &e)),
    };
    let mut out = Vec::new();
    let report = run_on_current_thread(&core, &RunOptions { mode, dfo, max_depth: MAX_DEPTH }, input, &mut out);
    let output = String::from_utf8_lossy(&out).into_owned();
    let outcome = report.outcome().label();
    let (value, error) = match report.result {
        Ok(v) => (Some(v), None),
        Err(e) => {
            let at = e.span().map(|s| {
                let (line, col) = s.line_col(source);
                format!("{line}:{col}: ")
            });
            (None, Some(format!("{}{e}", at.unwrap_or_default())))
        }
    };
    json(&RunResult { outcome, value, output, error, counters: Some(report.counters) })
}

/// Renders one pipeline stage: `ast`, `elab`, `anf` or `core`.
#[wasm_bindgen]
pub fn emit(source: &str, stage: &str, dfo: bool, typing: &str) -> String {
    let result = options(typing, dfo).and_then(|copts| {
        let stage = stage.parse::<Stage>()?;
        emit_stage(source, &copts, stage).map_err(|e| located(source, &e))
    });
    match result {
        Ok(text) => json(&EmitResult { text: Some(text), error: None }),
        Err(e) => json(&EmitResult { text: None, error: Some(e) }),
    }
}

/// Samples the precision lattice of a fully annotated program.
#[wasm_bindgen]
pub fn dynamize(source: &str, seed: u32, bins: u32, samples_per_node: u32) -> String {
    let sampled = parse_source(source).map_err(|e| located(source, &e.into())).and_then(|p| {
        let nodes = enumerate_annotation_sites(&p).map_err(|e| e.to_string())?.iter().map(|s| s.nodes).sum();
        let opts = SampleOptions { samples_per_node: samples_per_node as usize, bins: bins as usize, seed: seed.into() };
        let configs = sample_lattice(&p, &opts).map_err(|e| e.to_string())?;
        Ok((nodes, configs))
    });
    let result = match sampled {
        Ok((type_nodes, configs)) => DynamizeResult {
            type_nodes,
            configs: configs
                .into_iter()
                .map(|c| Config { source: pretty_program(&c.program), id: c.id, kind: c.kind, ratio: c.ratio, bin: c.bin })
                .collect(),
            error: None,
        },
        Err(e) => DynamizeResult { type_nodes: 0, configs: Vec::new(), error: Some(e) },
    };
    json(&result)
}
