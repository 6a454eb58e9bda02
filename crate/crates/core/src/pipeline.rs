//! Source-to-core compilation with switchable passes, and one-call runs.

use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::checker::{elaborate_static, simplify_ascriptions, TypeError, TypingMode};
use crate::midend::{
    alpha_rename, closure_convert, elaborate_dynamic, prune_dynamic_ascriptions, specialize_germs, to_anf, CoreProgram,
};
use crate::runtime::{run_program, RunOptions, RunReport};
use crate::surface::{parse_source, pretty_program, Program, SyntaxError};

/// Optional passes, each enabled by default.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Passes {
    pub simplify: bool,
    pub germs: bool,
    pub prune: bool,
    pub direct: bool,
}

impl Default for Passes {
    fn default() -> Self {
        Passes { simplify: true, germs: true, prune: true, direct: true }
    }
}

impl Passes {
    pub const NAMES: [&'static str; 4] = ["simplify", "germs", "prune", "direct"];

    /// Turns off the pass called `name`.
    pub fn disable(&mut self, name: &str) -> Result<(), String> {
        match name {
            "simplify" => self.simplify = false,
            "germs" => self.germs = false,
            "prune" => self.prune = false,
            "direct" => self.direct = false,
            _ => return Err(format!("unknown pass {name:?} (expected one of {})", Passes::NAMES.join(", "))),
        }
        Ok(())
    }

    pub fn without(name: &str) -> Result<Passes, String> {
        let mut p = Passes::default();
        p.disable(name)?;
        Ok(p)
    }

    /// Names of the disabled passes, joined with `+`; empty when all run.
    pub fn disabled_label(&self) -> String {
        let flags = [self.simplify, self.germs, self.prune, self.direct];
        Passes::NAMES
            .iter()
            .zip(flags)
            .filter(|(_, on)| !on)
            .map(|(n, _)| *n)
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    pub typing: TypingMode,
    /// Keeps float representation boundaries visible to simplification.
    pub dfo: bool,
    pub passes: Passes,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CompileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// A dumpable compilation stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Parsed source.
    Ast,
    /// Statically elaborated and simplified.
    Elab,
    /// A-normal form with dynamic ascriptions, after germ specialization
    /// and pruning.
    Anf,
    /// Closure-converted code table.
    Core,
}

impl std::str::FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ast" => Ok(Stage::Ast),
            "elab" => Ok(Stage::Elab),
            "anf" => Ok(Stage::Anf),
            "core" => Ok(Stage::Core),
            _ => Err(format!("unknown stage {s:?} (expected ast, elab, anf or core)")),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ast => "ast",
            Stage::Elab => "elab",
            Stage::Anf => "anf",
            Stage::Core => "core",
        })
    }
}

fn front(p: &Program, opts: &CompileOptions) -> Result<crate::checker::ElabProgram, TypeError> {
    let e = elaborate_static(p, opts.typing)?;
    Ok(if opts.passes.simplify { simplify_ascriptions(e, opts.dfo) } else { e })
}

fn middle(e: &crate::checker::ElabProgram, opts: &CompileOptions) -> CoreProgram {
    let mut c = elaborate_dynamic(to_anf(&alpha_rename(e.clone())));
    if opts.passes.germs {
        c = specialize_germs(c);
    }
    if opts.passes.prune {
        c = prune_dynamic_ascriptions(c);
    }
    c
}

/// Compiles a parsed program down to closure-converted core.
pub fn compile_program(p: &Program, opts: &CompileOptions) -> Result<CoreProgram, TypeError> {
    let e = front(p, opts)?;
    Ok(closure_convert(middle(&e, opts), opts.passes.direct))
}

pub fn compile(source: &str, opts: &CompileOptions) -> Result<CoreProgram, CompileError> {
    Ok(compile_program(&parse_source(source)?, opts)?)
}

/// Renders the program as it stands after `stage`.
pub fn emit(source: &str, opts: &CompileOptions, stage: Stage) -> Result<String, CompileError> {
    let p = parse_source(source)?;
    if stage == Stage::Ast {
        return Ok(pretty_program(&p));
    }
    let e = front(&p, opts)?;
    Ok(match stage {
        Stage::Ast => unreachable!(),
        Stage::Elab => e.to_string(),
        Stage::Anf => middle(&e, opts).to_string(),
        Stage::Core => closure_convert(middle(&e, opts), opts.passes.direct).to_string(),
    })
}

/// Compiles and runs `source`, writing program output to `out`.
pub fn run_source(
    source: &str,
    copts: &CompileOptions,
    ropts: &RunOptions,
    input: &str,
    out: &mut (dyn Write + Send),
) -> Result<RunReport, CompileError> {
    let core = compile(source, copts)?;
    let report = run_program(&core, ropts, input, out);
    if copts.typing == TypingMode::Static {
        let c = &report.counters;
        debug_assert!(
            c.trans_ops == 0 && c.germ_checks == 0 && c.proxy_allocs == 0,
            "statically typed program performed runtime checks: {c:?}"
        );
    }
    Ok(report)
}

/// Runs `source` and captures its output as a string.
pub fn run_capture(source: &str, copts: &CompileOptions, ropts: &RunOptions, input: &str) -> Result<(RunReport, String), CompileError> {
    let mut buf = Vec::new();
    let report = run_source(source, copts, ropts, input, &mut buf)?;
    Ok((report, String::from_utf8_lossy(&buf).into_owned()))
}
