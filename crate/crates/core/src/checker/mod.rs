//! Gradual typechecking fused with static elaboration, plus ascription
//! simplification.

mod elab;
mod simplify;
mod typecheck;
mod verify;

use thiserror::Error;

pub use elab::{AscKind, EArm, EKind, ElabExpr, ElabProgram};
pub use simplify::simplify_ascriptions;
pub use typecheck::elaborate_static;
pub use verify::verify_elaborated;

use crate::span::Span;
use crate::surface::Program;
use crate::types::Type;

/// How annotations are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TypingMode {
    #[default]
    Gradual,
    /// Every type in the program must be fully precise.
    Static,
    /// All annotations are dropped before checking.
    Dynamic,
}

impl TypingMode {
    pub fn name(self) -> &'static str {
        match self {
            TypingMode::Gradual => "gradual",
            TypingMode::Static => "static",
            TypingMode::Dynamic => "dynamic",
        }
    }
}

impl std::str::FromStr for TypingMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gradual" => Ok(TypingMode::Gradual),
            "static" => Ok(TypingMode::Static),
            "dynamic" => Ok(TypingMode::Dynamic),
            _ => Err(format!("unknown typing mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TypeError {
    #[error("{context}: expected a type consistent with {expected}, found {found}")]
    Inconsistent { span: Span, context: &'static str, expected: Type, found: Type },
    #[error("unbound variable {name}")]
    Unbound { span: Span, name: String },
    #[error("cannot {action} a value of type {found}")]
    BadElimination { span: Span, action: String, found: Type },
    #[error("expected {expected} arguments, found {found}")]
    Arity { span: Span, expected: usize, found: usize },
    #[error("unknown type {name}")]
    UnknownType { span: Span, name: String },
    #[error("unknown constructor {name}")]
    UnknownCtor { span: Span, name: String },
    #[error("duplicate declaration of {name}")]
    Duplicate { span: Span, name: String },
    #[error("{message}")]
    BadMatch { span: Span, message: String },
    #[error("let rec must bind a function")]
    LetRecNotLambda { span: Span },
    #[error("static typing forbids imprecise type {ty}")]
    Imprecise { span: Span, ty: Type },
}

impl TypeError {
    pub fn span(&self) -> Span {
        use TypeError::*;
        match self {
            Inconsistent { span, .. }
            | Unbound { span, .. }
            | BadElimination { span, .. }
            | Arity { span, .. }
            | UnknownType { span, .. }
            | UnknownCtor { span, .. }
            | Duplicate { span, .. }
            | BadMatch { span, .. }
            | LetRecNotLambda { span }
            | Imprecise { span, .. } => *span,
        }
    }
}

/// Checks a program and returns the type of its main expression.
pub fn typecheck(p: &Program, mode: TypingMode) -> Result<Type, TypeError> {
    Ok(elaborate_static(p, mode)?.main.ty)
}
