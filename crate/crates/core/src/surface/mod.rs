//! Source language: tokens, syntax tree, parser, printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{Arm, BinOp, Expr, ExprKind, Ident, Param, PrimOp, Program, VariantDecl};
pub use lexer::{tokenize, LexError, Tok, Token};
pub use parser::{parse_program, parse_source, parse_type, ParseError, SyntaxError};
pub use pretty::{pretty_expr, pretty_program};
