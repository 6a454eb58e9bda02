//! Printing surface programs back to source text.
//!
//! The output re-parses to the same tree (spans aside). Parentheses are
//! inserted from a small precedence table rather than remembered from the
//! input.

use std::fmt::Write;

use super::ast::*;
use crate::types::Type;

const OPEN: u8 = 0;
const ASSIGN: u8 = 1;
const ASCRIBE: u8 = 2;
const UNARY: u8 = 8;
const APP: u8 = 9;
const POSTFIX: u8 = 10;
const ATOM: u8 = 11;

fn binop_level(op: BinOp) -> u8 {
    op.precedence() + 2
}

fn level(e: &Expr) -> u8 {
    use ExprKind::*;
    match &e.kind {
        Lambda { .. } | Let { .. } | LetRec { .. } | If { .. } | Match { .. } | Seq(..) => OPEN,
        Loop { .. } => ATOM,
        Assign { .. } | VecSet { .. } => ASSIGN,
        Ascribe { .. } => ASCRIBE,
        Binary { op, .. } => binop_level(*op),
        Int(n) if *n < 0 => UNARY,
        Float(x) if x.is_sign_negative() => UNARY,
        Deref(_) | Proj { .. } => UNARY,
        App { .. } | Prim { .. } | MakeRef(_) | MakeVec { .. } => APP,
        Ctor { args, .. } if !args.is_empty() => APP,
        VecGet { .. } => POSTFIX,
        _ => ATOM,
    }
}

pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.variants {
        out.push_str(&pretty_decl(d));
        out.push('\n');
    }
    out.push_str(&pretty_expr(&p.main));
    out.push('\n');
    out
}

pub fn pretty_decl(d: &VariantDecl) -> String {
    let mut s = format!("type {} =", d.name);
    for (i, (c, fields)) in d.ctors.iter().enumerate() {
        s.push_str(if i == 0 { " " } else { " | " });
        s.push_str(c);
        if !fields.is_empty() {
            s.push_str(" of ");
            let parts: Vec<String> = fields.iter().map(type_atom).collect();
            s.push_str(&parts.join(" * "));
        }
    }
    s
}

fn type_atom(t: &Type) -> String {
    match t {
        Type::Tuple(_) | Type::Fun(..) => format!("({t})"),
        _ => t.to_string(),
    }
}

/// A type that may not contain a top-level arrow.
fn type_no_arrow(t: &Type) -> String {
    match t {
        Type::Fun(..) => format!("({t})"),
        _ => t.to_string(),
    }
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut out = String::new();
    Printer { out: &mut out }.expr(e, OPEN);
    out
}

struct Printer<'a> {
    out: &'a mut String,
}

impl Printer<'_> {
    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    /// Prints `e` so that it parses back at precedence `min`.
    fn expr(&mut self, e: &Expr, min: u8) {
        if level(e) < min {
            self.push("(");
            self.bare(e);
            self.push(")");
        } else {
            self.bare(e);
        }
    }

    fn bare(&mut self, e: &Expr) {
        use ExprKind::*;
        match &e.kind {
            Lambda { params, ret, body } => {
                self.push("fun ");
                if params.iter().all(|p| p.ann.is_none()) {
                    let names: Vec<&str> = params.iter().map(|p| &*p.name).collect();
                    self.push(&names.join(" "));
                } else {
                    self.push("(");
                    for (i, p) in params.iter().enumerate() {
                        if i > 0 {
                            self.push(", ");
                        }
                        self.push(&p.name);
                        if let Some(t) = &p.ann {
                            let _ = write!(self.out, ":{t}");
                        }
                    }
                    self.push(")");
                }
                if let Some(t) = ret {
                    let _ = write!(self.out, " : {}", type_no_arrow(t));
                }
                self.push(" -> ");
                self.expr(body, OPEN);
            }
            App { callee, args } => {
                self.expr(callee, POSTFIX);
                for a in args {
                    self.push(" ");
                    self.expr(a, POSTFIX);
                }
            }
            Var(x) => self.push(x),
            Int(n) => {
                let _ = write!(self.out, "{n}");
            }
            Float(x) => {
                let _ = write!(self.out, "{x:?}");
            }
            Bool(b) => self.push(if *b { "true" } else { "false" }),
            Unit => self.push("()"),
            Binary { op, lhs, rhs } => {
                let l = binop_level(*op);
                let comparison = op.precedence() == 3;
                self.expr(lhs, if comparison { l + 1 } else { l });
                let _ = write!(self.out, " {} ", op.symbol());
                self.expr(rhs, l + 1);
            }
            Prim { op, args } => {
                self.push(op.name());
                for a in args {
                    self.push(" ");
                    self.expr(a, POSTFIX);
                }
            }
            If { cond, then_branch, else_branch } => {
                self.push("if ");
                self.expr(cond, OPEN);
                self.push(" then ");
                self.expr(then_branch, ASSIGN);
                self.push(" else ");
                self.expr(else_branch, ASSIGN);
            }
            Loop { var, lo, hi, body } => {
                let _ = write!(self.out, "loop {var} = ");
                self.expr(lo, OPEN);
                self.push(" to ");
                self.expr(hi, OPEN);
                self.push(" do ");
                self.expr(body, OPEN);
                self.push(" done");
            }
            Let { name, ann, bound, body } | LetRec { name, ann, bound, body } => {
                self.push(if matches!(e.kind, LetRec { .. }) { "let rec " } else { "let " });
                self.push(name);
                if let Some(t) = ann {
                    let _ = write!(self.out, " : {t}");
                }
                self.push(" = ");
                self.expr(bound, OPEN);
                self.push(" in\n");
                self.expr(body, OPEN);
            }
            MakeRef(x) => {
                self.push("ref ");
                self.expr(x, POSTFIX);
            }
            Deref(x) => {
                self.push("!");
                self.expr(x, UNARY);
            }
            Assign { target, value } => {
                self.expr(target, ASCRIBE);
                self.push(" := ");
                self.expr(value, ASSIGN);
            }
            MakeVec { len, init } => {
                self.push("vector ");
                self.expr(len, POSTFIX);
                self.push(" ");
                self.expr(init, POSTFIX);
            }
            VecGet { vec, index } => {
                self.expr(vec, POSTFIX);
                self.push(".[");
                self.expr(index, OPEN);
                self.push("]");
            }
            VecSet { vec, index, value } => {
                self.expr(vec, POSTFIX);
                self.push(".[");
                self.expr(index, OPEN);
                self.push("] <- ");
                self.expr(value, ASSIGN);
            }
            Tuple(items) => {
                self.push("(");
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        self.push(", ");
                    }
                    self.expr(it, OPEN);
                }
                self.push(")");
            }
            Proj { tuple, index } => {
                let _ = write!(self.out, "#{index} ");
                self.expr(tuple, UNARY);
            }
            Ctor { name, args } => {
                self.push(name);
                match args.len() {
                    0 => {}
                    1 => {
                        self.push(" ");
                        self.expr(&args[0], POSTFIX);
                    }
                    _ => {
                        self.push(" (");
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                self.push(", ");
                            }
                            self.expr(a, OPEN);
                        }
                        self.push(")");
                    }
                }
            }
            Match { scrutinee, arms } => {
                self.push("match ");
                self.expr(scrutinee, OPEN);
                self.push(" with");
                for (i, arm) in arms.iter().enumerate() {
                    let _ = write!(self.out, "\n| {}", arm.ctor);
                    if !arm.binders.is_empty() {
                        let bs: Vec<&str> = arm.binders.iter().map(|b| b.as_deref().unwrap_or("_")).collect();
                        let _ = write!(self.out, " ({})", bs.join(", "));
                    }
                    self.push(" -> ");
                    let last = i + 1 == arms.len();
                    self.expr(&arm.body, if last { OPEN } else { ASSIGN });
                }
            }
            Ascribe { expr, ty } => {
                self.expr(expr, ASCRIBE);
                let _ = write!(self.out, " :: {ty}");
            }
            Seq(a, b) => {
                self.expr(a, ASSIGN);
                self.push(";\n");
                self.expr(b, OPEN);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_source;

    fn round_trip(src: &str) {
        let p = parse_source(src).unwrap().without_spans();
        let printed = pretty_program(&p);
        let q = parse_source(&printed).unwrap_or_else(|e| panic!("{printed}\n{e}")).without_spans();
        assert_eq!(p, q, "{printed}");
    }

    #[test]
    fn simple_round_trips() {
        round_trip("1 + 2");
        round_trip("(1 + 2) * 3 - (4 - 5)");
        round_trip("let f : ?->int = fun g -> g 1 in f true");
        round_trip("let x = ref (4 :: ?) in let y: ref[bool] = x in y := true; !y");
        round_trip("f (-1) (g 2) x.[0]");
        round_trip("#1 (1, (2, 3)) :: int * int :: ?");
        round_trip("if true then (a; b) else let x = 1 in x");
        round_trip("type s = A of int * (int -> s) | B\nmatch A (1, fun x -> B) with | A (x, _) -> (match B with B -> 1) | B -> 2");
        round_trip("loop i = 0 to 10 do print_int i done; v.[i] <- v.[i] + 1");
        round_trip("fun (x:int, y) : (int -> int) -> fun z -> x + y + z");
        round_trip("let rec f (n:int) : int = if n <= 0 then 0 else f (n - 1) in f 10");
        round_trip("-4611686018427387904 + 1");
        round_trip("print_float (-2.5 +. 1e20)");
    }

    #[test]
    fn absent_annotation_is_not_printed() {
        let p = parse_source("fun x -> x").unwrap();
        assert_eq!(pretty_expr(&p.main), "fun x -> x");
        let p = parse_source("fun (x:?) -> x").unwrap();
        assert_eq!(pretty_expr(&p.main), "fun (x:?) -> x");
    }

    #[test]
    fn ascription_syntax() {
        let p = parse_source("false :: ?").unwrap();
        assert_eq!(pretty_expr(&p.main), "false :: ?");
    }
}
