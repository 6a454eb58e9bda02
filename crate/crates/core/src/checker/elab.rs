use std::fmt::{self, Write};

use crate::evidence::Evidence;
use crate::span::Span;
use crate::surface::{BinOp, Ident, PrimOp};
use crate::types::{Name, Type, VariantEnv};

/// Where an ascription came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AscKind {
    /// Evidence attached to a literal or lambda.
    Value,
    /// Inserted where typing used consistency.
    Implicit,
    /// Written by the programmer as `e :: T`.
    Source,
    /// Operand of an elimination form, targeting its germ.
    Germ,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElabExpr {
    pub kind: EKind,
    pub ty: Type,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EArm {
    pub ctor: Ident,
    pub tag: u32,
    pub binders: Vec<(Option<Ident>, Type)>,
    pub body: ElabExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EKind {
    Lambda { params: Vec<(Ident, Type)>, ret: Type, body: Box<ElabExpr> },
    App { callee: Box<ElabExpr>, args: Vec<ElabExpr> },
    Var(Ident),
    Int(i64),
    Float(f64),
    Bool(bool),
    Unit,
    Binary { op: BinOp, lhs: Box<ElabExpr>, rhs: Box<ElabExpr> },
    Prim { op: PrimOp, args: Vec<ElabExpr> },
    If { cond: Box<ElabExpr>, then_branch: Box<ElabExpr>, else_branch: Box<ElabExpr> },
    Loop { var: Ident, lo: Box<ElabExpr>, hi: Box<ElabExpr>, body: Box<ElabExpr> },
    Let { name: Ident, ty: Type, bound: Box<ElabExpr>, body: Box<ElabExpr> },
    LetRec { name: Ident, ty: Type, bound: Box<ElabExpr>, body: Box<ElabExpr> },
    MakeRef(Box<ElabExpr>),
    Deref(Box<ElabExpr>),
    Assign { target: Box<ElabExpr>, value: Box<ElabExpr> },
    MakeVec { len: Box<ElabExpr>, init: Box<ElabExpr> },
    VecGet { vec: Box<ElabExpr>, index: Box<ElabExpr> },
    VecSet { vec: Box<ElabExpr>, index: Box<ElabExpr>, value: Box<ElabExpr> },
    Tuple(Vec<ElabExpr>),
    Proj { tuple: Box<ElabExpr>, index: usize },
    Ctor { variant: Name, ctor: Ident, tag: u32, args: Vec<ElabExpr> },
    Match { scrutinee: Box<ElabExpr>, variant: Name, arms: Vec<EArm> },
    /// `<ev> expr` at the node's type.
    Ascribe { expr: Box<ElabExpr>, ev: Evidence, kind: AscKind },
    Seq(Box<ElabExpr>, Box<ElabExpr>),
}

#[derive(Clone, Debug)]
pub struct ElabProgram {
    pub variants: VariantEnv,
    pub main: ElabExpr,
}

impl ElabExpr {
    pub fn new(kind: EKind, ty: Type, span: Span) -> Self {
        ElabExpr { kind, ty, span }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self.kind, EKind::Int(_) | EKind::Float(_) | EKind::Bool(_) | EKind::Unit)
    }

    pub fn children(&self) -> Vec<&ElabExpr> {
        use EKind::*;
        match &self.kind {
            Var(_) | Int(_) | Float(_) | Bool(_) | Unit => vec![],
            Lambda { body, .. } => vec![body],
            App { callee, args } => std::iter::once(&**callee).chain(args.iter()).collect(),
            Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Prim { args, .. } | Tuple(args) | Ctor { args, .. } => args.iter().collect(),
            If { cond, then_branch, else_branch } => vec![cond, then_branch, else_branch],
            Loop { lo, hi, body, .. } => vec![lo, hi, body],
            Let { bound, body, .. } | LetRec { bound, body, .. } => vec![bound, body],
            MakeRef(e) | Deref(e) | Proj { tuple: e, .. } | Ascribe { expr: e, .. } => vec![e],
            Assign { target, value } => vec![target, value],
            MakeVec { len, init } => vec![len, init],
            VecGet { vec, index } => vec![vec, index],
            VecSet { vec, index, value } => vec![vec, index, value],
            Match { scrutinee, arms, .. } => {
                std::iter::once(&**scrutinee).chain(arms.iter().map(|a| &a.body)).collect()
            }
            Seq(a, b) => vec![a, b],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut ElabExpr> {
        use EKind::*;
        match &mut self.kind {
            Var(_) | Int(_) | Float(_) | Bool(_) | Unit => vec![],
            Lambda { body, .. } => vec![body],
            App { callee, args } => std::iter::once(&mut **callee).chain(args.iter_mut()).collect(),
            Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Prim { args, .. } | Tuple(args) | Ctor { args, .. } => args.iter_mut().collect(),
            If { cond, then_branch, else_branch } => vec![cond, then_branch, else_branch],
            Loop { lo, hi, body, .. } => vec![lo, hi, body],
            Let { bound, body, .. } | LetRec { bound, body, .. } => vec![bound, body],
            MakeRef(e) | Deref(e) | Proj { tuple: e, .. } | Ascribe { expr: e, .. } => vec![e],
            Assign { target, value } => vec![target, value],
            MakeVec { len, init } => vec![len, init],
            VecGet { vec, index } => vec![vec, index],
            VecSet { vec, index, value } => vec![vec, index, value],
            Match { scrutinee, arms, .. } => std::iter::once(&mut **scrutinee)
                .chain(arms.iter_mut().map(|a| &mut a.body))
                .collect(),
            Seq(a, b) => vec![a, b],
        }
    }

    /// Pre-order visit of every node.
    pub fn walk(&self, f: &mut dyn FnMut(&ElabExpr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn count_ascriptions(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |e| {
            if matches!(e.kind, EKind::Ascribe { .. }) {
                n += 1;
            }
        });
        n
    }
}

// ---- printing in `<G>e` notation ----

fn is_atomic(e: &ElabExpr) -> bool {
    matches!(
        e.kind,
        EKind::Var(_) | EKind::Int(_) | EKind::Float(_) | EKind::Bool(_) | EKind::Unit | EKind::Tuple(_)
    ) && !matches!(e.kind, EKind::Int(n) if n < 0)
}

fn is_operand(e: &ElabExpr) -> bool {
    is_atomic(e) || matches!(e.kind, EKind::Ascribe { .. } | EKind::Deref(_) | EKind::VecGet { .. })
}

struct Printer<'a> {
    out: &'a mut String,
}

impl Printer<'_> {
    fn wrap(&mut self, e: &ElabExpr, bare: bool) {
        if bare {
            self.expr(e);
        } else {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        }
    }

    fn operand(&mut self, e: &ElabExpr) {
        self.wrap(e, is_operand(e));
    }

    fn expr(&mut self, e: &ElabExpr) {
        use EKind::*;
        let out = &mut *self.out;
        match &e.kind {
            Var(x) => out.push_str(x),
            Int(n) => {
                let _ = write!(out, "{n}");
            }
            Float(x) => {
                let _ = write!(out, "{x:?}");
            }
            Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Unit => out.push_str("()"),
            Lambda { params, body, .. } => {
                out.push_str("fun (");
                for (i, (x, t)) in params.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{x}:{t}");
                }
                out.push_str(") -> ");
                self.expr(body);
            }
            App { callee, args } => {
                self.operand(callee);
                for a in args {
                    self.out.push(' ');
                    self.operand(a);
                }
            }
            Binary { op, lhs, rhs } => {
                self.operand(lhs);
                let _ = write!(self.out, " {} ", op.symbol());
                self.operand(rhs);
            }
            Prim { op, args } => {
                out.push_str(op.name());
                for a in args {
                    self.out.push(' ');
                    self.operand(a);
                }
            }
            If { cond, then_branch, else_branch } => {
                out.push_str("if ");
                self.expr(cond);
                self.out.push_str(" then ");
                self.operand(then_branch);
                self.out.push_str(" else ");
                self.operand(else_branch);
            }
            Loop { var, lo, hi, body } => {
                let _ = write!(out, "loop {var} = ");
                self.expr(lo);
                self.out.push_str(" to ");
                self.expr(hi);
                self.out.push_str(" do ");
                self.expr(body);
                self.out.push_str(" done");
            }
            Let { name, bound, body, .. } | LetRec { name, bound, body, .. } => {
                let kw = if matches!(e.kind, LetRec { .. }) { "let rec" } else { "let" };
                let _ = write!(out, "{kw} {name} = ");
                self.expr(bound);
                self.out.push_str(" in ");
                self.expr(body);
            }
            MakeRef(x) => {
                out.push_str("ref ");
                self.operand(x);
            }
            Deref(x) => {
                out.push('!');
                self.operand(x);
            }
            Assign { target, value } => {
                self.operand(target);
                self.out.push_str(" := ");
                self.operand(value);
            }
            MakeVec { len, init } => {
                out.push_str("vector ");
                self.operand(len);
                self.out.push(' ');
                self.operand(init);
            }
            VecGet { vec, index } => {
                self.operand(vec);
                self.out.push_str(".[");
                self.expr(index);
                self.out.push(']');
            }
            VecSet { vec, index, value } => {
                self.operand(vec);
                self.out.push_str(".[");
                self.expr(index);
                self.out.push_str("] <- ");
                self.operand(value);
            }
            Tuple(items) => {
                out.push('(');
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.expr(it);
                }
                self.out.push(')');
            }
            Proj { tuple, index } => {
                let _ = write!(out, "#{index} ");
                self.operand(tuple);
            }
            Ctor { ctor, args, .. } => {
                out.push_str(ctor);
                if !args.is_empty() {
                    self.out.push_str(" (");
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            self.out.push_str(", ");
                        }
                        self.expr(a);
                    }
                    self.out.push(')');
                }
            }
            Match { scrutinee, arms, .. } => {
                out.push_str("match ");
                self.expr(scrutinee);
                self.out.push_str(" with");
                for arm in arms {
                    let _ = write!(self.out, " | {}", arm.ctor);
                    if !arm.binders.is_empty() {
                        let bs: Vec<&str> = arm.binders.iter().map(|(b, _)| b.as_deref().unwrap_or("_")).collect();
                        let _ = write!(self.out, " ({})", bs.join(", "));
                    }
                    self.out.push_str(" -> ");
                    self.operand(&arm.body);
                }
            }
            Ascribe { expr, ev, kind } => {
                let _ = write!(out, "{ev}");
                self.wrap(expr, is_atomic(expr));
                if *kind == AscKind::Source {
                    let _ = write!(self.out, "::{}", e.ty);
                }
            }
            Seq(a, b) => {
                self.operand(a);
                self.out.push_str("; ");
                self.expr(b);
            }
        }
    }
}

impl fmt::Display for ElabExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        Printer { out: &mut s }.expr(self);
        f.write_str(&s)
    }
}

impl fmt::Display for ElabProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.variants.variants() {
            write!(f, "type {} =", v.name)?;
            for (i, c) in v.ctors.iter().enumerate() {
                f.write_str(if i == 0 { " " } else { " | " })?;
                f.write_str(&c.name)?;
                if !c.fields.is_empty() {
                    let fs: Vec<String> = c.fields.iter().map(|t| format!("({t})")).collect();
                    write!(f, " of {}", fs.join(" * "))?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "{}", self.main)
    }
}
