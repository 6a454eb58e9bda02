use std::sync::Arc;

use crate::span::Span;
use crate::types::Type;

pub type Ident = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    FAdd,
    FSub,
    FMul,
    FDiv,
    FEq,
    FLt,
    FLe,
    FGt,
    FGe,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Eq => "=",
            Ne => "<>",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            FAdd => "+.",
            FSub => "-.",
            FMul => "*.",
            FDiv => "/.",
            FEq => "=.",
            FLt => "<.",
            FLe => "<=.",
            FGt => ">.",
            FGe => ">=.",
            And => "&&",
            Or => "||",
        }
    }

    /// Operand type, result type.
    pub fn signature(self) -> (Type, Type) {
        use BinOp::*;
        match self {
            Add | Sub | Mul | Div | Mod => (Type::Int, Type::Int),
            Eq | Ne | Lt | Le | Gt | Ge => (Type::Int, Type::Bool),
            FAdd | FSub | FMul | FDiv => (Type::Float, Type::Float),
            FEq | FLt | FLe | FGt | FGe => (Type::Float, Type::Bool),
            And | Or => (Type::Bool, Type::Bool),
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        use BinOp::*;
        match self {
            Or => 1,
            And => 2,
            Eq | Ne | Lt | Le | Gt | Ge | FEq | FLt | FLe | FGt | FGe => 3,
            Add | Sub | FAdd | FSub => 4,
            Mul | Div | Mod | FMul | FDiv => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimOp {
    PrintInt,
    PrintBool,
    PrintFloat,
    ReadInt,
    ReadFloat,
    Not,
    FloatOfInt,
    IntOfFloat,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
    FAbs,
    Abs,
}

impl PrimOp {
    pub const ALL: [PrimOp; 15] = [
        PrimOp::PrintInt,
        PrimOp::PrintBool,
        PrimOp::PrintFloat,
        PrimOp::ReadInt,
        PrimOp::ReadFloat,
        PrimOp::Not,
        PrimOp::FloatOfInt,
        PrimOp::IntOfFloat,
        PrimOp::Sqrt,
        PrimOp::Sin,
        PrimOp::Cos,
        PrimOp::Exp,
        PrimOp::Log,
        PrimOp::FAbs,
        PrimOp::Abs,
    ];

    pub fn name(self) -> &'static str {
        use PrimOp::*;
        match self {
            PrintInt => "print_int",
            PrintBool => "print_bool",
            PrintFloat => "print_float",
            ReadInt => "read_int",
            ReadFloat => "read_float",
            Not => "not",
            FloatOfInt => "float_of_int",
            IntOfFloat => "int_of_float",
            Sqrt => "sqrt",
            Sin => "sin",
            Cos => "cos",
            Exp => "exp",
            Log => "log",
            FAbs => "fabs",
            Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<PrimOp> {
        PrimOp::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Parameter types and result type.
    pub fn signature(self) -> (&'static [Type], Type) {
        use PrimOp::*;
        use Type::*;
        match self {
            PrintInt => (&[Int], Unit),
            PrintBool => (&[Bool], Unit),
            PrintFloat => (&[Float], Unit),
            ReadInt => (&[Unit], Int),
            ReadFloat => (&[Unit], Float),
            Not => (&[Bool], Bool),
            FloatOfInt => (&[Int], Float),
            IntOfFloat => (&[Float], Int),
            Sqrt | Sin | Cos | Exp | Log | FAbs => (&[Float], Float),
            Abs => (&[Int], Int),
        }
    }

    pub fn arity(self) -> usize {
        self.signature().0.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub ann: Option<Type>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arm {
    pub ctor: Ident,
    /// `None` for a `_` binder.
    pub binders: Vec<Option<Ident>>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Lambda { params: Vec<Param>, ret: Option<Type>, body: Box<Expr> },
    App { callee: Box<Expr>, args: Vec<Expr> },
    Var(Ident),
    Int(i64),
    Float(f64),
    Bool(bool),
    Unit,
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Prim { op: PrimOp, args: Vec<Expr> },
    If { cond: Box<Expr>, then_branch: Box<Expr>, else_branch: Box<Expr> },
    Loop { var: Ident, lo: Box<Expr>, hi: Box<Expr>, body: Box<Expr> },
    Let { name: Ident, ann: Option<Type>, bound: Box<Expr>, body: Box<Expr> },
    LetRec { name: Ident, ann: Option<Type>, bound: Box<Expr>, body: Box<Expr> },
    MakeRef(Box<Expr>),
    Deref(Box<Expr>),
    Assign { target: Box<Expr>, value: Box<Expr> },
    MakeVec { len: Box<Expr>, init: Box<Expr> },
    VecGet { vec: Box<Expr>, index: Box<Expr> },
    VecSet { vec: Box<Expr>, index: Box<Expr>, value: Box<Expr> },
    Tuple(Vec<Expr>),
    Proj { tuple: Box<Expr>, index: usize },
    Ctor { name: Ident, args: Vec<Expr> },
    Match { scrutinee: Box<Expr>, arms: Vec<Arm> },
    Ascribe { expr: Box<Expr>, ty: Type },
    Seq(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Direct sub-expressions, left to right.
    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
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
            Match { scrutinee, arms } => {
                std::iter::once(&**scrutinee).chain(arms.iter().map(|a| &a.body)).collect()
            }
            Seq(a, b) => vec![a, b],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Expr> {
        use ExprKind::*;
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
            Match { scrutinee, arms } => std::iter::once(&mut **scrutinee)
                .chain(arms.iter_mut().map(|a| &mut a.body))
                .collect(),
            Seq(a, b) => vec![a, b],
        }
    }

    /// Visits every type annotation in pre-order: parameters, then the return
    /// annotation, then the node's sub-expressions.
    pub fn visit_annotations_mut(&mut self, f: &mut dyn FnMut(&mut Type)) {
        match &mut self.kind {
            ExprKind::Lambda { params, ret, .. } => {
                for p in params.iter_mut() {
                    if let Some(t) = &mut p.ann {
                        f(t);
                    }
                }
                if let Some(t) = ret {
                    f(t);
                }
            }
            ExprKind::Let { ann: Some(t), .. } | ExprKind::LetRec { ann: Some(t), .. } => f(t),
            ExprKind::Ascribe { ty, .. } => f(ty),
            _ => {}
        }
        for c in self.children_mut() {
            c.visit_annotations_mut(f);
        }
    }

    pub fn visit_annotations(&self, f: &mut dyn FnMut(&Type)) {
        match &self.kind {
            ExprKind::Lambda { params, ret, .. } => {
                params.iter().filter_map(|p| p.ann.as_ref()).for_each(&mut *f);
                if let Some(t) = ret {
                    f(t);
                }
            }
            ExprKind::Let { ann: Some(t), .. } | ExprKind::LetRec { ann: Some(t), .. } => f(t),
            ExprKind::Ascribe { ty, .. } => f(ty),
            _ => {}
        }
        for c in self.children() {
            c.visit_annotations(f);
        }
    }

    pub fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Lambda { params, .. } => params.iter_mut().for_each(|p| p.span = Span::default()),
            ExprKind::Match { arms, .. } => arms.iter_mut().for_each(|a| a.span = Span::default()),
            _ => {}
        }
        for c in self.children_mut() {
            c.clear_spans();
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariantDecl {
    pub name: Ident,
    pub ctors: Vec<(Ident, Vec<Type>)>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub variants: Vec<VariantDecl>,
    pub main: Expr,
}

impl Program {
    /// Visits every annotation site: constructor field types first, then
    /// the main expression in pre-order. The order is stable, so the n-th
    /// visited type is the n-th annotation site.
    pub fn visit_annotations_mut(&mut self, f: &mut dyn FnMut(&mut Type)) {
        for d in &mut self.variants {
            for (_, fields) in &mut d.ctors {
                fields.iter_mut().for_each(&mut *f);
            }
        }
        self.main.visit_annotations_mut(f);
    }

    pub fn visit_annotations(&self, f: &mut dyn FnMut(&Type)) {
        for d in &self.variants {
            for (_, fields) in &d.ctors {
                fields.iter().for_each(&mut *f);
            }
        }
        self.main.visit_annotations(f);
    }

    /// Copy with all spans zeroed, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        for d in &mut p.variants {
            d.span = Span::default();
        }
        p.main.clear_spans();
        p
    }

    /// Replaces every annotation by `?`, including absent binder
    /// annotations, and drops source ascriptions.
    pub fn make_fully_dynamic(&mut self) {
        for d in &mut self.variants {
            for (_, fields) in &mut d.ctors {
                fields.iter_mut().for_each(|t| *t = Type::Dyn);
            }
        }
        dynamize_expr(&mut self.main);
    }
}

fn dynamize_expr(e: &mut Expr) {
    match &mut e.kind {
        ExprKind::Lambda { params, ret, .. } => {
            params.iter_mut().for_each(|p| p.ann = Some(Type::Dyn));
            *ret = Some(Type::Dyn);
        }
        ExprKind::Let { ann, .. } | ExprKind::LetRec { ann, .. } => *ann = Some(Type::Dyn),
        ExprKind::Ascribe { expr, .. } => {
            let inner = std::mem::replace(&mut **expr, Expr::new(ExprKind::Unit, Span::default()));
            *e = inner;
            dynamize_expr(e);
            return;
        }
        _ => {}
    }
    for c in e.children_mut() {
        dynamize_expr(c);
    }
}
