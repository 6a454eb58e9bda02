use std::fmt::{self, Write};

use crate::checker::AscKind;
use crate::evidence::{ContentKind, Evidence};
use crate::span::Span;
use crate::surface::{BinOp, Ident, PrimOp};
use crate::types::{ElimKind, Name, Type, VariantEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

/// Where a variable lives once closures are converted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loc {
    /// Not yet assigned.
    Free,
    Local(u32),
    Env(u32),
    /// The closure a recursive binding is defining.
    Rec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var {
    pub id: VarId,
    pub loc: Loc,
}

impl Var {
    pub fn new(id: VarId) -> Self {
        Var { id, loc: Loc::Free }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Atom {
    Var(Var),
    Int(i64),
    Float(f64),
    Bool(bool),
    Unit,
}

impl Atom {
    pub fn var_id(&self) -> Option<VarId> {
        match self {
            Atom::Var(v) => Some(v.id),
            _ => None,
        }
    }
}

/// Runtime evidence read from a value.
#[derive(Clone, Debug, PartialEq)]
pub enum EvSource {
    /// `i`-th domain of the callee's evidence.
    Dom(usize, Atom),
    /// Codomain of the closure currently running.
    Cod,
    /// Content position of a structure, for a value read from it.
    Content(ContentKind, Atom),
    /// Content position of a structure, for a value written into it.
    Store(ContentKind, Atom),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaDef {
    pub params: Vec<Var>,
    pub ret: Type,
    /// Evidence the closure starts with.
    pub ev: Evidence,
    pub body: Block,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeId(pub u32);

#[derive(Clone, Debug, PartialEq)]
pub enum Comp {
    Atom(Atom),
    Lambda(Box<LambdaDef>),
    MakeClosure { code: CodeId, captured: Vec<Atom>, ev: Evidence },
    App { callee: Atom, args: Vec<Atom> },
    /// Call to a known code label; `callee` supplies the environment.
    DirectCall { code: CodeId, callee: Atom, args: Vec<Atom> },
    Binary { op: BinOp, lhs: Atom, rhs: Atom },
    Prim { op: PrimOp, args: Vec<Atom> },
    /// `ty` is the static type of the creation expression.
    MakeRef { init: Atom, ty: Type },
    Deref(Atom),
    Assign { target: Atom, value: Atom },
    MakeVec { len: Atom, init: Atom, ty: Type },
    VecGet { vec: Atom, index: Atom },
    VecSet { vec: Atom, index: Atom, value: Atom },
    Tuple { items: Vec<Atom>, ty: Type },
    Proj { tuple: Atom, index: usize },
    Ctor { variant: Name, ctor: Ident, tag: u32, args: Vec<Atom> },
    /// Static ascription: evidence known at compile time.
    Ascribe { atom: Atom, ev: Evidence, target: Type, kind: AscKind },
    /// Ascription to evidence extracted at runtime.
    DynAscribe { atom: Atom, source: EvSource },
    /// Head-constructor check standing in for a germ ascription.
    CheckGerm { atom: Atom, kind: ElimKind },
    If { cond: Atom, then_block: Block, else_block: Block },
    Loop { var: Var, lo: Atom, hi: Atom, body: Block },
    Match { scrutinee: Atom, variant: Name, arms: Vec<CArm> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CArm {
    pub ctor: Ident,
    pub tag: u32,
    pub binders: Vec<Option<Var>>,
    pub body: Block,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub var: Var,
    pub comp: Comp,
    pub span: Span,
    /// The bound closure may refer to itself through `var`.
    pub rec: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub ret: Option<Atom>,
}

impl Block {
    pub fn result(&self) -> Atom {
        self.ret.unwrap_or(Atom::Unit)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarInfo {
    pub name: Ident,
    pub ty: Type,
}

/// A lifted function body.
#[derive(Clone, Debug, PartialEq)]
pub struct Code {
    pub id: CodeId,
    pub params: Vec<Var>,
    pub ret: Type,
    pub captured: Vec<VarId>,
    pub rec_var: Option<VarId>,
    pub body: Block,
    pub frame_size: u32,
    /// Every call site is a direct call.
    pub direct: bool,
}

#[derive(Clone, Debug)]
pub struct CoreProgram {
    pub variants: VariantEnv,
    pub vars: Vec<VarInfo>,
    pub codes: Vec<Code>,
    pub main: Block,
    pub main_frame: u32,
    /// Every type mentioned by the program is static.
    pub fully_static: bool,
}

impl CoreProgram {
    pub fn var(&self, id: VarId) -> &VarInfo {
        &self.vars[id.0 as usize]
    }

    pub fn fresh(&mut self, hint: &str, ty: Type) -> Var {
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarInfo { name: format!("{hint}{}", id.0).into(), ty });
        Var::new(id)
    }

    pub fn atom_type(&self, a: &Atom) -> Type {
        match a {
            Atom::Var(v) => self.var(v.id).ty.clone(),
            Atom::Int(_) => Type::Int,
            Atom::Float(_) => Type::Float,
            Atom::Bool(_) => Type::Bool,
            Atom::Unit => Type::Unit,
        }
    }

    pub fn count_comps(&self, pred: &mut dyn FnMut(&Comp) -> bool) -> usize {
        let mut n = 0;
        let mut f = |c: &Comp| {
            if pred(c) {
                n += 1;
            }
        };
        self.main.visit(&mut f);
        for c in &self.codes {
            c.body.visit(&mut f);
        }
        n
    }
}

impl Comp {
    /// Nested blocks, in source order.
    pub fn blocks(&self) -> Vec<&Block> {
        match self {
            Comp::Lambda(l) => vec![&l.body],
            Comp::If { then_block, else_block, .. } => vec![then_block, else_block],
            Comp::Loop { body, .. } => vec![body],
            Comp::Match { arms, .. } => arms.iter().map(|a| &a.body).collect(),
            _ => vec![],
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Block> {
        match self {
            Comp::Lambda(l) => vec![&mut l.body],
            Comp::If { then_block, else_block, .. } => vec![then_block, else_block],
            Comp::Loop { body, .. } => vec![body],
            Comp::Match { arms, .. } => arms.iter_mut().map(|a| &mut a.body).collect(),
            _ => vec![],
        }
    }

    /// Atoms read directly by this computation (not inside nested blocks).
    pub fn atoms_mut(&mut self) -> Vec<&mut Atom> {
        use Comp::*;
        match self {
            Atom(a) | MakeRef { init: a, .. } | Deref(a) | Proj { tuple: a, .. } | CheckGerm { atom: a, .. } => vec![a],
            Ascribe { atom, .. } => vec![atom],
            DynAscribe { atom, source } => match source {
                EvSource::Dom(_, f) | EvSource::Content(_, f) | EvSource::Store(_, f) => vec![atom, f],
                EvSource::Cod => vec![atom],
            },
            Lambda(_) => vec![],
            MakeClosure { captured, .. } => captured.iter_mut().collect(),
            App { callee, args } | DirectCall { callee, args, .. } => {
                std::iter::once(callee).chain(args.iter_mut()).collect()
            }
            Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Prim { args, .. } | Tuple { items: args, .. } | Ctor { args, .. } => args.iter_mut().collect(),
            Assign { target, value } => vec![target, value],
            MakeVec { len, init, .. } => vec![len, init],
            VecGet { vec, index } => vec![vec, index],
            VecSet { vec, index, value } => vec![vec, index, value],
            If { cond, .. } => vec![cond],
            Loop { lo, hi, .. } => vec![lo, hi],
            Match { scrutinee, .. } => vec![scrutinee],
        }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        use Comp::*;
        match self {
            Atom(a) | MakeRef { init: a, .. } | Deref(a) | Proj { tuple: a, .. } | CheckGerm { atom: a, .. } => vec![*a],
            Ascribe { atom, .. } => vec![*atom],
            DynAscribe { atom, source } => match source {
                EvSource::Dom(_, f) | EvSource::Content(_, f) | EvSource::Store(_, f) => vec![*atom, *f],
                EvSource::Cod => vec![*atom],
            },
            Lambda(_) => vec![],
            MakeClosure { captured, .. } => captured.clone(),
            App { callee, args } | DirectCall { callee, args, .. } => {
                std::iter::once(*callee).chain(args.iter().copied()).collect()
            }
            Binary { lhs, rhs, .. } => vec![*lhs, *rhs],
            Prim { args, .. } | Tuple { items: args, .. } | Ctor { args, .. } => args.clone(),
            Assign { target, value } => vec![*target, *value],
            MakeVec { len, init, .. } => vec![*len, *init],
            VecGet { vec, index } => vec![*vec, *index],
            VecSet { vec, index, value } => vec![*vec, *index, *value],
            If { cond, .. } => vec![*cond],
            Loop { lo, hi, .. } => vec![*lo, *hi],
            Match { scrutinee, .. } => vec![*scrutinee],
        }
    }
}

impl Block {
    /// Pre-order visit of every computation, including nested blocks.
    pub fn visit(&self, f: &mut dyn FnMut(&Comp)) {
        for s in &self.stmts {
            f(&s.comp);
            for b in s.comp.blocks() {
                b.visit(f);
            }
        }
    }

    pub fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Comp)) {
        for s in &mut self.stmts {
            f(&mut s.comp);
            for b in s.comp.blocks_mut() {
                b.visit_mut(f);
            }
        }
    }
}

// ---- printing ----

struct Printer<'a> {
    p: &'a CoreProgram,
    out: String,
}

fn check_name(kind: &ElimKind) -> String {
    match kind {
        ElimKind::Apply(_) => "checkfun".into(),
        ElimKind::Deref => "checkref".into(),
        ElimKind::VecAccess => "checkvec".into(),
        ElimKind::TupleProj(_) => "checktuple".into(),
        ElimKind::Match(n) => format!("check[{n}]"),
    }
}

impl Printer<'_> {
    fn atom(&mut self, a: &Atom) {
        let _ = match a {
            Atom::Var(v) => write!(self.out, "{}", self.p.var(v.id).name),
            Atom::Int(n) => write!(self.out, "{n}"),
            Atom::Float(x) => write!(self.out, "{x:?}"),
            Atom::Bool(b) => write!(self.out, "{b}"),
            Atom::Unit => write!(self.out, "()"),
        };
    }

    fn atoms(&mut self, xs: &[Atom], sep: &str) {
        for (i, a) in xs.iter().enumerate() {
            if i > 0 {
                self.out.push_str(sep);
            }
            self.atom(a);
        }
    }

    fn indent(&mut self, depth: usize) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
    }

    fn block(&mut self, b: &Block, depth: usize) {
        for s in &b.stmts {
            self.indent(depth);
            let kw = if s.rec { "let rec" } else { "let" };
            let v = self.p.var(s.var.id);
            let _ = write!(self.out, "{kw} {}:{} = ", v.name, v.ty);
            self.comp(&s.comp, depth);
            self.out.push_str(" in\n");
        }
        self.indent(depth);
        self.atom(&b.result());
    }

    fn nested(&mut self, b: &Block, depth: usize) {
        self.out.push_str("(\n");
        self.block(b, depth + 1);
        self.out.push('\n');
        self.indent(depth);
        self.out.push(')');
    }

    fn comp(&mut self, c: &Comp, depth: usize) {
        use Comp::*;
        match c {
            Atom(a) => self.atom(a),
            Lambda(l) => {
                self.out.push_str("fun (");
                for (i, x) in l.params.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    let v = self.p.var(x.id);
                    let _ = write!(self.out, "{}:{}", v.name, v.ty);
                }
                let _ = write!(self.out, ") : {} {} -> ", l.ret, l.ev);
                self.nested(&l.body, depth);
            }
            MakeClosure { code, captured, ev } => {
                let _ = write!(self.out, "closure{ev}(code{}", code.0);
                if !captured.is_empty() {
                    self.out.push_str("; ");
                    self.atoms(captured, ", ");
                }
                self.out.push(')');
            }
            App { callee, args } => {
                self.atom(callee);
                self.out.push(' ');
                self.atoms(args, " ");
            }
            DirectCall { code, callee, args } => {
                let _ = write!(self.out, "call code{}[", code.0);
                self.atom(callee);
                self.out.push_str("] ");
                self.atoms(args, " ");
            }
            Binary { op, lhs, rhs } => {
                self.atom(lhs);
                let _ = write!(self.out, " {} ", op.symbol());
                self.atom(rhs);
            }
            Prim { op, args } => {
                self.out.push_str(op.name());
                self.out.push(' ');
                self.atoms(args, " ");
            }
            MakeRef { init, .. } => {
                self.out.push_str("ref ");
                self.atom(init);
            }
            Deref(a) => {
                self.out.push('!');
                self.atom(a);
            }
            Assign { target, value } => {
                self.atom(target);
                self.out.push_str(" := ");
                self.atom(value);
            }
            MakeVec { len, init, .. } => {
                self.out.push_str("vector ");
                self.atoms(&[*len, *init], " ");
            }
            VecGet { vec, index } => {
                self.atom(vec);
                self.out.push_str(".[");
                self.atom(index);
                self.out.push(']');
            }
            VecSet { vec, index, value } => {
                self.atom(vec);
                self.out.push_str(".[");
                self.atom(index);
                self.out.push_str("] <- ");
                self.atom(value);
            }
            Tuple { items, .. } => {
                self.out.push('(');
                self.atoms(items, ", ");
                self.out.push(')');
            }
            Proj { tuple, index } => {
                let _ = write!(self.out, "#{index} ");
                self.atom(tuple);
            }
            Ctor { ctor, args, .. } => {
                self.out.push_str(ctor);
                if !args.is_empty() {
                    self.out.push_str(" (");
                    self.atoms(args, ", ");
                    self.out.push(')');
                }
            }
            Ascribe { atom, ev, target, kind } => {
                let _ = write!(self.out, "{ev}");
                self.atom(atom);
                if *kind == AscKind::Source {
                    let _ = write!(self.out, "::{target}");
                }
            }
            DynAscribe { atom, source } => {
                self.out.push_str("ascribe(");
                self.atom(atom);
                self.out.push_str(", ");
                match source {
                    EvSource::Dom(i, f) => {
                        let _ = write!(self.out, "dom({i}, ");
                        self.atom(f);
                        self.out.push(')');
                    }
                    EvSource::Cod => self.out.push_str("cod(self)"),
                    EvSource::Content(k, s) | EvSource::Store(k, s) => {
                        match k {
                            ContentKind::Ref => self.out.push_str("ref-content("),
                            ContentKind::Vec => self.out.push_str("vec-elem("),
                            ContentKind::TupleProj(i) => {
                                let _ = write!(self.out, "tuple-proj({i}, ");
                            }
                        }
                        self.atom(s);
                        self.out.push(')');
                    }
                }
                self.out.push(')');
            }
            CheckGerm { atom, kind } => {
                let _ = write!(self.out, "{} ", check_name(kind));
                self.atom(atom);
            }
            If { cond, then_block, else_block } => {
                self.out.push_str("if ");
                self.atom(cond);
                self.out.push_str(" then ");
                self.nested(then_block, depth);
                self.out.push_str(" else ");
                self.nested(else_block, depth);
            }
            Loop { var, lo, hi, body } => {
                let _ = write!(self.out, "loop {} = ", self.p.var(var.id).name);
                self.atom(lo);
                self.out.push_str(" to ");
                self.atom(hi);
                self.out.push_str(" do ");
                self.nested(body, depth);
            }
            Match { scrutinee, arms, .. } => {
                self.out.push_str("match ");
                self.atom(scrutinee);
                self.out.push_str(" with");
                for arm in arms {
                    self.out.push('\n');
                    self.indent(depth + 1);
                    let _ = write!(self.out, "| {}", arm.ctor);
                    if !arm.binders.is_empty() {
                        let bs: Vec<String> = arm
                            .binders
                            .iter()
                            .map(|b| b.map_or("_".to_string(), |v| self.p.var(v.id).name.to_string()))
                            .collect();
                        let _ = write!(self.out, " ({})", bs.join(", "));
                    }
                    self.out.push_str(" -> ");
                    self.nested(&arm.body, depth + 1);
                }
            }
        }
    }
}

impl fmt::Display for CoreProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pr = Printer { p: self, out: String::new() };
        for code in &self.codes {
            let _ = write!(pr.out, "code{}", code.id.0);
            if code.direct {
                pr.out.push_str(" direct");
            }
            pr.out.push_str(" (");
            for (i, x) in code.params.iter().enumerate() {
                if i > 0 {
                    pr.out.push_str(", ");
                }
                let v = self.var(x.id);
                let _ = write!(pr.out, "{}:{}", v.name, v.ty);
            }
            let _ = write!(pr.out, ") : {}", code.ret);
            if !code.captured.is_empty() {
                let names: Vec<&str> = code.captured.iter().map(|c| &*self.var(*c).name).collect();
                let _ = write!(pr.out, " [env: {}]", names.join(", "));
            }
            if let Some(r) = code.rec_var {
                let _ = write!(pr.out, " [self: {}]", self.var(r).name);
            }
            pr.out.push_str(" =\n");
            pr.block(&code.body, 1);
            pr.out.push_str("\n\n");
        }
        if !self.codes.is_empty() {
            pr.out.push_str("main =\n");
            pr.block(&self.main, 1);
        } else {
            pr.block(&self.main, 0);
        }
        f.write_str(&pr.out)
    }
}
