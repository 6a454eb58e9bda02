use std::collections::HashSet;

use super::elab::*;
use super::{TypeError, TypingMode};
use crate::evidence::{initial_evidence, Evidence};
use crate::span::Span;
use crate::surface::{Expr, ExprKind, Ident, Program};
use crate::types::{germ_of, head_admits, meet, ElimKind, Type, VariantEnv};

/// Typechecks `p` and inserts an ascription at every use of consistency.
pub fn elaborate_static(p: &Program, mode: TypingMode) -> Result<ElabProgram, TypeError> {
    let erased;
    let p = if mode == TypingMode::Dynamic {
        let mut q = p.clone();
        q.make_fully_dynamic();
        erased = q;
        &erased
    } else {
        p
    };
    let variants = declare_variants(p)?;
    let mut cx = Checker { variants: &variants, env: Vec::new() };
    let main = cx.expr(&p.main)?;
    if mode == TypingMode::Static {
        reject_imprecise(&variants, &main)?;
    }
    Ok(ElabProgram { variants, main })
}

fn declare_variants(p: &Program) -> Result<VariantEnv, TypeError> {
    let mut env = VariantEnv::default();
    let names: HashSet<&str> = p.variants.iter().map(|d| &*d.name).collect();
    for d in &p.variants {
        for (_, fields) in &d.ctors {
            for t in fields {
                check_names(t, d.span, &|n| names.contains(n))?;
            }
        }
        if !env.declare(d.name.clone(), d.ctors.clone()) {
            return Err(TypeError::Duplicate { span: d.span, name: d.name.to_string() });
        }
    }
    Ok(env)
}

fn check_names(t: &Type, span: Span, known: &dyn Fn(&str) -> bool) -> Result<(), TypeError> {
    let mut bad = None;
    t.for_each_name(&mut |n| {
        if bad.is_none() && !known(n) {
            bad = Some(n.to_string());
        }
    });
    match bad {
        Some(name) => Err(TypeError::UnknownType { span, name }),
        None => Ok(()),
    }
}

fn reject_imprecise(variants: &VariantEnv, main: &ElabExpr) -> Result<(), TypeError> {
    for v in variants.variants() {
        for c in &v.ctors {
            if let Some(t) = c.fields.iter().find(|t| !t.is_static()) {
                return Err(TypeError::Imprecise { span: Span::default(), ty: t.clone() });
            }
        }
    }
    let mut found = None;
    main.walk(&mut |e| {
        if found.is_some() {
            return;
        }
        let bad = match &e.kind {
            EKind::Lambda { params, .. } => params.iter().map(|(_, t)| t).find(|t| !t.is_static()),
            EKind::Let { ty, .. } | EKind::LetRec { ty, .. } => Some(ty).filter(|t| !t.is_static()),
            _ => None,
        };
        let bad = bad.or(Some(&e.ty).filter(|t| !t.is_static()));
        if let Some(t) = bad {
            found = Some(TypeError::Imprecise { span: e.span, ty: t.clone() });
        }
    });
    found.map_or(Ok(()), Err)
}

struct Checker<'a> {
    variants: &'a VariantEnv,
    env: Vec<(Ident, Type)>,
}

fn boxed(e: ElabExpr) -> Box<ElabExpr> {
    Box::new(e)
}

fn ascribe(e: ElabExpr, ev: Evidence, target: Type, kind: AscKind) -> ElabExpr {
    let span = e.span;
    ElabExpr::new(EKind::Ascribe { expr: boxed(e), ev, kind }, target, span)
}

impl Checker<'_> {
    fn lookup(&self, x: &str, span: Span) -> Result<Type, TypeError> {
        self.env
            .iter()
            .rev()
            .find(|(y, _)| &**y == x)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| TypeError::Unbound { span, name: x.to_string() })
    }

    fn with_binding<T>(&mut self, x: &Ident, t: Type, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((x.clone(), t));
        let r = f(self);
        self.env.pop();
        r
    }

    fn annotation(&self, t: &Option<Type>, span: Span) -> Result<Type, TypeError> {
        match t {
            None => Ok(Type::Dyn),
            Some(t) => {
                check_names(t, span, &|n| self.variants.contains(n))?;
                Ok(t.clone())
            }
        }
    }

    /// Ascribes `e` to `expected`, the one place typing relies on consistency.
    fn coerce(&self, e: ElabExpr, expected: &Type, context: &'static str) -> Result<ElabExpr, TypeError> {
        match initial_evidence(&e.ty, expected) {
            Some(ev) => Ok(ascribe(e, ev, expected.clone(), AscKind::Implicit)),
            None => Err(TypeError::Inconsistent {
                span: e.span,
                context,
                expected: expected.clone(),
                found: e.ty.clone(),
            }),
        }
    }

    /// Prepares the subject of an elimination form: `?` goes to the germ,
    /// anything else must already have the right head constructor.
    fn eliminate(&self, e: ElabExpr, kind: ElimKind, action: &str) -> Result<ElabExpr, TypeError> {
        if e.ty.is_dyn() {
            let germ = germ_of(&kind);
            return Ok(ascribe(e, Evidence::new(germ.clone()), germ, AscKind::Germ));
        }
        if head_admits(&e.ty, &kind) {
            let ty = e.ty.clone();
            return Ok(ascribe(e, Evidence::new(ty.clone()), ty, AscKind::Implicit));
        }
        Err(TypeError::BadElimination { span: e.span, action: action.to_string(), found: e.ty })
    }

    fn value(kind: EKind, ty: Type, span: Span) -> ElabExpr {
        let e = ElabExpr::new(kind, ty.clone(), span);
        ascribe(e, Evidence::new(ty.clone()), ty, AscKind::Value)
    }

    fn expr(&mut self, e: &Expr) -> Result<ElabExpr, TypeError> {
        let span = e.span;
        Ok(match &e.kind {
            ExprKind::Int(n) => Self::value(EKind::Int(*n), Type::Int, span),
            ExprKind::Float(x) => Self::value(EKind::Float(*x), Type::Float, span),
            ExprKind::Bool(b) => Self::value(EKind::Bool(*b), Type::Bool, span),
            ExprKind::Unit => Self::value(EKind::Unit, Type::Unit, span),
            ExprKind::Var(x) => ElabExpr::new(EKind::Var(x.clone()), self.lookup(x, span)?, span),
            ExprKind::Lambda { params, ret, body } => {
                let mut typed = Vec::with_capacity(params.len());
                for p in params {
                    typed.push((p.name.clone(), self.annotation(&p.ann, p.span)?));
                }
                let mark = self.env.len();
                self.env.extend(typed.iter().cloned());
                let body = self.expr(body);
                self.env.truncate(mark);
                let mut body = body?;
                let ret_ty = match ret {
                    Some(_) => {
                        let r = self.annotation(ret, span)?;
                        body = self.coerce(body, &r, "function result")?;
                        r
                    }
                    None => body.ty.clone(),
                };
                let ty = Type::fun(typed.iter().map(|(_, t)| t.clone()).collect(), ret_ty.clone());
                let lam = EKind::Lambda { params: typed, ret: ret_ty, body: boxed(body) };
                Self::value(lam, ty, span)
            }
            ExprKind::App { callee, args } => {
                let callee = self.expr(callee)?;
                let callee = self.eliminate(callee, ElimKind::Apply(args.len()), "apply")
                    .map_err(|err| match err {
                        TypeError::BadElimination { found: Type::Fun(ps, _), span, .. } => {
                            TypeError::Arity { span, expected: ps.len(), found: args.len() }
                        }
                        other => other,
                    })?;
                let (params, ret) = match &callee.ty {
                    Type::Fun(ps, r) => (ps.clone(), (**r).clone()),
                    _ => unreachable!("eliminate guarantees a function type"),
                };
                let mut out = Vec::with_capacity(args.len());
                for (a, p) in args.iter().zip(params.iter()) {
                    let a = self.expr(a)?;
                    out.push(self.coerce(a, p, "argument")?);
                }
                ElabExpr::new(EKind::App { callee: boxed(callee), args: out }, ret, span)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let (operand, result) = op.signature();
                let l = self.expr(lhs)?;
                let l = self.coerce(l, &operand, "operand")?;
                let r = self.expr(rhs)?;
                let r = self.coerce(r, &operand, "operand")?;
                ElabExpr::new(EKind::Binary { op: *op, lhs: boxed(l), rhs: boxed(r) }, result, span)
            }
            ExprKind::Prim { op, args } => {
                let (params, result) = op.signature();
                let mut out = Vec::with_capacity(args.len());
                for (a, p) in args.iter().zip(params.iter()) {
                    let a = self.expr(a)?;
                    out.push(self.coerce(a, p, "primitive argument")?);
                }
                ElabExpr::new(EKind::Prim { op: *op, args: out }, result, span)
            }
            ExprKind::If { cond, then_branch, else_branch } => {
                let c = self.expr(cond)?;
                let c = self.coerce(c, &Type::Bool, "condition")?;
                let t = self.expr(then_branch)?;
                let f = self.expr(else_branch)?;
                let ty = meet(&t.ty, &f.ty).ok_or_else(|| TypeError::Inconsistent {
                    span: f.span,
                    context: "conditional branches",
                    expected: t.ty.clone(),
                    found: f.ty.clone(),
                })?;
                let t = self.coerce(t, &ty, "conditional branch")?;
                let f = self.coerce(f, &ty, "conditional branch")?;
                ElabExpr::new(
                    EKind::If { cond: boxed(c), then_branch: boxed(t), else_branch: boxed(f) },
                    ty,
                    span,
                )
            }
            ExprKind::Loop { var, lo, hi, body } => {
                let l = self.expr(lo)?;
                let l = self.coerce(l, &Type::Int, "loop bound")?;
                let h = self.expr(hi)?;
                let h = self.coerce(h, &Type::Int, "loop bound")?;
                let b = self.with_binding(var, Type::Int, |cx| cx.expr(body))?;
                let kind = EKind::Loop { var: var.clone(), lo: boxed(l), hi: boxed(h), body: boxed(b) };
                ElabExpr::new(kind, Type::Unit, span)
            }
            ExprKind::Let { name, ann, bound, body } => {
                let b = self.expr(bound)?;
                let (b, ty) = match ann {
                    Some(_) => {
                        let t = self.annotation(ann, span)?;
                        (self.coerce(b, &t, "let binding")?, t)
                    }
                    None => {
                        let t = b.ty.clone();
                        (b, t)
                    }
                };
                let body = self.with_binding(name, ty.clone(), |cx| cx.expr(body))?;
                let result = body.ty.clone();
                let kind = EKind::Let { name: name.clone(), ty, bound: boxed(b), body: boxed(body) };
                ElabExpr::new(kind, result, span)
            }
            ExprKind::LetRec { name, ann, bound, body } => {
                let ExprKind::Lambda { params, ret, .. } = &bound.kind else {
                    return Err(TypeError::LetRecNotLambda { span });
                };
                let ty = match ann {
                    Some(_) => self.annotation(ann, span)?,
                    None if ret.is_none() && params.iter().all(|p| p.ann.is_none()) => Type::Dyn,
                    None => {
                        let mut ps = Vec::with_capacity(params.len());
                        for p in params {
                            ps.push(self.annotation(&p.ann, p.span)?);
                        }
                        Type::fun(ps, self.annotation(ret, span)?)
                    }
                };
                let b = self.with_binding(name, ty.clone(), |cx| cx.expr(bound))?;
                let b = self.coerce(b, &ty, "recursive binding")?;
                let body = self.with_binding(name, ty.clone(), |cx| cx.expr(body))?;
                let result = body.ty.clone();
                let kind = EKind::LetRec { name: name.clone(), ty, bound: boxed(b), body: boxed(body) };
                ElabExpr::new(kind, result, span)
            }
            ExprKind::MakeRef(x) => {
                let x = self.expr(x)?;
                let ty = Type::reference(x.ty.clone());
                ElabExpr::new(EKind::MakeRef(boxed(x)), ty, span)
            }
            ExprKind::Deref(x) => {
                let x = self.expr(x)?;
                let x = self.eliminate(x, ElimKind::Deref, "dereference")?;
                let Type::Ref(t) = &x.ty else { unreachable!() };
                let ty = (**t).clone();
                ElabExpr::new(EKind::Deref(boxed(x)), ty, span)
            }
            ExprKind::Assign { target, value } => {
                let r = self.expr(target)?;
                let r = self.eliminate(r, ElimKind::Deref, "assign to")?;
                let Type::Ref(t) = &r.ty else { unreachable!() };
                let t = (**t).clone();
                let v = self.expr(value)?;
                let v = self.coerce(v, &t, "assigned value")?;
                ElabExpr::new(EKind::Assign { target: boxed(r), value: boxed(v) }, Type::Unit, span)
            }
            ExprKind::MakeVec { len, init } => {
                let n = self.expr(len)?;
                let n = self.coerce(n, &Type::Int, "vector length")?;
                let i = self.expr(init)?;
                let ty = Type::vector(i.ty.clone());
                ElabExpr::new(EKind::MakeVec { len: boxed(n), init: boxed(i) }, ty, span)
            }
            ExprKind::VecGet { vec, index } => {
                let v = self.expr(vec)?;
                let v = self.eliminate(v, ElimKind::VecAccess, "index")?;
                let Type::Vec(t) = &v.ty else { unreachable!() };
                let ty = (**t).clone();
                let i = self.expr(index)?;
                let i = self.coerce(i, &Type::Int, "vector index")?;
                ElabExpr::new(EKind::VecGet { vec: boxed(v), index: boxed(i) }, ty, span)
            }
            ExprKind::VecSet { vec, index, value } => {
                let v = self.expr(vec)?;
                let v = self.eliminate(v, ElimKind::VecAccess, "index")?;
                let Type::Vec(t) = &v.ty else { unreachable!() };
                let t = (**t).clone();
                let i = self.expr(index)?;
                let i = self.coerce(i, &Type::Int, "vector index")?;
                let x = self.expr(value)?;
                let x = self.coerce(x, &t, "stored element")?;
                let kind = EKind::VecSet { vec: boxed(v), index: boxed(i), value: boxed(x) };
                ElabExpr::new(kind, Type::Unit, span)
            }
            ExprKind::Tuple(items) => {
                let items = items.iter().map(|i| self.expr(i)).collect::<Result<Vec<_>, _>>()?;
                let ty = Type::tuple(items.iter().map(|i| i.ty.clone()).collect());
                ElabExpr::new(EKind::Tuple(items), ty, span)
            }
            ExprKind::Proj { tuple, index } => {
                let t = self.expr(tuple)?;
                let t = self.eliminate(t, ElimKind::TupleProj(*index), &format!("project #{index} from"))?;
                let Type::Tuple(ts) = &t.ty else { unreachable!() };
                let ty = ts[*index].clone();
                ElabExpr::new(EKind::Proj { tuple: boxed(t), index: *index }, ty, span)
            }
            ExprKind::Ctor { name, args } => {
                let (def, c) = self
                    .variants
                    .ctor(name)
                    .ok_or_else(|| TypeError::UnknownCtor { span, name: name.to_string() })?;
                if c.fields.len() != args.len() {
                    return Err(TypeError::Arity { span, expected: c.fields.len(), found: args.len() });
                }
                let (variant, tag, fields) = (def.name.clone(), c.id, c.fields.clone());
                let mut out = Vec::with_capacity(args.len());
                for (a, t) in args.iter().zip(fields.iter()) {
                    let a = self.expr(a)?;
                    out.push(self.coerce(a, t, "constructor field")?);
                }
                let ty = Type::Named(variant.clone());
                ElabExpr::new(EKind::Ctor { variant, ctor: name.clone(), tag, args: out }, ty, span)
            }
            ExprKind::Match { scrutinee, arms } => self.match_expr(scrutinee, arms, span)?,
            ExprKind::Ascribe { expr, ty } => {
                let t = self.annotation(&Some(ty.clone()), span)?;
                let x = self.expr(expr)?;
                let ev = initial_evidence(&x.ty, &t).ok_or_else(|| TypeError::Inconsistent {
                    span,
                    context: "ascription",
                    expected: t.clone(),
                    found: x.ty.clone(),
                })?;
                ascribe(x, ev, t, AscKind::Source)
            }
            ExprKind::Seq(a, b) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                let ty = b.ty.clone();
                ElabExpr::new(EKind::Seq(boxed(a), boxed(b)), ty, span)
            }
        })
    }

    fn match_expr(
        &mut self,
        scrutinee: &Expr,
        arms: &[crate::surface::Arm],
        span: Span,
    ) -> Result<ElabExpr, TypeError> {
        let first = &arms[0];
        let (def, _) = self
            .variants
            .ctor(&first.ctor)
            .ok_or_else(|| TypeError::UnknownCtor { span: first.span, name: first.ctor.to_string() })?;
        let def = def.clone();
        let s = self.expr(scrutinee)?;
        let s = self.eliminate(s, ElimKind::Match(def.name.clone()), &format!("match {} on", def.name))?;
        let mut seen = vec![false; def.ctors.len()];
        let mut out = Vec::with_capacity(arms.len());
        for arm in arms {
            let Some(c) = def.ctors.iter().find(|c| c.name == arm.ctor) else {
                return Err(TypeError::BadMatch {
                    span: arm.span,
                    message: format!("constructor {} does not belong to {}", arm.ctor, def.name),
                });
            };
            if std::mem::replace(&mut seen[c.id as usize], true) {
                return Err(TypeError::BadMatch { span: arm.span, message: format!("duplicate arm {}", arm.ctor) });
            }
            if c.fields.len() != arm.binders.len() {
                return Err(TypeError::Arity { span: arm.span, expected: c.fields.len(), found: arm.binders.len() });
            }
            let binders: Vec<(Option<Ident>, Type)> =
                arm.binders.iter().cloned().zip(c.fields.iter().cloned()).collect();
            let mark = self.env.len();
            for (b, t) in &binders {
                if let Some(b) = b {
                    self.env.push((b.clone(), t.clone()));
                }
            }
            let body = self.expr(&arm.body);
            self.env.truncate(mark);
            out.push(EArm { ctor: arm.ctor.clone(), tag: c.id, binders, body: body?, span: arm.span });
        }
        if let Some(missing) = def.ctors.iter().find(|c| !seen[c.id as usize]) {
            return Err(TypeError::BadMatch { span, message: format!("missing arm for {}", missing.name) });
        }
        let mut ty = Type::Dyn;
        for arm in &out {
            ty = meet(&ty, &arm.body.ty).ok_or_else(|| TypeError::Inconsistent {
                span: arm.span,
                context: "match arms",
                expected: ty.clone(),
                found: arm.body.ty.clone(),
            })?;
        }
        for arm in &mut out {
            let body = std::mem::replace(&mut arm.body, ElabExpr::new(EKind::Unit, Type::Unit, span));
            arm.body = self.coerce(body, &ty, "match arm")?;
        }
        let kind = EKind::Match { scrutinee: boxed(s), variant: def.name.clone(), arms: out };
        Ok(ElabExpr::new(kind, ty, span))
    }
}
