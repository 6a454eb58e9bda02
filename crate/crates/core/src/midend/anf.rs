use std::collections::HashMap;

use super::core::*;
use crate::checker::{EKind, ElabExpr, ElabProgram};
use crate::evidence::{trans, Evidence};
use crate::surface::{BinOp, Ident};
use crate::types::Type;

/// Converts an alpha-renamed program into A-normal form.
///
/// Ascriptions on literals disappear (a literal's evidence is its type) and
/// ascriptions on lambdas become the closure's initial evidence. `&&` and
/// `||` become conditionals so they keep short-circuiting.
pub fn to_anf(p: &ElabProgram) -> CoreProgram {
    let mut cx = Anf {
        prog: CoreProgram {
            variants: p.variants.clone(),
            vars: Vec::new(),
            codes: Vec::new(),
            main: Block::default(),
            main_frame: 0,
            fully_static: true,
        },
        names: HashMap::new(),
    };
    let main = cx.block(&p.main);
    cx.prog.main = main;
    let static_fields = p.variants.variants().iter().all(|v| v.ctors.iter().all(|c| c.fields.iter().all(Type::is_static)));
    cx.prog.fully_static = static_fields && cx.prog.vars.iter().all(|v| v.ty.is_static());
    cx.prog
}

/// The lambda under a chain of ascriptions, with the chain's evidence
/// composed. `None` if there is no lambda or the evidence does not compose.
fn ascribed_lambda(e: &ElabExpr) -> Option<(&ElabExpr, Evidence)> {
    match &e.kind {
        EKind::Lambda { .. } => Some((e, Evidence::new(e.ty.clone()))),
        EKind::Ascribe { expr, ev, .. } if matches!(expr.kind, EKind::Lambda { .. }) => Some((expr, ev.clone())),
        EKind::Ascribe { expr, ev, .. } => {
            let (lam, inner) = ascribed_lambda(expr)?;
            Some((lam, trans(&inner, ev)?))
        }
        _ => None,
    }
}

fn innermost_lambda(e: &ElabExpr) -> &ElabExpr {
    match &e.kind {
        EKind::Ascribe { expr, .. } => innermost_lambda(expr),
        _ => e,
    }
}

struct Anf {
    prog: CoreProgram,
    names: HashMap<Ident, VarId>,
}

impl Anf {
    fn binder(&mut self, name: &Ident, ty: &Type) -> Var {
        let id = VarId(self.prog.vars.len() as u32);
        self.prog.vars.push(VarInfo { name: name.clone(), ty: ty.clone() });
        self.names.insert(name.clone(), id);
        Var::new(id)
    }

    fn block(&mut self, e: &ElabExpr) -> Block {
        let mut stmts = Vec::new();
        let ret = self.atom(e, &mut stmts);
        Block { stmts, ret: Some(ret) }
    }

    fn atom(&mut self, e: &ElabExpr, out: &mut Vec<Stmt>) -> Atom {
        match self.comp(e, out) {
            Comp::Atom(a) => a,
            comp => {
                let var = self.prog.fresh("t", e.ty.clone());
                out.push(Stmt { var, comp, span: e.span, rec: false });
                Atom::Var(var)
            }
        }
    }

    fn atoms(&mut self, es: &[ElabExpr], out: &mut Vec<Stmt>) -> Vec<Atom> {
        es.iter().map(|e| self.atom(e, out)).collect()
    }

    fn lambda(&mut self, e: &ElabExpr, ev: Evidence) -> Comp {
        let EKind::Lambda { params, ret, body } = &e.kind else { unreachable!("lambda expected") };
        let params = params.iter().map(|(x, t)| self.binder(x, t)).collect();
        let body = self.block(body);
        Comp::Lambda(Box::new(LambdaDef { params, ret: ret.clone(), ev, body }))
    }

    /// Re-applies the ascriptions of `e` on top of `base`, the lowered lambda
    /// at the bottom of the chain.
    fn ascribe_chain(&mut self, e: &ElabExpr, base: Atom, out: &mut Vec<Stmt>) -> Comp {
        let EKind::Ascribe { expr, ev, kind } = &e.kind else { return Comp::Atom(base) };
        let atom = match self.ascribe_chain(expr, base, out) {
            Comp::Atom(a) => a,
            comp => {
                let var = self.prog.fresh("t", expr.ty.clone());
                out.push(Stmt { var, comp, span: expr.span, rec: false });
                Atom::Var(var)
            }
        };
        Comp::Ascribe { atom, ev: ev.clone(), target: e.ty.clone(), kind: *kind }
    }

    fn short_circuit(&mut self, op: BinOp, lhs: &ElabExpr, rhs: &ElabExpr, out: &mut Vec<Stmt>) -> Comp {
        let cond = self.atom(lhs, out);
        let rest = self.block(rhs);
        let constant = Block { stmts: vec![], ret: Some(Atom::Bool(op == BinOp::Or)) };
        if op == BinOp::And {
            Comp::If { cond, then_block: rest, else_block: constant }
        } else {
            Comp::If { cond, then_block: constant, else_block: rest }
        }
    }

    fn comp(&mut self, e: &ElabExpr, out: &mut Vec<Stmt>) -> Comp {
        use EKind::*;
        match &e.kind {
            Var(x) => Comp::Atom(Atom::Var(super::core::Var::new(self.names[x]))),
            Int(n) => Comp::Atom(Atom::Int(*n)),
            Float(x) => Comp::Atom(Atom::Float(*x)),
            Bool(b) => Comp::Atom(Atom::Bool(*b)),
            Unit => Comp::Atom(Atom::Unit),
            Lambda { .. } => self.lambda(e, Evidence::new(e.ty.clone())),
            Ascribe { expr, ev, kind } => {
                if expr.is_literal() {
                    return self.comp(expr, out);
                }
                if let Some((lam, ev)) = ascribed_lambda(e) {
                    return self.lambda(lam, ev);
                }
                let atom = self.atom(expr, out);
                Comp::Ascribe { atom, ev: ev.clone(), target: e.ty.clone(), kind: *kind }
            }
            App { callee, args } => {
                let callee = self.atom(callee, out);
                let args = self.atoms(args, out);
                Comp::App { callee, args }
            }
            Binary { op: op @ (BinOp::And | BinOp::Or), lhs, rhs } => self.short_circuit(*op, lhs, rhs, out),
            Binary { op, lhs, rhs } => {
                let lhs = self.atom(lhs, out);
                let rhs = self.atom(rhs, out);
                Comp::Binary { op: *op, lhs, rhs }
            }
            Prim { op, args } => Comp::Prim { op: *op, args: self.atoms(args, out) },
            If { cond, then_branch, else_branch } => {
                let cond = self.atom(cond, out);
                Comp::If { cond, then_block: self.block(then_branch), else_block: self.block(else_branch) }
            }
            Loop { var, lo, hi, body } => {
                let lo = self.atom(lo, out);
                let hi = self.atom(hi, out);
                let var = self.binder(var, &Type::Int);
                Comp::Loop { var, lo, hi, body: self.block(body) }
            }
            Let { name, ty, bound, body } => {
                let comp = self.comp(bound, out);
                let var = self.binder(name, ty);
                out.push(Stmt { var, comp, span: bound.span, rec: false });
                self.comp(body, out)
            }
            LetRec { name, ty, bound, body } => {
                if let Some((lam, ev)) = ascribed_lambda(bound) {
                    let var = self.binder(name, ty);
                    let comp = self.lambda(lam, ev);
                    out.push(Stmt { var, comp, span: bound.span, rec: true });
                } else {
                    // The ascriptions do not compose, so binding blames before
                    // the closure can be called: bind the bare lambda, then
                    // ascribe it into a second variable.
                    let lam = innermost_lambda(bound);
                    let var = self.binder(name, &lam.ty);
                    let comp = self.lambda(lam, Evidence::new(lam.ty.clone()));
                    out.push(Stmt { var, comp, span: bound.span, rec: true });
                    let comp = self.ascribe_chain(bound, Atom::Var(var), out);
                    let outer = self.binder(name, ty);
                    out.push(Stmt { var: outer, comp, span: bound.span, rec: false });
                }
                self.comp(body, out)
            }
            MakeRef(x) => Comp::MakeRef { init: self.atom(x, out), ty: e.ty.clone() },
            Deref(x) => Comp::Deref(self.atom(x, out)),
            Assign { target, value } => {
                let target = self.atom(target, out);
                let value = self.atom(value, out);
                Comp::Assign { target, value }
            }
            MakeVec { len, init } => {
                let len = self.atom(len, out);
                let init = self.atom(init, out);
                Comp::MakeVec { len, init, ty: e.ty.clone() }
            }
            VecGet { vec, index } => {
                let vec = self.atom(vec, out);
                let index = self.atom(index, out);
                Comp::VecGet { vec, index }
            }
            VecSet { vec, index, value } => {
                let vec = self.atom(vec, out);
                let index = self.atom(index, out);
                let value = self.atom(value, out);
                Comp::VecSet { vec, index, value }
            }
            Tuple(items) => Comp::Tuple { items: self.atoms(items, out), ty: e.ty.clone() },
            Proj { tuple, index } => Comp::Proj { tuple: self.atom(tuple, out), index: *index },
            Ctor { variant, ctor, tag, args } => {
                let args = self.atoms(args, out);
                Comp::Ctor { variant: variant.clone(), ctor: ctor.clone(), tag: *tag, args }
            }
            Match { scrutinee, variant, arms } => {
                let scrutinee = self.atom(scrutinee, out);
                let arms = arms
                    .iter()
                    .map(|arm| {
                        let binders = arm
                            .binders
                            .iter()
                            .map(|(b, t)| b.as_ref().map(|x| self.binder(x, t)))
                            .collect();
                        CArm { ctor: arm.ctor.clone(), tag: arm.tag, binders, body: self.block(&arm.body) }
                    })
                    .collect();
                Comp::Match { scrutinee, variant: variant.clone(), arms }
            }
            Seq(a, b) => {
                let _ = self.atom(a, out);
                self.comp(b, out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{elaborate_static, simplify_ascriptions, TypingMode};
    use crate::midend::alpha_rename;
    use crate::surface::parse_source;

    fn anf(src: &str) -> CoreProgram {
        let p = elaborate_static(&parse_source(src).unwrap(), TypingMode::Gradual).unwrap();
        to_anf(&alpha_rename(simplify_ascriptions(p, false)))
    }

    #[test]
    fn nested_application_is_let_bound() {
        let p = anf("let g = fun (x:int) -> x in let f = fun (x:int) -> x in f (g 1)");
        let text = p.to_string();
        let g_call = text.find("= g_0 1").expect(&text);
        let f_call = text.find("= f_0 t").expect(&text);
        assert!(g_call < f_call, "{text}");
    }

    #[test]
    fn operands_are_atoms() {
        let p = anf("let a = 1 in let b = 2 in (a + b) * (b + a)");
        let mut binaries = 0;
        p.main.visit(&mut |c| {
            if let Comp::Binary { .. } = c {
                binaries += 1;
            }
        });
        assert_eq!(binaries, 3);
        assert_eq!(p.main.stmts.len(), 5);
    }

    #[test]
    fn conditional_operand_is_hoisted() {
        let p = anf("1 + (if true then 2 else 3)");
        assert!(matches!(p.main.stmts[0].comp, Comp::If { .. }));
        assert!(matches!(p.main.stmts[1].comp, Comp::Binary { .. }));
    }

    #[test]
    fn literal_and_lambda_ascriptions_fold_away() {
        let p = anf("(fun (x:?) -> x) :: int -> int");
        let Comp::Lambda(l) = &p.main.stmts[0].comp else { panic!("{p}") };
        assert_eq!(l.ev.ty().to_string(), "int->int");
    }

    #[test]
    fn static_flag_tracks_binder_types() {
        assert!(anf("let x : int = 1 in x + 1").fully_static);
        assert!(!anf("let x : ? = 1 in x").fully_static);
    }
}
