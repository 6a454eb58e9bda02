use super::elab::*;
use crate::surface::Ident;
use crate::types::{consistent, precision_le, Type};

/// Re-checks an elaborated program. Every sub-expression must fit the slot it
/// sits in: its type is at least as precise as the slot's type, and every
/// ascription's evidence refines both its subject's type and its target.
/// Returns the type of the main expression.
pub fn verify_elaborated(p: &ElabProgram) -> Result<Type, String> {
    let mut env = Vec::new();
    check(&p.main, &mut env)?;
    Ok(p.main.ty.clone())
}

fn fits(e: &ElabExpr, slot: &Type, what: &str) -> Result<(), String> {
    if precision_le(&e.ty, slot) {
        Ok(())
    } else {
        Err(format!("{}: {what} of type {} does not fit {slot}", e.span, e.ty))
    }
}

fn same(e: &ElabExpr, t: &Type) -> Result<(), String> {
    if e.ty == *t {
        Ok(())
    } else {
        Err(format!("{}: node typed {} but rule gives {t}", e.span, e.ty))
    }
}

fn check(e: &ElabExpr, env: &mut Vec<(Ident, Type)>) -> Result<(), String> {
    use EKind::*;
    match &e.kind {
        Int(_) => same(e, &Type::Int)?,
        Float(_) => same(e, &Type::Float)?,
        Bool(_) => same(e, &Type::Bool)?,
        Unit => same(e, &Type::Unit)?,
        Var(x) => {
            let t = env.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.clone());
            let t = t.ok_or_else(|| format!("{}: unbound {x}", e.span))?;
            same(e, &t)?;
        }
        Lambda { params, ret, body } => {
            let mark = env.len();
            env.extend(params.iter().cloned());
            check(body, env)?;
            env.truncate(mark);
            fits(body, ret, "function body")?;
            same(e, &Type::fun(params.iter().map(|(_, t)| t.clone()).collect(), ret.clone()))?;
        }
        App { callee, args } => {
            check(callee, env)?;
            let Some((ps, r)) = callee.ty.fun_parts() else {
                return Err(format!("{}: callee of type {}", e.span, callee.ty));
            };
            if ps.len() != args.len() {
                return Err(format!("{}: arity mismatch", e.span));
            }
            for (a, p) in args.iter().zip(ps) {
                check(a, env)?;
                if !consistent(&a.ty, p) {
                    return Err(format!("{}: argument {} vs {p}", a.span, a.ty));
                }
            }
            if !precision_le(r, &e.ty) {
                return Err(format!("{}: result {r} vs {}", e.span, e.ty));
            }
        }
        Binary { op, lhs, rhs } => {
            let (operand, result) = op.signature();
            for x in [lhs, rhs] {
                check(x, env)?;
                fits(x, &operand, "operand")?;
            }
            same(e, &result)?;
        }
        Prim { op, args } => {
            let (ps, result) = op.signature();
            for (a, p) in args.iter().zip(ps) {
                check(a, env)?;
                fits(a, p, "primitive argument")?;
            }
            same(e, &result)?;
        }
        If { cond, then_branch, else_branch } => {
            check(cond, env)?;
            fits(cond, &Type::Bool, "condition")?;
            for b in [then_branch, else_branch] {
                check(b, env)?;
                fits(b, &e.ty, "branch")?;
            }
        }
        Loop { var, lo, hi, body } => {
            for b in [lo, hi] {
                check(b, env)?;
                fits(b, &Type::Int, "loop bound")?;
            }
            env.push((var.clone(), Type::Int));
            check(body, env)?;
            env.pop();
            same(e, &Type::Unit)?;
        }
        Let { name, ty, bound, body } => {
            check(bound, env)?;
            fits(bound, ty, "let binding")?;
            env.push((name.clone(), ty.clone()));
            check(body, env)?;
            env.pop();
            fits(body, &e.ty, "let body")?;
        }
        LetRec { name, ty, bound, body } => {
            env.push((name.clone(), ty.clone()));
            check(bound, env)?;
            fits(bound, ty, "recursive binding")?;
            check(body, env)?;
            env.pop();
            fits(body, &e.ty, "let body")?;
        }
        MakeRef(x) => {
            check(x, env)?;
            let Type::Ref(t) = &e.ty else { return Err(format!("{}: ref typed {}", e.span, e.ty)) };
            fits(x, t, "initial content")?;
        }
        Deref(r) => {
            check(r, env)?;
            let Type::Ref(t) = &r.ty else { return Err(format!("{}: deref of {}", e.span, r.ty)) };
            if !precision_le(t, &e.ty) {
                return Err(format!("{}: deref result", e.span));
            }
        }
        Assign { target, value } => {
            check(target, env)?;
            check(value, env)?;
            let Type::Ref(t) = &target.ty else { return Err(format!("{}: assign to {}", e.span, target.ty)) };
            if !consistent(&value.ty, t) {
                return Err(format!("{}: assigned {} into {t}", e.span, value.ty));
            }
            same(e, &Type::Unit)?;
        }
        MakeVec { len, init } => {
            check(len, env)?;
            fits(len, &Type::Int, "vector length")?;
            check(init, env)?;
            let Type::Vec(t) = &e.ty else { return Err(format!("{}: vector typed {}", e.span, e.ty)) };
            fits(init, t, "initial element")?;
        }
        VecGet { vec, index } => {
            check(vec, env)?;
            check(index, env)?;
            fits(index, &Type::Int, "index")?;
            let Type::Vec(t) = &vec.ty else { return Err(format!("{}: index into {}", e.span, vec.ty)) };
            if !precision_le(t, &e.ty) {
                return Err(format!("{}: element type", e.span));
            }
        }
        VecSet { vec, index, value } => {
            check(vec, env)?;
            check(index, env)?;
            check(value, env)?;
            fits(index, &Type::Int, "index")?;
            let Type::Vec(t) = &vec.ty else { return Err(format!("{}: index into {}", e.span, vec.ty)) };
            if !consistent(&value.ty, t) {
                return Err(format!("{}: stored {} into {t}", e.span, value.ty));
            }
        }
        Tuple(items) => {
            let Type::Tuple(ts) = &e.ty else { return Err(format!("{}: tuple typed {}", e.span, e.ty)) };
            for (it, t) in items.iter().zip(ts.iter()) {
                check(it, env)?;
                fits(it, t, "component")?;
            }
        }
        Proj { tuple, index } => {
            check(tuple, env)?;
            let Type::Tuple(ts) = &tuple.ty else { return Err(format!("{}: project from {}", e.span, tuple.ty)) };
            let t = ts.get(*index).ok_or_else(|| format!("{}: index out of range", e.span))?;
            if !precision_le(t, &e.ty) {
                return Err(format!("{}: component type", e.span));
            }
        }
        Ctor { variant, args, .. } => {
            for a in args {
                check(a, env)?;
            }
            same(e, &Type::Named(variant.clone()))?;
        }
        Match { scrutinee, variant, arms } => {
            check(scrutinee, env)?;
            fits(scrutinee, &Type::Named(variant.clone()), "scrutinee")?;
            for arm in arms {
                let mark = env.len();
                for (b, t) in &arm.binders {
                    if let Some(b) = b {
                        env.push((b.clone(), t.clone()));
                    }
                }
                check(&arm.body, env)?;
                env.truncate(mark);
                fits(&arm.body, &e.ty, "match arm")?;
            }
        }
        Ascribe { expr, ev, .. } => {
            check(expr, env)?;
            if !precision_le(ev.ty(), &e.ty) || !precision_le(ev.ty(), &expr.ty) {
                return Err(format!("{}: evidence {ev} for {} at {}", e.span, expr.ty, e.ty));
            }
        }
        Seq(a, b) => {
            check(a, env)?;
            check(b, env)?;
            fits(b, &e.ty, "sequence result")?;
        }
    }
    Ok(())
}
