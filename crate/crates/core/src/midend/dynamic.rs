use super::core::*;
use crate::evidence::ContentKind;
use crate::types::{meet, Type};

/// Inserts the ascriptions whose evidence is only known at runtime:
/// arguments against the callee's domains, function results against the
/// running closure's codomain, and values written to or read from
/// structures against their content evidence.
pub fn elaborate_dynamic(mut p: CoreProgram) -> CoreProgram {
    let main = std::mem::take(&mut p.main);
    p.main = block(&mut p, main);
    p
}

fn content_type(t: &Type, kind: ContentKind) -> Type {
    match (t, kind) {
        (Type::Ref(c), ContentKind::Ref) | (Type::Vec(c), ContentKind::Vec) => (**c).clone(),
        (Type::Tuple(ts), ContentKind::TupleProj(i)) => ts.get(i).cloned().unwrap_or(Type::Dyn),
        _ => Type::Dyn,
    }
}

/// The static type of a value after ascription to a position bounded by `bound`.
fn ascribed_type(p: &CoreProgram, a: &Atom, bound: &Type) -> Type {
    meet(&p.atom_type(a), bound).unwrap_or_else(|| bound.clone())
}

fn dyn_ascribe(p: &mut CoreProgram, out: &mut Vec<Stmt>, span: crate::span::Span, atom: Atom, source: EvSource, bound: &Type, hint: &str) -> Atom {
    let ty = ascribed_type(p, &atom, bound);
    let var = p.fresh(hint, ty);
    out.push(Stmt { var, comp: Comp::DynAscribe { atom, source }, span, rec: false });
    Atom::Var(var)
}

fn block(p: &mut CoreProgram, b: Block) -> Block {
    let mut out = Vec::with_capacity(b.stmts.len());
    for s in b.stmts {
        let Stmt { var, comp, span, rec } = s;
        let comp = match comp {
            Comp::App { callee, mut args } => {
                let fty = p.atom_type(&callee);
                let params: Vec<Type> = fty.fun_parts().map(|(ps, _)| ps.to_vec()).unwrap_or_default();
                for (i, a) in args.iter_mut().enumerate() {
                    let bound = params.get(i).cloned().unwrap_or(Type::Dyn);
                    *a = dyn_ascribe(p, &mut out, span, *a, EvSource::Dom(i, callee), &bound, "arg");
                }
                Comp::App { callee, args }
            }
            Comp::Lambda(l) => {
                let LambdaDef { params, ret, ev, body } = *l;
                let mut body = block(p, body);
                let res = body.result();
                let r = dyn_ascribe(p, &mut body.stmts, span, res, EvSource::Cod, &ret, "res");
                body.ret = Some(r);
                Comp::Lambda(Box::new(LambdaDef { params, ret, ev, body }))
            }
            Comp::Assign { target, value } => {
                let bound = content_type(&p.atom_type(&target), ContentKind::Ref);
                let value = dyn_ascribe(p, &mut out, span, value, EvSource::Store(ContentKind::Ref, target), &bound, "w");
                Comp::Assign { target, value }
            }
            Comp::VecSet { vec, index, value } => {
                let bound = content_type(&p.atom_type(&vec), ContentKind::Vec);
                let value = dyn_ascribe(p, &mut out, span, value, EvSource::Store(ContentKind::Vec, vec), &bound, "w");
                Comp::VecSet { vec, index, value }
            }
            Comp::Deref(r) => {
                let raw = read(p, &mut out, span, Comp::Deref(r), ContentKind::Ref, r);
                Comp::DynAscribe { atom: raw, source: EvSource::Content(ContentKind::Ref, r) }
            }
            Comp::VecGet { vec, index } => {
                let raw = read(p, &mut out, span, Comp::VecGet { vec, index }, ContentKind::Vec, vec);
                Comp::DynAscribe { atom: raw, source: EvSource::Content(ContentKind::Vec, vec) }
            }
            Comp::Proj { tuple, index } => {
                let kind = ContentKind::TupleProj(index);
                let raw = read(p, &mut out, span, Comp::Proj { tuple, index }, kind, tuple);
                Comp::DynAscribe { atom: raw, source: EvSource::Content(kind, tuple) }
            }
            Comp::If { cond, then_block, else_block } => {
                Comp::If { cond, then_block: block(p, then_block), else_block: block(p, else_block) }
            }
            Comp::Loop { var, lo, hi, body } => Comp::Loop { var, lo, hi, body: block(p, body) },
            Comp::Match { scrutinee, variant, arms } => {
                let arms = arms
                    .into_iter()
                    .map(|a| CArm { body: block(p, a.body), ..a })
                    .collect();
                Comp::Match { scrutinee, variant, arms }
            }
            other => other,
        };
        out.push(Stmt { var, comp, span, rec });
    }
    Block { stmts: out, ret: b.ret }
}

/// Binds the raw result of a structure read; the caller ascribes it.
fn read(p: &mut CoreProgram, out: &mut Vec<Stmt>, span: crate::span::Span, comp: Comp, kind: ContentKind, subject: Atom) -> Atom {
    let ty = content_type(&p.atom_type(&subject), kind);
    let var = p.fresh("raw", ty);
    out.push(Stmt { var, comp, span, rec: false });
    Atom::Var(var)
}
