use std::collections::HashMap;

use super::core::*;
use crate::evidence::ContentKind;
use crate::types::{germ_kind, Type};

/// Replaces static ascriptions of `?`-typed atoms to a germ with a plain
/// head-constructor check.
pub fn specialize_germs(mut p: CoreProgram) -> CoreProgram {
    let vars = std::mem::take(&mut p.vars);
    let mut rewrite = |c: &mut Comp| {
        let Comp::Ascribe { atom, target, .. } = c else { return };
        let Atom::Var(v) = atom else { return };
        if !vars[v.id.0 as usize].ty.is_dyn() {
            return;
        }
        if let Some(kind) = germ_kind(target) {
            *c = Comp::CheckGerm { atom: *atom, kind };
        }
    };
    p.main.visit_mut(&mut rewrite);
    for code in &mut p.codes {
        code.body.visit_mut(&mut rewrite);
    }
    p.vars = vars;
    p
}

/// Deletes dynamic ascriptions that cannot change their subject: the static
/// upper bound of the runtime evidence is fully precise and the subject is
/// already statically at that type. Reads from structures and projections
/// are only pruned in fully static programs, since elsewhere a structure
/// may hold values stored through a less precise alias.
pub fn prune_dynamic_ascriptions(mut p: CoreProgram) -> CoreProgram {
    let mut subst = HashMap::new();
    let mut main = std::mem::take(&mut p.main);
    prune_block(&p, &mut main, None, &mut subst);
    let mut codes = std::mem::take(&mut p.codes);
    for code in &mut codes {
        prune_block(&p, &mut code.body, Some(&code.ret), &mut subst);
    }
    forward(&mut main, &subst);
    for code in &mut codes {
        forward(&mut code.body, &subst);
    }
    p.main = main;
    p.codes = codes;
    p
}

fn content_bound(t: &Type, kind: ContentKind) -> Option<Type> {
    match (t, kind) {
        (Type::Ref(c), ContentKind::Ref) | (Type::Vec(c), ContentKind::Vec) => Some((**c).clone()),
        (Type::Tuple(ts), ContentKind::TupleProj(i)) => ts.get(i).cloned(),
        _ => None,
    }
}

fn static_bound(p: &CoreProgram, source: &EvSource, ret: Option<&Type>) -> Option<Type> {
    match source {
        EvSource::Dom(i, f) => p.atom_type(f).fun_parts().and_then(|(ps, _)| ps.get(*i).cloned()),
        EvSource::Cod => ret.cloned(),
        EvSource::Store(k, s) => content_bound(&p.atom_type(s), *k),
        EvSource::Content(k, s) if p.fully_static => content_bound(&p.atom_type(s), *k),
        EvSource::Content(..) => None,
    }
}

fn prune_block(p: &CoreProgram, b: &mut Block, ret: Option<&Type>, subst: &mut HashMap<VarId, Atom>) {
    for s in &mut b.stmts {
        if let Comp::DynAscribe { atom, source } = &s.comp {
            if let Some(bound) = static_bound(p, source, ret) {
                if bound.is_static() && p.atom_type(atom) == bound {
                    subst.insert(s.var.id, *atom);
                }
            }
        }
        if let Comp::Lambda(l) = &mut s.comp {
            let LambdaDef { ret, body, .. } = &mut **l;
            prune_block(p, body, Some(&*ret), subst);
            continue;
        }
        for nested in s.comp.blocks_mut() {
            prune_block(p, nested, ret, subst);
        }
    }
}

fn resolve(a: Atom, subst: &HashMap<VarId, Atom>) -> Atom {
    let mut a = a;
    while let Some(next) = a.var_id().and_then(|v| subst.get(&v)) {
        a = *next;
    }
    a
}

/// Drops pruned bindings and forwards their subject to every use.
pub(super) fn forward(b: &mut Block, subst: &HashMap<VarId, Atom>) {
    b.stmts.retain(|s| !subst.contains_key(&s.var.id));
    for s in &mut b.stmts {
        for a in s.comp.atoms_mut() {
            *a = resolve(*a, subst);
        }
        for nested in s.comp.blocks_mut() {
            forward(nested, subst);
        }
    }
    if let Some(r) = &mut b.ret {
        *r = resolve(*r, subst);
    }
}
