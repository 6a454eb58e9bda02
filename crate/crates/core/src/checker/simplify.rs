use super::elab::*;
use crate::evidence::trans;
use crate::types::{precision_le, Type};

/// Collapses ascription chains with compile-time consistent transitivity
/// and drops ascriptions that cannot change their subject.
///
/// Ascriptions directly on literals and lambdas are kept: they carry the
/// value's own evidence. With `dfo`, ascriptions that move a float across a
/// `float`/non-`float` boundary are kept because they box or unbox.
pub fn simplify_ascriptions(mut p: ElabProgram, dfo: bool) -> ElabProgram {
    simplify(&mut p.main, dfo);
    p
}

fn merge_kind(inner: AscKind, outer: AscKind, subject: &Type) -> AscKind {
    use AscKind::*;
    match (inner, outer) {
        (_, Germ) if subject.is_dyn() => Germ,
        (Source, _) | (_, Source) => Source,
        (Value, _) => Value,
        _ => Implicit,
    }
}

fn float_boundary(from: &Type, to: &Type) -> bool {
    (*from == Type::Float) != (*to == Type::Float)
}

fn simplify(e: &mut ElabExpr, dfo: bool) {
    for c in e.children_mut() {
        simplify(c, dfo);
    }
    loop {
        let EKind::Ascribe { expr, ev, kind } = &mut e.kind else { return };
        if let EKind::Ascribe { expr: sub, ev: inner_ev, kind: inner_kind } = &mut expr.kind {
            let Some(combined) = trans(inner_ev, ev) else {
                // fails at runtime; leave both in place
                return;
            };
            if dfo && float_boundary(&sub.ty, &expr.ty) != float_boundary(&sub.ty, &e.ty) {
                return;
            }
            let merged = merge_kind(*inner_kind, *kind, &sub.ty);
            let sub = std::mem::replace(&mut **sub, ElabExpr::new(EKind::Unit, Type::Unit, e.span));
            e.kind = EKind::Ascribe { expr: Box::new(sub), ev: combined, kind: merged };
            continue;
        }
        let keeps_value = expr.is_literal() || matches!(expr.kind, EKind::Lambda { .. });
        let boundary = dfo && float_boundary(&expr.ty, &e.ty);
        if !keeps_value && !boundary && precision_le(&expr.ty, ev.ty()) {
            let sub = std::mem::replace(&mut **expr, ElabExpr::new(EKind::Unit, Type::Unit, e.span));
            *e = sub;
        }
        return;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{elaborate_static, TypingMode};
    use crate::surface::parse_source;

    fn simp(src: &str) -> String {
        let p = elaborate_static(&parse_source(src).unwrap(), TypingMode::Gradual).unwrap();
        simplify_ascriptions(p, false).main.to_string()
    }

    #[test]
    fn collapses_source_chain() {
        assert_eq!(simp("false :: ?"), "<bool>false::?");
    }

    #[test]
    fn running_example() {
        assert_eq!(
            simp("let f = fun (x:?) -> x * 2 in print_int (f false)"),
            "let f = <?->int>(fun (x:?) -> <int>x * <int>2) in print_int (f <bool>false)"
        );
    }

    #[test]
    fn germ_ascription_survives() {
        assert_eq!(simp("fun (x:?, y:?) -> x y"), "<(?,?)->?>(fun (x:?, y:?) -> <?->?>x y)");
    }

    #[test]
    fn failing_chain_is_kept() {
        assert_eq!(simp("(5 :: ?) :: bool"), "<bool>(<int>5::?)::bool");
    }

    #[test]
    fn no_nested_ascriptions_when_consistent() {
        let src = "let g = fun (h:?) -> h 1 in let x : ? = g (fun (y:int) -> y) in (x :: int) + 1";
        let p = elaborate_static(&parse_source(src).unwrap(), TypingMode::Gradual).unwrap();
        let p = simplify_ascriptions(p, false);
        p.main.walk(&mut |e| {
            if let EKind::Ascribe { expr, .. } = &e.kind {
                assert!(!matches!(expr.kind, EKind::Ascribe { .. }), "{e}");
            }
        });
    }

    #[test]
    fn dfo_keeps_float_boundaries() {
        let src = "let x : float = 1.5 in let y : ? = x in y";
        let p = elaborate_static(&parse_source(src).unwrap(), TypingMode::Gradual).unwrap();
        let plain = simplify_ascriptions(p.clone(), false);
        let dfo = simplify_ascriptions(p, true);
        assert!(dfo.main.count_ascriptions() > plain.main.count_ascriptions());
    }
}
