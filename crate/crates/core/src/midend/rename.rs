use std::collections::HashMap;

use crate::checker::{EKind, ElabExpr, ElabProgram};
use crate::surface::Ident;

/// Gives every binder a globally unique name of the form `base_k`.
///
/// A name that already looks renamed keeps its base, so renaming twice
/// yields the same shape of names.
pub fn alpha_rename(mut p: ElabProgram) -> ElabProgram {
    let mut r = Renamer::default();
    r.expr(&mut p.main);
    p
}

#[derive(Default)]
struct Renamer {
    counters: HashMap<Ident, usize>,
    scope: Vec<(Ident, Ident)>,
}

fn base_of(name: &str) -> &str {
    match name.rsplit_once('_') {
        Some((base, k)) if !base.is_empty() && !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()) => base,
        _ => name,
    }
}

impl Renamer {
    fn bind(&mut self, name: &Ident) -> Ident {
        let base: Ident = base_of(name).into();
        let k = self.counters.entry(base.clone()).or_insert(0);
        let fresh: Ident = format!("{base}_{k}").into();
        *k += 1;
        self.scope.push((name.clone(), fresh.clone()));
        fresh
    }

    fn lookup(&self, name: &Ident) -> Ident {
        self.scope
            .iter()
            .rev()
            .find(|(old, _)| old == name)
            .map(|(_, new)| new.clone())
            .unwrap_or_else(|| name.clone())
    }

    fn expr(&mut self, e: &mut ElabExpr) {
        use EKind::*;
        let mark = self.scope.len();
        match &mut e.kind {
            Var(x) => *x = self.lookup(x),
            Lambda { params, body, .. } => {
                for (x, _) in params.iter_mut() {
                    *x = self.bind(x);
                }
                self.expr(body);
            }
            Loop { var, lo, hi, body } => {
                self.expr(lo);
                self.expr(hi);
                *var = self.bind(var);
                self.expr(body);
            }
            Let { name, bound, body, .. } => {
                self.expr(bound);
                *name = self.bind(name);
                self.expr(body);
            }
            LetRec { name, bound, body, .. } => {
                *name = self.bind(name);
                self.expr(bound);
                self.expr(body);
            }
            Match { scrutinee, arms, .. } => {
                self.expr(scrutinee);
                for arm in arms {
                    let arm_mark = self.scope.len();
                    for (b, _) in arm.binders.iter_mut() {
                        if let Some(x) = b {
                            *x = self.bind(x);
                        }
                    }
                    self.expr(&mut arm.body);
                    self.scope.truncate(arm_mark);
                }
            }
            _ => {
                for c in e.children_mut() {
                    self.expr(c);
                }
            }
        }
        self.scope.truncate(mark);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{elaborate_static, simplify_ascriptions, TypingMode};
    use crate::surface::parse_source;

    fn renamed(src: &str) -> String {
        let p = elaborate_static(&parse_source(src).unwrap(), TypingMode::Gradual).unwrap();
        alpha_rename(simplify_ascriptions(p, false)).main.to_string()
    }

    #[test]
    fn nested_binders_get_distinct_names() {
        assert_eq!(
            renamed("let x = 1 in let x = x + 1 in x"),
            "let x_0 = <int>1 in let x_1 = x_0 + <int>1 in x_1"
        );
    }

    #[test]
    fn match_arms_are_scoped() {
        let src = "type t = A of int | B of int\nlet x = 5 in match A 1 with | A x -> x | B y -> x + y";
        let out = renamed(src);
        assert!(out.contains("A (x_1) -> x_1"), "{out}");
        assert!(out.contains("B (y_0) -> (x_0 + y_0)"), "{out}");
    }

    #[test]
    fn renaming_is_idempotent_up_to_suffixes() {
        let src = "let f = fun (x:int) -> let y = x in y in let x = 2 in f x";
        let p = elaborate_static(&parse_source(src).unwrap(), TypingMode::Gradual).unwrap();
        let once = alpha_rename(p);
        let twice = alpha_rename(once.clone());
        assert_eq!(once.main, twice.main);
    }
}
