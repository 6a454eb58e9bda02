//! Gradual types and the precision lattice.
//!
//! `?` is the top of the lattice; static types are its minimal elements.
//! Consistency, precision, and meet are all defined structurally. Named
//! variant types are atomic points just below `?`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// A variant (algebraic data type) name.
pub type Name = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Int,
    Bool,
    Float,
    Unit,
    /// The unknown type `?`.
    Dyn,
    Ref(Arc<Type>),
    Vec(Arc<Type>),
    /// Arity is always at least two.
    Tuple(Arc<[Type]>),
    /// Arity is always at least one.
    Fun(Arc<[Type]>, Arc<Type>),
    Named(Name),
}

impl Type {
    pub fn reference(elem: Type) -> Type {
        Type::Ref(Arc::new(elem))
    }

    pub fn vector(elem: Type) -> Type {
        Type::Vec(Arc::new(elem))
    }

    pub fn tuple(items: Vec<Type>) -> Type {
        debug_assert!(items.len() >= 2);
        Type::Tuple(items.into())
    }

    pub fn fun(params: Vec<Type>, ret: Type) -> Type {
        debug_assert!(!params.is_empty());
        Type::Fun(params.into(), Arc::new(ret))
    }

    pub fn named(name: &str) -> Type {
        Type::Named(name.into())
    }

    pub fn is_dyn(&self) -> bool {
        matches!(self, Type::Dyn)
    }

    /// True when the type mentions no `?` anywhere.
    pub fn is_static(&self) -> bool {
        match self {
            Type::Dyn => false,
            Type::Int | Type::Bool | Type::Float | Type::Unit | Type::Named(_) => true,
            Type::Ref(t) | Type::Vec(t) => t.is_static(),
            Type::Tuple(ts) => ts.iter().all(Type::is_static),
            Type::Fun(ps, r) => ps.iter().all(Type::is_static) && r.is_static(),
        }
    }

    /// Calls `f` on every named type mentioned.
    pub fn for_each_name(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Type::Named(n) => f(n),
            Type::Ref(t) | Type::Vec(t) => t.for_each_name(f),
            Type::Tuple(ts) => ts.iter().for_each(|t| t.for_each_name(f)),
            Type::Fun(ps, r) => {
                ps.iter().for_each(|t| t.for_each_name(f));
                r.for_each_name(f);
            }
            _ => {}
        }
    }

    pub fn fun_parts(&self) -> Option<(&[Type], &Type)> {
        match self {
            Type::Fun(ps, r) => Some((ps, r)),
            _ => None,
        }
    }
}

/// Consistency: the two types agree on their known parts.
pub fn consistent(a: &Type, b: &Type) -> bool {
    use Type::*;
    match (a, b) {
        (Dyn, _) | (_, Dyn) => true,
        (Int, Int) | (Bool, Bool) | (Float, Float) | (Unit, Unit) => true,
        (Ref(x), Ref(y)) | (Vec(x), Vec(y)) => consistent(x, y),
        (Tuple(xs), Tuple(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| consistent(x, y))
        }
        (Fun(ps, r), Fun(qs, s)) => {
            ps.len() == qs.len()
                && ps.iter().zip(qs.iter()).all(|(x, y)| consistent(x, y))
                && consistent(r, s)
        }
        (Named(m), Named(n)) => m == n,
        _ => false,
    }
}

/// Greatest lower bound under precision. `None` when the heads clash.
pub fn meet(a: &Type, b: &Type) -> Option<Type> {
    use Type::*;
    match (a, b) {
        (Dyn, t) | (t, Dyn) => Some(t.clone()),
        (Int, Int) | (Bool, Bool) | (Float, Float) | (Unit, Unit) => Some(a.clone()),
        (Ref(x), Ref(y)) => {
            if Arc::ptr_eq(x, y) {
                return Some(a.clone());
            }
            Some(Type::reference(meet(x, y)?))
        }
        (Vec(x), Vec(y)) => {
            if Arc::ptr_eq(x, y) {
                return Some(a.clone());
            }
            Some(Type::vector(meet(x, y)?))
        }
        (Tuple(xs), Tuple(ys)) => {
            if xs.len() != ys.len() {
                return None;
            }
            if Arc::ptr_eq(xs, ys) {
                return Some(a.clone());
            }
            let items = xs
                .iter()
                .zip(ys.iter())
                .map(|(x, y)| meet(x, y))
                .collect::<Option<std::vec::Vec<_>>>()?;
            Some(Type::Tuple(items.into()))
        }
        (Fun(ps, r), Fun(qs, s)) => {
            if ps.len() != qs.len() {
                return None;
            }
            if Arc::ptr_eq(ps, qs) && Arc::ptr_eq(r, s) {
                return Some(a.clone());
            }
            let params = ps
                .iter()
                .zip(qs.iter())
                .map(|(x, y)| meet(x, y))
                .collect::<Option<std::vec::Vec<_>>>()?;
            Some(Type::Fun(params.into(), Arc::new(meet(r, s)?)))
        }
        (Named(m), Named(n)) if m == n => Some(a.clone()),
        _ => None,
    }
}

/// `a ⊑ b`: `a` is at least as precise as `b`.
pub fn precision_le(a: &Type, b: &Type) -> bool {
    use Type::*;
    match (a, b) {
        (_, Dyn) => true,
        (Dyn, _) => false,
        (Int, Int) | (Bool, Bool) | (Float, Float) | (Unit, Unit) => true,
        (Ref(x), Ref(y)) | (Vec(x), Vec(y)) => precision_le(x, y),
        (Tuple(xs), Tuple(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| precision_le(x, y))
        }
        (Fun(ps, r), Fun(qs, s)) => {
            ps.len() == qs.len()
                && ps.iter().zip(qs.iter()).all(|(x, y)| precision_le(x, y))
                && precision_le(r, s)
        }
        (Named(m), Named(n)) => m == n,
        _ => false,
    }
}

/// Elimination forms that need their subject to have a known head constructor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElimKind {
    Apply(usize),
    Deref,
    VecAccess,
    TupleProj(usize),
    Match(Name),
}

impl fmt::Display for ElimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElimKind::Apply(n) => write!(f, "fun/{n}"),
            ElimKind::Deref => f.write_str("ref"),
            ElimKind::VecAccess => f.write_str("vec"),
            ElimKind::TupleProj(i) => write!(f, "tuple#{i}"),
            ElimKind::Match(n) => write!(f, "variant {n}"),
        }
    }
}

/// The least precise type admitting the elimination form.
///
/// Tuple projection `#i` uses the `max(i+1, 2)`-ary tuple of `?`; tuples
/// never have fewer than two components.
pub fn germ_of(kind: &ElimKind) -> Type {
    match kind {
        ElimKind::Apply(n) => Type::fun(vec![Type::Dyn; *n], Type::Dyn),
        ElimKind::Deref => Type::reference(Type::Dyn),
        ElimKind::VecAccess => Type::vector(Type::Dyn),
        ElimKind::TupleProj(i) => Type::tuple(vec![Type::Dyn; (*i + 1).max(2)]),
        ElimKind::Match(n) => Type::Named(n.clone()),
    }
}

/// The elimination form `t` is the germ of, if it is one.
pub fn germ_kind(t: &Type) -> Option<ElimKind> {
    match t {
        Type::Fun(ps, r) if r.is_dyn() && ps.iter().all(Type::is_dyn) => Some(ElimKind::Apply(ps.len())),
        Type::Ref(c) if c.is_dyn() => Some(ElimKind::Deref),
        Type::Vec(c) if c.is_dyn() => Some(ElimKind::VecAccess),
        Type::Tuple(ts) if ts.iter().all(Type::is_dyn) => Some(ElimKind::TupleProj(ts.len() - 1)),
        Type::Named(n) => Some(ElimKind::Match(n.clone())),
        _ => None,
    }
}

/// Whether the top-level constructor of `t` admits the elimination.
///
/// For tuples this accepts any arity large enough for the index, so a
/// projection from an unknown-typed triple succeeds.
pub fn head_admits(t: &Type, kind: &ElimKind) -> bool {
    match (kind, t) {
        (ElimKind::Apply(n), Type::Fun(ps, _)) => ps.len() == *n,
        (ElimKind::Deref, Type::Ref(_)) => true,
        (ElimKind::VecAccess, Type::Vec(_)) => true,
        (ElimKind::TupleProj(i), Type::Tuple(ts)) => ts.len() > *i,
        (ElimKind::Match(n), Type::Named(m)) => n == m,
        _ => false,
    }
}

/// Number of non-`?` nodes in the type tree.
pub fn type_node_count(t: &Type) -> usize {
    match t {
        Type::Dyn => 0,
        Type::Int | Type::Bool | Type::Float | Type::Unit | Type::Named(_) => 1,
        Type::Ref(e) | Type::Vec(e) => 1 + type_node_count(e),
        Type::Tuple(ts) => 1 + ts.iter().map(type_node_count).sum::<usize>(),
        Type::Fun(ps, r) => 1 + ps.iter().map(type_node_count).sum::<usize>() + type_node_count(r),
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(t: &Type, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Type::Tuple(_) | Type::Fun(..) => write!(f, "({t})"),
                _ => write!(f, "{t}"),
            }
        }
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Float => f.write_str("float"),
            Type::Unit => f.write_str("unit"),
            Type::Dyn => f.write_str("?"),
            Type::Ref(t) => write!(f, "ref[{t}]"),
            Type::Vec(t) => write!(f, "vec[{t}]"),
            Type::Tuple(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    atom(t, f)?;
                }
                Ok(())
            }
            Type::Fun(ps, r) => {
                if ps.len() == 1 {
                    atom(&ps[0], f)?;
                } else {
                    f.write_str("(")?;
                    for (i, p) in ps.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{p}")?;
                    }
                    f.write_str(")")?;
                }
                write!(f, "->{r}")
            }
            Type::Named(n) => f.write_str(n),
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Type {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtorDef {
    pub name: Name,
    pub id: u32,
    pub fields: Vec<Type>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariantDef {
    pub name: Name,
    pub id: u32,
    pub ctors: Vec<CtorDef>,
}

/// Declared variant types, with dense ids for types and constructors.
#[derive(Clone, Debug, Default)]
pub struct VariantEnv {
    types: Vec<VariantDef>,
    by_type: HashMap<Name, usize>,
    by_ctor: HashMap<Name, (usize, usize)>,
}

impl VariantEnv {
    /// Registers a variant. Returns `false` if the type name or one of the
    /// constructor names is already taken.
    pub fn declare(&mut self, name: Name, ctors: Vec<(Name, Vec<Type>)>) -> bool {
        if self.by_type.contains_key(&name) {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        for (c, _) in &ctors {
            if self.by_ctor.contains_key(c) || !seen.insert(c.clone()) {
                return false;
            }
        }
        let idx = self.types.len();
        let ctors: Vec<CtorDef> = ctors
            .into_iter()
            .enumerate()
            .map(|(i, (cname, fields))| {
                self.by_ctor.insert(cname.clone(), (idx, i));
                CtorDef { name: cname, id: i as u32, fields }
            })
            .collect();
        self.by_type.insert(name.clone(), idx);
        self.types.push(VariantDef { name, id: idx as u32, ctors });
        true
    }

    pub fn get(&self, name: &str) -> Option<&VariantDef> {
        self.by_type.get(name).map(|&i| &self.types[i])
    }

    pub fn ctor(&self, ctor: &str) -> Option<(&VariantDef, &CtorDef)> {
        self.by_ctor.get(ctor).map(|&(t, c)| {
            let def = &self.types[t];
            (def, &def.ctors[c])
        })
    }

    pub fn variants(&self) -> &[VariantDef] {
        &self.types
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_type.contains_key(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(ps: Vec<Type>, r: Type) -> Type {
        Type::fun(ps, r)
    }

    #[test]
    fn consistency_examples() {
        use Type::*;
        assert!(consistent(&f(vec![Dyn], Bool), &f(vec![Int], Dyn)));
        assert!(consistent(&Int, &Int));
        assert!(!consistent(&Int, &Bool));
        // not transitive
        assert!(consistent(&Int, &Dyn) && consistent(&Dyn, &Bool));
    }

    #[test]
    fn meet_examples() {
        use Type::*;
        assert_eq!(meet(&Dyn, &Int), Some(Int));
        assert_eq!(meet(&f(vec![Dyn], Bool), &f(vec![Int], Dyn)), Some(f(vec![Int], Bool)));
        assert_eq!(meet(&Bool, &Int), None);
        assert_eq!(meet(&f(vec![Int], Int), &f(vec![Int, Int], Int)), None);
        assert_eq!(meet(&Type::named("a"), &Type::named("b")), None);
    }

    #[test]
    fn precision_examples() {
        use Type::*;
        assert!(precision_le(&Int, &Dyn));
        assert!(precision_le(&f(vec![Int], Dyn), &f(vec![Dyn], Dyn)));
        assert!(!precision_le(&Int, &Bool));
        assert!(!precision_le(&Dyn, &Int));
    }

    #[test]
    fn germs() {
        use Type::*;
        assert_eq!(germ_of(&ElimKind::Apply(1)), f(vec![Dyn], Dyn));
        assert_eq!(germ_of(&ElimKind::VecAccess), Type::vector(Dyn));
        assert_eq!(germ_of(&ElimKind::TupleProj(1)), Type::tuple(vec![Dyn, Dyn]));
        assert_eq!(germ_of(&ElimKind::TupleProj(0)), Type::tuple(vec![Dyn, Dyn]));
        assert_eq!(germ_of(&ElimKind::Deref), Type::reference(Dyn));
        assert!(head_admits(&Type::tuple(vec![Int, Int, Int]), &ElimKind::TupleProj(1)));
        assert!(!head_admits(&Type::tuple(vec![Int, Int]), &ElimKind::TupleProj(2)));
    }

    #[test]
    fn node_counts() {
        use Type::*;
        assert_eq!(type_node_count(&Int), 1);
        assert_eq!(type_node_count(&f(vec![Int], Int)), 3);
        assert_eq!(type_node_count(&f(vec![Dyn], Int)), 2);
        assert_eq!(type_node_count(&Dyn), 0);
    }

    #[test]
    fn display_matches_evidence_notation() {
        use Type::*;
        assert_eq!(f(vec![Dyn], Int).to_string(), "?->int");
        assert_eq!(f(vec![Int, Bool], Unit).to_string(), "(int,bool)->unit");
        assert_eq!(f(vec![f(vec![Int], Int)], Int).to_string(), "(int->int)->int");
        assert_eq!(Type::reference(Type::tuple(vec![Int, Bool])).to_string(), "ref[int*bool]");
        assert_eq!(f(vec![Int], f(vec![Int], Int)).to_string(), "int->int->int");
    }

    #[test]
    fn variant_env_rejects_duplicates() {
        let mut env = VariantEnv::default();
        assert!(env.declare("stream".into(), vec![("SCons".into(), vec![Type::Int])]));
        assert!(!env.declare("stream".into(), vec![]));
        assert!(!env.declare("other".into(), vec![("SCons".into(), vec![])]));
        let (def, c) = env.ctor("SCons").unwrap();
        assert_eq!(&*def.name, "stream");
        assert_eq!(c.fields.len(), 1);
    }
}
