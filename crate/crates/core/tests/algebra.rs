use evgrad::evidence::{trans, Evidence};
use evgrad::types::{consistent, meet, precision_le, Type};
use std::sync::LazyLock;

use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Type> {
    prop_oneof![
        Just(Type::Int),
        Just(Type::Bool),
        Just(Type::Float),
        Just(Type::Unit),
        Just(Type::Dyn),
        Just(Type::named("t")),
    ]
}

/// Gradual types of depth at most `depth`.
fn gradual(depth: u32) -> impl Strategy<Value = Type> {
    leaf().prop_recursive(depth - 1, 64, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Type::reference),
            inner.clone().prop_map(Type::vector),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Type::tuple),
            (prop::collection::vec(inner.clone(), 1..=2), inner).prop_map(|(ps, r)| Type::fun(ps, r)),
        ]
    })
}

/// A type at most as precise as `t`: some subtrees replaced by `?`.
fn erase(t: &Type, bits: &mut impl Iterator<Item = bool>) -> Type {
    if bits.next().unwrap_or(false) {
        return Type::Dyn;
    }
    match t {
        Type::Ref(e) => Type::reference(erase(e, bits)),
        Type::Vec(e) => Type::vector(erase(e, bits)),
        Type::Tuple(ts) => Type::tuple(ts.iter().map(|c| erase(c, bits)).collect()),
        Type::Fun(ps, r) => {
            let ps = ps.iter().map(|c| erase(c, bits)).collect();
            Type::fun(ps, erase(r, bits))
        }
        other => other.clone(),
    }
}

fn ev(t: &Type) -> Evidence {
    Evidence::new(t.clone())
}

fn tr(a: &Type, b: &Type) -> Option<Type> {
    trans(&ev(a), &ev(b)).map(Evidence::into_type)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn meet_laws(a in gradual(5), b in gradual(5), c in gradual(5)) {
        prop_assert_eq!(meet(&a, &b), meet(&b, &a));
        prop_assert_eq!(meet(&a, &a), Some(a.clone()));
        prop_assert_eq!(meet(&a, &Type::Dyn), Some(a.clone()));
        prop_assert_eq!(meet(&Type::Dyn, &a), Some(a.clone()));
        let left = meet(&a, &b).and_then(|ab| meet(&ab, &c));
        let right = meet(&b, &c).and_then(|bc| meet(&a, &bc));
        prop_assert_eq!(left, right);
        prop_assert_eq!(meet(&a, &b).is_some(), consistent(&a, &b));
        if let Some(m) = meet(&a, &b) {
            prop_assert!(precision_le(&m, &a) && precision_le(&m, &b));
        }
    }

    #[test]
    fn trans_is_associative(a in gradual(5), b in gradual(5), c in gradual(5)) {
        let left = tr(&a, &b).and_then(|ab| tr(&ab, &c));
        let right = tr(&b, &c).and_then(|bc| tr(&a, &bc));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn trans_is_monotone(a in gradual(5), b in gradual(5), bits in prop::collection::vec(any::<bool>(), 64)) {
        let mut it = bits.into_iter();
        let a2 = erase(&a, &mut it);
        let b2 = erase(&b, &mut it);
        prop_assert!(precision_le(&a, &a2) && precision_le(&b, &b2));
        if let Some(m) = tr(&a, &b) {
            let m2 = tr(&a2, &b2);
            prop_assert!(m2.is_some());
            prop_assert!(precision_le(&m, &m2.unwrap()));
        }
    }
}

/// Static types of depth at most 3 over int and bool with unary refs,
/// unary functions and pairs.
fn static_universe() -> Vec<Type> {
    let mut levels = vec![vec![Type::Int, Type::Bool]];
    for _ in 1..3 {
        let below: Vec<Type> = levels.iter().flatten().cloned().collect();
        let mut next = Vec::new();
        for x in &below {
            next.push(Type::reference(x.clone()));
            for y in &below {
                next.push(Type::fun(vec![x.clone()], y.clone()));
                next.push(Type::tuple(vec![x.clone(), y.clone()]));
            }
        }
        levels.push(next);
    }
    let mut all: Vec<Type> = levels.into_iter().flatten().collect();
    all.sort_by_key(|t| t.to_string());
    all.dedup();
    all
}

/// Concretization restricted to `universe`, computed structurally rather
/// than through `precision_le`.
fn gamma<'a>(t: &Type, universe: &'a [Type]) -> Vec<&'a Type> {
    fn member(s: &Type, t: &Type) -> bool {
        match (s, t) {
            (_, Type::Dyn) => true,
            (Type::Int, Type::Int) | (Type::Bool, Type::Bool) => true,
            (Type::Ref(x), Type::Ref(y)) => member(x, y),
            (Type::Tuple(xs), Type::Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| member(x, y)),
            (Type::Fun(ps, r), Type::Fun(qs, q)) => {
                ps.len() == qs.len() && ps.iter().zip(qs.iter()).all(|(x, y)| member(x, y)) && member(r, q)
            }
            _ => false,
        }
    }
    universe.iter().filter(|s| member(s, t)).collect()
}

static UNIVERSE: LazyLock<Vec<Type>> = LazyLock::new(static_universe);

fn small_gradual() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![Just(Type::Int), Just(Type::Bool), Just(Type::Dyn)];
    leaf.prop_recursive(2, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Type::reference),
            (inner.clone(), inner.clone()).prop_map(|(p, r)| Type::fun(vec![p], r)),
            (inner.clone(), inner).prop_map(|(x, y)| Type::tuple(vec![x, y])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn trans_agrees_with_concretization(a in small_gradual(), b in small_gradual()) {
        let universe = &*UNIVERSE;
        let ga = gamma(&a, universe);
        let gb = gamma(&b, universe);
        let both: Vec<&Type> = ga.iter().filter(|s| gb.contains(s)).copied().collect();
        match tr(&a, &b) {
            Some(m) => prop_assert_eq!(gamma(&m, universe), both),
            None => prop_assert!(both.is_empty(), "{} and {} share {:?}", a, b, both),
        }
    }
}

#[test]
fn universe_has_expected_size() {
    // Two atoms, then refs, functions and pairs over the 12 types of depth
    // at most 2.
    assert_eq!(static_universe().len(), 2 + 12 + 144 + 144);
}
