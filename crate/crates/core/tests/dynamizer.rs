use std::collections::HashSet;

use evgrad::checker::{elaborate_static, TypingMode};
use evgrad::dynamizer::{
    bin_of, enumerate_annotation_sites, less_precise_variants, precision_ratio, sample_lattice, write_lattice, ConfigKind,
    DynamizeError, SampleOptions,
};
use evgrad::surface::{parse_source, Program};
use evgrad::types::{precision_le, Type};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every type obtained by replacing some set of subtrees by `?`.
fn all_erasures(t: &Type) -> Vec<Type> {
    let mut out = vec![Type::Dyn];
    let product = |children: &[Type]| -> Vec<Vec<Type>> {
        children.iter().fold(vec![vec![]], |acc, c| {
            let opts = all_erasures(c);
            acc.iter().flat_map(|prefix| opts.iter().map(move |o| [prefix.clone(), vec![o.clone()]].concat())).collect()
        })
    };
    match t {
        Type::Dyn => {}
        Type::Ref(e) => out.extend(all_erasures(e).into_iter().map(Type::reference)),
        Type::Vec(e) => out.extend(all_erasures(e).into_iter().map(Type::vector)),
        Type::Tuple(ts) => out.extend(product(ts).into_iter().map(Type::tuple)),
        Type::Fun(ps, r) => {
            let mut children = ps.to_vec();
            children.push((**r).clone());
            for mut c in product(&children) {
                let ret = c.pop().unwrap();
                out.push(Type::fun(c, ret));
            }
        }
        atom => out.push(atom.clone()),
    }
    out
}

fn support(t: &Type, draws: usize) -> HashSet<Type> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..draws).map(|_| less_precise_variants(t, &mut rng)).collect()
}

#[test]
fn variant_support_matches_brute_force_enumeration() {
    let int_to_int = Type::fun(vec![Type::Int], Type::Int);
    let expected: HashSet<Type> = all_erasures(&int_to_int).into_iter().collect();
    assert_eq!(expected.len(), 5);
    assert_eq!(support(&int_to_int, 10_000), expected);

    let bigger = Type::fun(vec![Type::vector(Type::Int), Type::Bool], Type::tuple(vec![Type::Int, Type::Float]));
    let expected: HashSet<Type> = all_erasures(&bigger).into_iter().collect();
    assert_eq!(support(&bigger, 50_000), expected);
}

#[test]
fn erased_root_drops_the_whole_subtree() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let t = less_precise_variants(&Type::Int, &mut rng);
        assert!(t == Type::Int || t == Type::Dyn);
    }
}

#[test]
fn sites_are_listed_with_node_counts() {
    let p = parse_source("fun (x:int) -> x").unwrap();
    let sites = enumerate_annotation_sites(&p).unwrap();
    assert_eq!(sites.len(), 1);
    assert_eq!((sites[0].ty.clone(), sites[0].nodes), (Type::Int, 1));

    let p = parse_source("let f : int -> int = fun (x:int) -> x in f 1").unwrap();
    let sites = enumerate_annotation_sites(&p).unwrap();
    assert_eq!(sites.iter().map(|s| s.nodes).collect::<Vec<_>>(), vec![3, 1]);

    let p = parse_source("fun (x:?) -> x").unwrap();
    assert!(matches!(enumerate_annotation_sites(&p), Err(DynamizeError::NotFullyTyped { .. })));
}

#[test]
fn unannotated_program_yields_one_trivial_config() {
    let p = parse_source("1 + 2").unwrap();
    let configs = sample_lattice(&p, &SampleOptions::default()).unwrap();
    assert_eq!(configs.len(), 1);
    assert_eq!(configs[0].kind, ConfigKind::Typed);
}

const PROGRAM: &str = "let rec fib : int -> int = fun (n:int) : int -> if n < 2 then n else fib (n - 1) + fib (n - 2) in\n\
                       let v : vec[int] = vector 4 0 in\n\
                       let sum : (vec[int], int) -> int = fun (w:vec[int], k:int) : int -> w.[0] + k in\n\
                       sum v (fib 5)";

fn program() -> Program {
    parse_source(PROGRAM).unwrap()
}

fn annotations(p: &Program) -> Vec<Type> {
    let mut out = Vec::new();
    p.visit_annotations(&mut |t| out.push(t.clone()));
    out
}

#[test]
fn lattice_sample_honours_its_contract() {
    let p = program();
    let n: usize = enumerate_annotation_sites(&p).unwrap().iter().map(|s| s.nodes).sum();
    assert!(n >= 10);
    let configs = sample_lattice(&p, &SampleOptions { seed: 3, ..SampleOptions::default() }).unwrap();
    assert_eq!(configs.len(), 10 * n + 2);
    let sampled: Vec<_> = configs.iter().filter(|c| c.kind == ConfigKind::Sampled).collect();
    assert_eq!(sampled.len(), 10 * n);
    for bin in 0..10 {
        assert_eq!(sampled.iter().filter(|c| c.bin == bin).count(), n, "bin {bin}");
    }
    let original = annotations(&p);
    for c in &configs {
        assert!(elaborate_static(&c.program, TypingMode::Gradual).is_ok(), "{}", c.id);
        let (retained, total) = precision_ratio(&p, &c.program);
        assert_eq!((retained, total), (c.retained, n));
        assert_eq!(bin_of(retained, total, 10), c.bin);
        let lo = c.bin as f64 / 10.0;
        let hi = (c.bin + 1) as f64 / 10.0;
        assert!(c.ratio >= lo && (c.ratio < hi || (c.bin == 9 && c.ratio <= 1.0)), "{} {}", c.id, c.ratio);
        for (o, v) in original.iter().zip(annotations(&c.program)) {
            assert!(precision_le(o, &v), "{o} vs {v}");
        }
    }
    let untyped = configs.iter().find(|c| c.kind == ConfigKind::Untyped).unwrap();
    assert_eq!((untyped.retained, untyped.bin), (0, 0));
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let p = program();
    let key = |seed| -> Vec<(String, Program)> {
        let opts = SampleOptions { seed, ..SampleOptions::default() };
        sample_lattice(&p, &opts).unwrap().into_iter().map(|c| (c.id, c.program.without_spans())).collect()
    };
    assert_eq!(key(11), key(11));
    assert_ne!(key(11), key(12));
}

#[test]
fn too_few_nodes_leave_a_bin_unreachable() {
    let p = parse_source("let f : (int, int) -> int = fun (a:int, b:int) : int -> a + b in f 1 2").unwrap();
    let n: usize = enumerate_annotation_sites(&p).unwrap().iter().map(|s| s.nodes).sum();
    assert_eq!(n, 7);
    let err = sample_lattice(&p, &SampleOptions::default()).unwrap_err();
    assert!(matches!(err, DynamizeError::UnreachableBin { bin: 3, nodes: 7, .. }), "{err}");
}

#[test]
fn written_lattice_reparses_to_the_same_configs() {
    let p = program();
    let configs = sample_lattice(&p, &SampleOptions { samples_per_node: 1, seed: 5, ..SampleOptions::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_lattice(dir.path(), "prog", &configs).unwrap();
    let mut reader = csv::Reader::from_path(&manifest).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["config", "kind", "ratio", "bin", "seed", "file"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), configs.len());
    for (row, c) in rows.iter().zip(&configs) {
        let text = std::fs::read_to_string(dir.path().join(&row[5])).unwrap();
        let q = parse_source(&text).unwrap();
        assert_eq!(q.without_spans(), c.program.without_spans());
        assert_eq!(&row[2], format!("{:.4}", c.ratio));
    }
}
