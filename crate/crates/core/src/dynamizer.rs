//! Sampling partially typed configurations of a fully typed program.
//!
//! A configuration replaces some subtrees of some annotations by `?`. Its
//! precision ratio is the number of retained type nodes over the number of
//! nodes in the original annotations. Configurations are sampled into equal
//! width bins of ratio.

use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::checker::{elaborate_static, TypeError, TypingMode};
use crate::surface::{pretty_program, Program};
use crate::types::{type_node_count, Type};

/// Attempts per configuration slot before giving up on a bin.
pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    /// Position in annotation visiting order.
    pub id: usize,
    pub ty: Type,
    pub nodes: usize,
}

#[derive(Debug, Error)]
pub enum DynamizeError {
    #[error("annotation {site} is `{ty}`; the dynamizer needs a fully typed program")]
    NotFullyTyped { site: usize, ty: Type },
    #[error("program does not typecheck: {0}")]
    Type(#[from] TypeError),
    #[error("bin {bin} of {bins} cannot be reached with {nodes} type nodes")]
    UnreachableBin { bin: usize, bins: usize, nodes: usize },
    #[error("bin {bin}: no configuration found in {attempts} attempts")]
    Exhausted { bin: usize, attempts: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// Every annotation position with its type and node count.
pub fn enumerate_annotation_sites(p: &Program) -> Result<Vec<Site>, DynamizeError> {
    let mut sites = Vec::new();
    p.visit_annotations(&mut |t| {
        sites.push(Site { id: sites.len(), ty: t.clone(), nodes: type_node_count(t) });
    });
    if let Some(s) = sites.iter().find(|s| !s.ty.is_static()) {
        return Err(DynamizeError::NotFullyTyped { site: s.id, ty: s.ty.clone() });
    }
    elaborate_static(p, TypingMode::Static)?;
    Ok(sites)
}

/// Erases a random set of subtrees of `t`: each node is replaced by `?`
/// with probability one half, and otherwise its children are visited.
pub fn less_precise_variants<R: Rng + ?Sized>(t: &Type, rng: &mut R) -> Type {
    if t.is_dyn() || rng.gen_bool(0.5) {
        return Type::Dyn;
    }
    match t {
        Type::Ref(e) => Type::reference(less_precise_variants(e, rng)),
        Type::Vec(e) => Type::vector(less_precise_variants(e, rng)),
        Type::Tuple(ts) => Type::tuple(ts.iter().map(|c| less_precise_variants(c, rng)).collect()),
        Type::Fun(ps, r) => {
            let ps = ps.iter().map(|c| less_precise_variants(c, rng)).collect();
            Type::fun(ps, less_precise_variants(r, rng))
        }
        atom => atom.clone(),
    }
}

/// Replaces the annotations of `p`, in visiting order.
pub fn with_annotations(p: &Program, types: &[Type]) -> Program {
    let mut q = p.clone();
    let mut i = 0;
    q.visit_annotations_mut(&mut |t| {
        *t = types[i].clone();
        i += 1;
    });
    debug_assert_eq!(i, types.len());
    q
}

/// Retained and total node counts of the annotations of `variant` relative
/// to `original`.
pub fn precision_ratio(original: &Program, variant: &Program) -> (usize, usize) {
    let mut total = 0;
    original.visit_annotations(&mut |t| total += type_node_count(t));
    let mut retained = 0;
    variant.visit_annotations(&mut |t| retained += type_node_count(t));
    (retained, total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Sampled,
    Typed,
    Untyped,
}

#[derive(Clone, Debug)]
pub struct ConfigSample {
    pub id: String,
    pub kind: ConfigKind,
    pub program: Program,
    pub retained: usize,
    pub total: usize,
    pub ratio: f64,
    pub bin: usize,
    pub seed: u64,
    /// (site id, retained node count) for every site.
    pub sites: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub samples_per_node: usize,
    pub bins: usize,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { samples_per_node: 10, bins: 10, seed: 0 }
    }
}

/// Bin of `retained / total`: `[k/bins, (k+1)/bins)`, with the last bin
/// closed at 1.
pub fn bin_of(retained: usize, total: usize, bins: usize) -> usize {
    if total == 0 {
        return bins - 1;
    }
    (retained * bins / total).min(bins - 1)
}

fn in_bin(retained: usize, total: usize, bin: usize, bins: usize) -> bool {
    total > 0 && bin_of(retained, total, bins) == bin
}

fn bin_reachable(total: usize, bin: usize, bins: usize) -> bool {
    (0..=total).any(|r| in_bin(r, total, bin, bins))
}

/// Efraimidis-Spirakis weighted shuffle: heavier sites tend to come first.
fn weighted_order<R: Rng>(sites: &[Site], rng: &mut R) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = sites
        .iter()
        .filter(|s| s.nodes > 0)
        .map(|s| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            (u.powf(1.0 / s.nodes as f64), s.id)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0));
    keyed.into_iter().map(|(_, id)| id).collect()
}

/// Erases annotations in a weighted random order until the ratio first
/// drops below the bin's upper edge. `None` if it overshoots the bin.
fn draw<R: Rng>(sites: &[Site], total: usize, bin: usize, bins: usize, rng: &mut R) -> Option<Vec<Type>> {
    let mut types: Vec<Type> = sites.iter().map(|s| s.ty.clone()).collect();
    let mut retained = total;
    let above = |r: usize| r * bins >= (bin + 1) * total && bin + 1 < bins;
    while above(retained) {
        let order = weighted_order(sites, rng);
        for id in order {
            if !above(retained) {
                break;
            }
            let before = type_node_count(&types[id]);
            types[id] = less_precise_variants(&types[id], rng);
            retained = retained - before + type_node_count(&types[id]);
        }
    }
    in_bin(retained, total, bin, bins).then_some(types)
}

fn sample(original: &Program, sites: &[Site], types: Vec<Type>, id: String, kind: ConfigKind, seed: u64, bins: usize) -> ConfigSample {
    let program = with_annotations(original, &types);
    let counts: Vec<(usize, usize)> = types.iter().enumerate().map(|(i, t)| (i, type_node_count(t))).collect();
    let retained = counts.iter().map(|c| c.1).sum();
    let total = sites.iter().map(|s| s.nodes).sum();
    let ratio = if total == 0 { 1.0 } else { retained as f64 / total as f64 };
    ConfigSample { id, kind, program, retained, total, ratio, bin: bin_of(retained, total, bins), seed, sites: counts }
}

/// Samples `samples_per_node * n` configurations spread evenly over the
/// bins, then appends the fully typed and fully untyped endpoints.
pub fn sample_lattice(p: &Program, opts: &SampleOptions) -> Result<Vec<ConfigSample>, DynamizeError> {
    let sites = enumerate_annotation_sites(p)?;
    let total: usize = sites.iter().map(|s| s.nodes).sum();
    let bins = opts.bins.max(1);
    let typed: Vec<Type> = sites.iter().map(|s| s.ty.clone()).collect();
    if total == 0 {
        return Ok(vec![sample(p, &sites, typed, "typed".into(), ConfigKind::Typed, opts.seed, bins)]);
    }
    if let Some(bin) = (0..bins).find(|&b| !bin_reachable(total, b, bins)) {
        return Err(DynamizeError::UnreachableBin { bin, bins, nodes: total });
    }
    let wanted = opts.samples_per_node * total;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(wanted + 2);
    for bin in 0..bins {
        let quota = wanted / bins + usize::from(bin < wanted % bins);
        for slot in 0..quota {
            let mut found = None;
            for _ in 0..MAX_ATTEMPTS {
                let Some(types) = draw(&sites, total, bin, bins, &mut rng) else { continue };
                let program = with_annotations(p, &types);
                if elaborate_static(&program, TypingMode::Gradual).is_ok() {
                    found = Some(types);
                    break;
                }
            }
            let types = found.ok_or(DynamizeError::Exhausted { bin, attempts: MAX_ATTEMPTS })?;
            let id = format!("b{bin}-{slot:03}");
            out.push(sample(p, &sites, types, id, ConfigKind::Sampled, opts.seed, bins));
        }
    }
    out.push(sample(p, &sites, typed, "typed".into(), ConfigKind::Typed, opts.seed, bins));
    let untyped = vec![Type::Dyn; sites.len()];
    out.push(sample(p, &sites, untyped, "untyped".into(), ConfigKind::Untyped, opts.seed, bins));
    Ok(out)
}

#[derive(Serialize)]
struct ManifestRow<'a> {
    config: &'a str,
    kind: ConfigKind,
    ratio: String,
    bin: usize,
    seed: u64,
    file: String,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DynamizeError + '_ {
    move |source| DynamizeError::Io { path: path.to_path_buf(), source }
}

/// Writes one `.gtp` file per configuration and a `manifest.csv`.
pub fn write_lattice(dir: &Path, stem: &str, configs: &[ConfigSample]) -> Result<PathBuf, DynamizeError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest = dir.join("manifest.csv");
    let csv_err = |source| DynamizeError::Csv { path: manifest.clone(), source };
    let mut w = csv::Writer::from_path(&manifest).map_err(csv_err)?;
    for c in configs {
        let file = format!("{stem}_{}.gtp", c.id);
        let path = dir.join(&file);
        std::fs::write(&path, pretty_program(&c.program)).map_err(io_err(&path))?;
        let row = ManifestRow { config: &c.id, kind: c.kind, ratio: format!("{:.4}", c.ratio), bin: c.bin, seed: c.seed, file };
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&manifest))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_are_half_open_except_the_last() {
        assert_eq!(bin_of(0, 10, 10), 0);
        assert_eq!(bin_of(1, 10, 10), 1);
        assert_eq!(bin_of(9, 10, 10), 9);
        assert_eq!(bin_of(10, 10, 10), 9);
        assert_eq!(bin_of(99, 1000, 10), 0);
    }

    #[test]
    fn small_programs_leave_bins_unreachable() {
        assert!(!bin_reachable(7, 3, 10));
        assert!((0..10).all(|b| bin_reachable(10, b, 10)));
    }
}
