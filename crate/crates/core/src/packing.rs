//! Hamming packings of the hypercube `{-1,+1}^d` and of signed `k`-sparse vectors.
//!
//! Both constructions are greedy rejection samplers: draw a uniformly random
//! candidate and keep it when it is far enough (in Hamming distance) from every
//! vertex kept so far. The target cardinalities are the classical existence
//! bounds, `(2/sqrt(e))^(d/2)` for the dense packing at separation `d/4` and
//! `exp((k/2) ln((d-k)/(k/2)))` for the sparse packing at separation `k/2`.

use crate::error::{Error, Result};
use crate::rng::{self, ids};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// A packing vertex with entries in `{-1, 0, +1}`.
pub type Vertex = Vec<i8>;

pub const DEFAULT_MAX_SIZE: usize = 4096;
/// Candidate draws allowed per target vertex before giving up.
pub const DRAWS_PER_TARGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PackingKind {
    Dense,
    Sparse { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingSet {
    dim: usize,
    kind: PackingKind,
    vertices: Vec<Vertex>,
    min_separation: usize,
    seed: u64,
    target: usize,
    capped: bool,
}

impl PackingSet {
    /// Wraps an explicit vertex list without checking it; see [`verify_packing`].
    pub fn from_vertices(dim: usize, kind: PackingKind, vertices: Vec<Vertex>, seed: u64) -> Self {
        let min_separation = required_separation(dim, kind);
        let target = vertices.len();
        PackingSet {
            dim,
            kind,
            vertices,
            min_separation,
            seed,
            target,
            capped: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> PackingKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The separation every pair must respect: `ceil(d/4)` or `ceil(k/2)`.
    pub fn min_separation(&self) -> usize {
        self.min_separation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Cardinality the construction aimed for (after capping).
    pub fn target(&self) -> usize {
        self.target
    }

    /// True when the existence bound exceeded the size cap.
    pub fn capped(&self) -> bool {
        self.capped
    }

    /// Writes one signed-integer CSV row per vertex.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Error::io(path, e))?,
        );
        for v in &self.vertices {
            let row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", row.join(",")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingOptions {
    pub max_size: usize,
}

impl Default for PackingOptions {
    fn default() -> Self {
        PackingOptions {
            max_size: DEFAULT_MAX_SIZE,
        }
    }
}

pub fn required_separation(dim: usize, kind: PackingKind) -> usize {
    match kind {
        PackingKind::Dense => dim.div_ceil(4),
        PackingKind::Sparse { k } => k.div_ceil(2),
    }
}

/// `ln` of the guaranteed cardinality; `None` when the sparse bound is undefined.
fn log_cardinality_bound(dim: usize, kind: PackingKind) -> f64 {
    match kind {
        PackingKind::Dense => dim as f64 / 2.0 * (std::f64::consts::LN_2 - 0.5),
        PackingKind::Sparse { k } => {
            let half = k as f64 / 2.0;
            half * ((dim - k) as f64 / half).ln()
        }
    }
}

/// `ceil` of the existence bound on the packing size, saturating at `usize::MAX`.
pub fn cardinality_bound(dim: usize, kind: PackingKind) -> usize {
    let lb = log_cardinality_bound(dim, kind);
    if lb >= (usize::MAX as f64).ln() {
        return usize::MAX;
    }
    // guard against exp(ln n) landing a hair above an integer n
    let v = lb.exp();
    let r = v.round();
    if (v - r).abs() < 1e-9 * r.max(1.0) {
        r as usize
    } else {
        v.ceil() as usize
    }
}

fn target_size(dim: usize, kind: PackingKind, max_size: usize) -> (usize, bool) {
    let bound = cardinality_bound(dim, kind).max(1);
    if bound > max_size {
        (max_size, true)
    } else {
        (bound, false)
    }
}

pub fn build_dense_packing(dim: usize, seed: u64) -> Result<PackingSet> {
    build_dense_packing_with(dim, seed, PackingOptions::default())
}

pub fn build_dense_packing_with(dim: usize, seed: u64, opts: PackingOptions) -> Result<PackingSet> {
    if dim == 0 {
        return Err(Error::InvalidSpec("packing dimension must be positive".into()));
    }
    if opts.max_size == 0 {
        return Err(Error::InvalidSpec("max packing size must be positive".into()));
    }
    let kind = PackingKind::Dense;
    if dim <= 3 {
        // separation is 1, so every distinct vertex qualifies
        let vertices: Vec<Vertex> = (0..1usize << dim)
            .take(opts.max_size)
            .map(|mask| {
                (0..dim)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect()
            })
            .collect();
        let capped = vertices.len() < 1 << dim;
        return Ok(PackingSet {
            dim,
            kind,
            target: vertices.len(),
            vertices,
            min_separation: 1,
            seed,
            capped,
        });
    }
    let mut rng = rng::stream(seed, &[ids::PACKING, dim as u64, 0]);
    greedy(dim, kind, seed, opts, || {
        (0..dim)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect()
    })
}

pub fn build_sparse_packing(dim: usize, k: usize, seed: u64) -> Result<PackingSet> {
    build_sparse_packing_with(dim, k, seed, PackingOptions::default())
}

pub fn build_sparse_packing_with(
    dim: usize,
    k: usize,
    seed: u64,
    opts: PackingOptions,
) -> Result<PackingSet> {
    if k == 0 || k > dim / 2 {
        return Err(Error::InvalidSparsity { d: dim, k });
    }
    if opts.max_size == 0 {
        return Err(Error::InvalidSpec("max packing size must be positive".into()));
    }
    let mut rng = rng::stream(seed, &[ids::PACKING, dim as u64, k as u64]);
    greedy(dim, PackingKind::Sparse { k }, seed, opts, || {
        let mut v = vec![0i8; dim];
        for i in index::sample(&mut rng, dim, k) {
            v[i] = if rng.random::<bool>() { 1 } else { -1 };
        }
        v
    })
}

/// Sign masks for popcount Hamming distances during construction.
struct Masks {
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl Masks {
    fn of(v: &[i8]) -> Self {
        let words = v.len().div_ceil(64);
        let mut pos = vec![0u64; words];
        let mut neg = vec![0u64; words];
        for (i, &x) in v.iter().enumerate() {
            match x {
                1 => pos[i / 64] |= 1 << (i % 64),
                -1 => neg[i / 64] |= 1 << (i % 64),
                _ => {}
            }
        }
        Masks { pos, neg }
    }

    fn distance(&self, other: &Masks) -> usize {
        self.pos
            .iter()
            .zip(&self.neg)
            .zip(other.pos.iter().zip(&other.neg))
            .map(|((p, n), (q, m))| ((p ^ q) | (n ^ m)).count_ones() as usize)
            .sum()
    }
}

fn greedy(
    dim: usize,
    kind: PackingKind,
    seed: u64,
    opts: PackingOptions,
    mut draw: impl FnMut() -> Vertex,
) -> Result<PackingSet> {
    let (target, capped) = target_size(dim, kind, opts.max_size);
    let separation = required_separation(dim, kind);
    let budget = DRAWS_PER_TARGET.saturating_mul(target);
    let mut kept: Vec<Vertex> = Vec::with_capacity(target);
    let mut masks: Vec<Masks> = Vec::with_capacity(target);
    let mut draws = 0;
    while kept.len() < target {
        if draws >= budget {
            return Err(Error::ConstructionFailed {
                target,
                reached: kept.len(),
                draws,
            });
        }
        draws += 1;
        let candidate = draw();
        let m = Masks::of(&candidate);
        if masks.iter().all(|other| m.distance(other) >= separation) {
            kept.push(candidate);
            masks.push(m);
        }
    }
    Ok(PackingSet {
        dim,
        kind,
        vertices: kept,
        min_separation: separation,
        seed,
        target,
        capped,
    })
}

pub fn hamming_distance(a: &[i8], b: &[i8]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    WrongLength { vertex: usize, len: usize },
    BadEntry { vertex: usize, coord: usize, value: i8 },
    WrongSupport { vertex: usize, support: usize },
    TooClose { first: usize, second: usize, distance: usize },
    Undersized { size: usize, required: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingReport {
    pub ok: bool,
    pub size: usize,
    /// `None` when the set has fewer than two vertices.
    pub min_pairwise: Option<usize>,
    pub violations: Vec<Violation>,
}

/// Exhaustive `O(M^2 d)` check of every packing invariant.
pub fn verify_packing(set: &PackingSet) -> PackingReport {
    let mut violations = Vec::new();
    let dim = set.dim;
    for (vi, v) in set.vertices.iter().enumerate() {
        if v.len() != dim {
            violations.push(Violation::WrongLength { vertex: vi, len: v.len() });
            continue;
        }
        for (ci, &x) in v.iter().enumerate() {
            let allowed = match set.kind {
                PackingKind::Dense => x == 1 || x == -1,
                PackingKind::Sparse { .. } => (-1..=1).contains(&x),
            };
            if !allowed {
                violations.push(Violation::BadEntry { vertex: vi, coord: ci, value: x });
            }
        }
        if let PackingKind::Sparse { k } = set.kind {
            let support = v.iter().filter(|&&x| x != 0).count();
            if support != k {
                violations.push(Violation::WrongSupport { vertex: vi, support });
            }
        }
    }
    let separation = required_separation(dim, set.kind);
    let mut min_pairwise: Option<usize> = None;
    for i in 0..set.vertices.len() {
        for j in i + 1..set.vertices.len() {
            let (a, b) = (&set.vertices[i], &set.vertices[j]);
            if a.len() != b.len() {
                continue;
            }
            let d = a.iter().zip(b).filter(|(x, y)| x != y).count();
            min_pairwise = Some(min_pairwise.map_or(d, |m| m.min(d)));
            if d < separation {
                violations.push(Violation::TooClose { first: i, second: j, distance: d });
            }
        }
    }
    if !set.capped {
        let required = match set.kind {
            PackingKind::Dense if dim <= 3 => 1 << dim,
            kind => cardinality_bound(dim, kind),
        };
        if set.vertices.len() < required {
            violations.push(Violation::Undersized {
                size: set.vertices.len(),
                required,
            });
        }
    } else if set.vertices.len() < set.target {
        violations.push(Violation::Undersized {
            size: set.vertices.len(),
            required: set.target,
        });
    }
    PackingReport {
        ok: violations.is_empty(),
        size: set.vertices.len(),
        min_pairwise,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_d1_is_both_signs() {
        let p = build_dense_packing(1, 9).unwrap();
        assert_eq!(p.vertices(), &[vec![1], vec![-1]]);
        assert_eq!(p.min_separation(), 1);
        assert!(verify_packing(&p).ok);
    }

    #[test]
    fn dense_d16_meets_bound() {
        // (2/sqrt(e))^8 = exp(8 (ln 2 - 1/2)) = 4.69..
        let bound = (8.0 * (std::f64::consts::LN_2 - 0.5)).exp();
        assert!((bound - 4.69).abs() < 0.01);
        assert_eq!(cardinality_bound(16, PackingKind::Dense), 5);
        for seed in 0..20 {
            let p = build_dense_packing(16, seed).unwrap();
            assert!(p.len() >= 5);
            let report = verify_packing(&p);
            assert!(report.ok, "{report:?}");
            assert!(report.min_pairwise.unwrap() >= 4);
        }
    }

    #[test]
    fn dense_d4_listed_example_is_valid() {
        let set = PackingSet::from_vertices(
            4,
            PackingKind::Dense,
            vec![vec![1, 1, 1, 1], vec![-1, -1, 1, 1], vec![1, -1, -1, -1]],
            0,
        );
        let report = verify_packing(&set);
        assert!(report.ok, "{report:?}");
        assert_eq!(report.min_pairwise, Some(2));
        for seed in 0..10 {
            assert!(verify_packing(&build_dense_packing(4, seed).unwrap()).ok);
        }
    }

    #[test]
    fn sparse_d4_k1_uses_signed_units() {
        let p = build_sparse_packing(4, 1, 3).unwrap();
        assert!(p.len() >= 3);
        for v in p.vertices() {
            assert_eq!(v.iter().filter(|&&x| x != 0).count(), 1);
        }
        let report = verify_packing(&p);
        assert!(report.ok);
        assert!(report.min_pairwise.unwrap() >= 1);
    }

    #[test]
    fn sparse_d64_k4_reaches_900() {
        assert_eq!(cardinality_bound(64, PackingKind::Sparse { k: 4 }), 900);
        let p = build_sparse_packing(64, 4, 1).unwrap();
        assert_eq!(p.len(), 900);
        assert!(verify_packing(&p).ok);
    }

    #[test]
    fn sparse_rejects_large_k() {
        assert!(matches!(
            build_sparse_packing(6, 4, 0),
            Err(Error::InvalidSparsity { d: 6, k: 4 })
        ));
        assert!(build_sparse_packing(6, 3, 0).is_ok());
        assert!(matches!(build_sparse_packing(6, 0, 0), Err(Error::InvalidSparsity { .. })));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&[1, 1, -1, -1], &[1, -1, 1, -1]).unwrap(), 2);
        assert_eq!(hamming_distance(&[1, -1, 1], &[1, -1, 1]).unwrap(), 0);
        assert_eq!(hamming_distance(&[1, 0, -1], &[-1, 0, 1]).unwrap(), 2);
        assert!(matches!(
            hamming_distance(&[1], &[1, 1]),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn verify_flags_duplicates_and_support() {
        let dup = PackingSet::from_vertices(
            4,
            PackingKind::Dense,
            vec![vec![1, 1, 1, 1], vec![1, 1, 1, 1]],
            0,
        );
        let r = verify_packing(&dup);
        assert!(!r.ok);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::TooClose { distance: 0, .. })));

        let short = PackingSet::from_vertices(
            6,
            PackingKind::Sparse { k: 2 },
            vec![vec![1, 0, 0, 0, 0, 0], vec![0, 0, 1, -1, 0, 0]],
            0,
        );
        let r = verify_packing(&short);
        assert!(!r.ok);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::WrongSupport { vertex: 0, support: 1 })));
    }

    #[test]
    fn capped_construction_reports_cap() {
        let p = build_dense_packing_with(128, 5, PackingOptions { max_size: 16 }).unwrap();
        assert!(p.capped());
        assert_eq!(p.len(), 16);
        assert!(verify_packing(&p).ok);
    }

    #[test]
    fn failure_when_generator_cannot_separate() {
        let err = greedy(8, PackingKind::Dense, 0, PackingOptions::default(), || vec![1; 8]);
        assert!(matches!(err, Err(Error::ConstructionFailed { reached: 1, .. })));
    }
}
