//! Hard function ensembles `g_alpha` indexed by packing vertices.
//!
//! Every instance is coordinate separable:
//!
//! ```text
//! g_alpha(x) = (c/d) * sum_i [ (1/2 + alpha_i delta) f+(x_i) + (1/2 - alpha_i delta) f-(x_i) ]
//! ```
//!
//! with base functions depending on the class:
//!
//! | class            | f+(t)                                  | f-(t)                                  |
//! |------------------|----------------------------------------|----------------------------------------|
//! | convex Lipschitz | `abs(t + r/2)`                         | `abs(t - r/2)`                         |
//! | strongly convex  | `r th abs(t + r) + (1-th)/4 (t + r)^2` | `r th abs(t - r) + (1-th)/4 (t - r)^2` |
//! | sparse optimum   | `d (abs(t + r) + delta abs(t))`        | `d (abs(t - r) + delta abs(t))`        |
//!
//! The domain is the box `B_inf(r)`. Subgradients are the minimum-norm element of
//! the per-coordinate subdifferential, so the zero vector is returned at every
//! minimizer.

use crate::error::{Error, Result};
use crate::norms::PNorm;
use crate::packing::{self, PackingKind, PackingOptions, PackingSet, Vertex};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Points may exceed the radius by this relative amount before being rejected.
pub const DOMAIN_SLACK: f64 = 1e-9;
/// Largest dimension accepted by the grid oracles.
pub const MAX_BRUTEFORCE_DIM: usize = 4;
/// Above this many grid points the grid oracle switches to per-coordinate line scans.
pub const EXHAUSTIVE_GRID_LIMIT: usize = 1_100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    ConvexLipschitz,
    StronglyConvex,
    SparseOpt,
}

impl ClassKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ClassKind::ConvexLipschitz => "convex",
            ClassKind::StronglyConvex => "strong",
            ClassKind::SparseOpt => "sparse",
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ClassKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "convex" | "convex_lipschitz" => Ok(ClassKind::ConvexLipschitz),
            "strong" | "strongly_convex" => Ok(ClassKind::StronglyConvex),
            "sparse" | "sparse_opt" => Ok(ClassKind::SparseOpt),
            other => Err(format!("unknown class '{other}' (expected convex|strong|sparse)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleKind {
    /// One uniformly chosen coordinate coin per query.
    A,
    /// All `d` coordinate coins per query.
    B,
}

impl OracleKind {
    /// Coins revealed per query.
    pub fn coins_per_query(self, dim: usize) -> usize {
        match self {
            OracleKind::A => 1,
            OracleKind::B => dim,
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::A => "A",
            OracleKind::B => "B",
        })
    }
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(OracleKind::A),
            "B" | "b" => Ok(OracleKind::B),
            other => Err(format!("unknown oracle '{other}' (expected A|B)")),
        }
    }
}

/// Parameters of one function class together with the oracle that serves it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub kind: ClassKind,
    pub dim: usize,
    /// Lipschitz constant `L`, gradients measured in the `l_p` norm.
    pub lipschitz: f64,
    pub p: PNorm,
    /// Radius `r` of the box `B_inf(r)`.
    pub radius: f64,
    pub delta: f64,
    /// Only used by the strongly convex class.
    pub theta: f64,
    /// Only used by the sparse class.
    pub sparsity: usize,
    pub oracle: OracleKind,
}

impl ClassSpec {
    pub fn convex(dim: usize, lipschitz: f64, p: PNorm, radius: f64, delta: f64, oracle: OracleKind) -> Self {
        ClassSpec {
            kind: ClassKind::ConvexLipschitz,
            dim,
            lipschitz,
            p,
            radius,
            delta,
            theta: 0.0,
            sparsity: 0,
            oracle,
        }
    }

    pub fn strongly_convex(
        dim: usize,
        lipschitz: f64,
        p: PNorm,
        radius: f64,
        delta: f64,
        theta: f64,
        oracle: OracleKind,
    ) -> Self {
        ClassSpec {
            kind: ClassKind::StronglyConvex,
            dim,
            lipschitz,
            p,
            radius,
            delta,
            theta,
            sparsity: 0,
            oracle,
        }
    }

    /// Sparse class; always `p = inf` with Oracle B.
    pub fn sparse(dim: usize, k: usize, lipschitz: f64, radius: f64, delta: f64) -> Self {
        ClassSpec {
            kind: ClassKind::SparseOpt,
            dim,
            lipschitz,
            p: PNorm::INFINITY,
            radius,
            delta,
            theta: 0.0,
            sparsity: k,
            oracle: OracleKind::B,
        }
    }

    pub fn with_dim(&self, dim: usize) -> Self {
        ClassSpec { dim, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.dim == 0 {
            return bad("dimension must be positive".into());
        }
        if !(self.lipschitz > 0.0 && self.lipschitz.is_finite()) {
            return bad(format!("Lipschitz constant must be positive, got {}", self.lipschitz));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.delta > 0.0 && self.delta <= 0.25) {
            return bad(format!("delta must lie in (0, 1/4], got {}", self.delta));
        }
        match self.kind {
            ClassKind::ConvexLipschitz => {}
            ClassKind::StronglyConvex => {
                if !(0.0..1.0).contains(&self.theta) {
                    return bad(format!("theta must lie in [0, 1), got {}", self.theta));
                }
                strong_p_supported(self.p)?;
                if !check_compat(self)? {
                    return bad("Lipschitz/strong-convexity compatibility fails".into());
                }
            }
            ClassKind::SparseOpt => {
                if self.sparsity == 0 || self.sparsity > self.dim / 2 {
                    return Err(Error::InvalidSparsity {
                        d: self.dim,
                        k: self.sparsity,
                    });
                }
                if !self.p.is_infinite() {
                    return bad("sparse class requires p = inf".into());
                }
                if self.oracle == OracleKind::A {
                    return Err(Error::UnsupportedCombination(
                        "sparse class is served by Oracle B only".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The packing kind whose vertices index this class.
    pub fn packing_kind(&self) -> PackingKind {
        match self.kind {
            ClassKind::SparseOpt => PackingKind::Sparse { k: self.sparsity },
            _ => PackingKind::Dense,
        }
    }

    /// Strong-convexity parameter `kappa^2 = (1 - theta) c / (4 d)`.
    pub fn kappa_sq(&self) -> Option<f64> {
        if self.kind != ClassKind::StronglyConvex {
            return None;
        }
        let c = ensemble_prefactor(self).ok()?;
        Some((1.0 - self.theta) * c / (4.0 * self.dim as f64))
    }

    /// True when the strongly convex minimizer lies strictly inside the box.
    pub fn strong_interior_case(&self) -> bool {
        (1.0 - self.theta) / (1.0 + self.theta) >= 2.0 * self.delta
    }
}

fn strong_p_supported(p: PNorm) -> Result<()> {
    let v = p.value();
    if v > 1.0 && v <= 2.0 {
        return Err(Error::UnsupportedCombination(format!(
            "strongly convex class is defined for p = 1 or p > 2, got p = {p}"
        )));
    }
    Ok(())
}

/// Prefactor `c` that makes the ensemble `L`-Lipschitz for its oracle.
pub fn ensemble_prefactor(spec: &ClassSpec) -> Result<f64> {
    let l = spec.lipschitz;
    let d = spec.dim as f64;
    let dim_factor = d.powf(1.0 - spec.p.recip());
    match (spec.kind, spec.oracle) {
        (ClassKind::ConvexLipschitz, OracleKind::A) => Ok(l / 2.0),
        (ClassKind::ConvexLipschitz, OracleKind::B) => Ok(l * dim_factor),
        (ClassKind::StronglyConvex, oracle) => {
            strong_p_supported(spec.p)?;
            Ok(match oracle {
                OracleKind::A => l / spec.radius,
                OracleKind::B => l * dim_factor / spec.radius,
            })
        }
        (ClassKind::SparseOpt, OracleKind::B) => Ok(l / 3.0),
        (ClassKind::SparseOpt, OracleKind::A) => Err(Error::UnsupportedCombination(
            "sparse class is served by Oracle B only".into(),
        )),
    }
}

/// Compatibility of Lipschitz and strong-convexity constants:
/// `L / kappa^2 >= (r/4) d^(1/p)`, with `1e-12` relative slack.
pub fn compat_inequality(lipschitz: f64, kappa_sq: f64, radius: f64, dim: usize, p: PNorm) -> bool {
    if kappa_sq <= 0.0 {
        return true;
    }
    let lhs = lipschitz / kappa_sq;
    let rhs = radius / 4.0 * (dim as f64).powf(p.recip());
    lhs >= rhs * (1.0 - 1e-12)
}

pub fn check_compat(spec: &ClassSpec) -> Result<bool> {
    if spec.kind != ClassKind::StronglyConvex {
        return Err(Error::WrongKind {
            expected: "strongly convex",
        });
    }
    let kappa_sq = spec.kappa_sq().ok_or_else(|| {
        Error::UnsupportedCombination(format!("strongly convex class with p = {}", spec.p))
    })?;
    Ok(compat_inequality(spec.lipschitz, kappa_sq, spec.radius, spec.dim, spec.p))
}

/// Value and subdifferential interval of a scalar convex function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Piece {
    fn abs_at(t: f64) -> Piece {
        let s = if t > 0.0 {
            (1.0, 1.0)
        } else if t < 0.0 {
            (-1.0, -1.0)
        } else {
            (-1.0, 1.0)
        };
        Piece {
            value: t.abs(),
            lo: s.0,
            hi: s.1,
        }
    }

    fn smooth(value: f64, slope: f64) -> Piece {
        Piece {
            value,
            lo: slope,
            hi: slope,
        }
    }

    fn scale(self, w: f64) -> Piece {
        debug_assert!(w >= 0.0);
        Piece {
            value: w * self.value,
            lo: w * self.lo,
            hi: w * self.hi,
        }
    }

    fn add(self, o: Piece) -> Piece {
        Piece {
            value: self.value + o.value,
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
    }

    /// Minimum-norm element of the subdifferential.
    pub fn min_norm_slope(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            self.hi
        } else {
            0.0
        }
    }
}

/// The scalar base functions `f+`, `f-` of a class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum BaseShape {
    Convex { half_r: f64 },
    Strong { r: f64, theta: f64 },
    Sparse { r: f64, delta: f64, d: f64 },
}

impl BaseShape {
    fn of(spec: &ClassSpec) -> Self {
        match spec.kind {
            ClassKind::ConvexLipschitz => BaseShape::Convex {
                half_r: spec.radius / 2.0,
            },
            ClassKind::StronglyConvex => BaseShape::Strong {
                r: spec.radius,
                theta: spec.theta,
            },
            ClassKind::SparseOpt => BaseShape::Sparse {
                r: spec.radius,
                delta: spec.delta,
                d: spec.dim as f64,
            },
        }
    }

    /// `(f+(t), f-(t))` with their subdifferentials.
    pub fn pair(self, t: f64) -> (Piece, Piece) {
        match self {
            BaseShape::Convex { half_r } => (Piece::abs_at(t + half_r), Piece::abs_at(t - half_r)),
            BaseShape::Strong { r, theta } => {
                let q = (1.0 - theta) / 4.0;
                let make = |u: f64| {
                    Piece::abs_at(u)
                        .scale(r * theta)
                        .add(Piece::smooth(q * u * u, 2.0 * q * u))
                };
                (make(t + r), make(t - r))
            }
            BaseShape::Sparse { r, delta, d } => {
                let shrink = Piece::abs_at(t).scale(delta);
                (
                    Piece::abs_at(t + r).add(shrink).scale(d),
                    Piece::abs_at(t - r).add(shrink).scale(d),
                )
            }
        }
    }

    /// Weighted term `w_plus f+(t) + w_minus f-(t)`.
    pub fn mix(self, t: f64, w_plus: f64, w_minus: f64) -> Piece {
        let (fp, fm) = self.pair(t);
        let zero = Piece::smooth(0.0, 0.0);
        let a = if w_plus > 0.0 { fp.scale(w_plus) } else { zero };
        let b = if w_minus > 0.0 { fm.scale(w_minus) } else { zero };
        a.add(b)
    }
}

/// One member `g_alpha` of a hard ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardInstance {
    spec: ClassSpec,
    alpha: Vertex,
    prefactor: f64,
    minimizer: Vec<f64>,
    min_value: f64,
    #[serde(skip)]
    shape: BaseShape,
}

impl HardInstance {
    pub fn spec(&self) -> &ClassSpec {
        &self.spec
    }

    pub fn alpha(&self) -> &[i8] {
        &self.alpha
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn radius(&self) -> f64 {
        self.spec.radius
    }

    pub(crate) fn shape(&self) -> BaseShape {
        self.shape
    }

    /// Coin bias `P[b_i = 1] = 1/2 + alpha_i delta`.
    pub fn coin_bias(&self, i: usize) -> f64 {
        0.5 + self.alpha[i] as f64 * self.spec.delta
    }

    pub(crate) fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.spec.dim {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: self.spec.dim,
            });
        }
        let r = self.spec.radius;
        let limit = r * (1.0 + DOMAIN_SLACK);
        match x.iter().position(|v| !(v.abs() <= limit)) {
            Some(index) => Err(Error::OutOfDomain {
                index,
                value: x[index],
                radius: r,
            }),
            None => Ok(()),
        }
    }

    fn coord_piece(&self, i: usize, t: f64) -> Piece {
        let w = self.coin_bias(i);
        self.shape.mix(t, w, 1.0 - w)
    }

    fn coord_scale(&self) -> f64 {
        self.prefactor / self.spec.dim as f64
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let s: f64 = x
            .iter()
            .enumerate()
            .map(|(i, &t)| self.coord_piece(i, t).value)
            .sum();
        self.coord_scale() * s
    }

    /// A deterministic member of the subdifferential (minimum-norm per coordinate).
    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        Ok(self.subgradient_unchecked(x))
    }

    pub(crate) fn subgradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let s = self.coord_scale();
        x.iter()
            .enumerate()
            .map(|(i, &t)| s * self.coord_piece(i, t).min_norm_slope())
            .collect()
    }

    /// `g(x) - min g`, clamped below at zero only when within rounding.
    pub fn gap(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval(x)? - self.min_value)
    }

    /// Upper bound on `sum_i sup |d g / d x_i|` over the box, i.e. the Lipschitz
    /// constant of `g` with respect to `l_inf`.
    pub fn linf_lipschitz(&self) -> f64 {
        let c = self.prefactor;
        match self.spec.kind {
            ClassKind::ConvexLipschitz => c,
            ClassKind::StronglyConvex => c * self.spec.radius,
            ClassKind::SparseOpt => c * self.spec.dim as f64 * (1.0 + self.spec.delta),
        }
    }
}

pub fn make_instance(spec: &ClassSpec, alpha: &[i8]) -> Result<HardInstance> {
    spec.validate()?;
    let d = spec.dim;
    if alpha.len() != d {
        return Err(Error::IncompatibleVertex(format!(
            "vertex has length {} but the class has dimension {d}",
            alpha.len()
        )));
    }
    match spec.kind {
        ClassKind::SparseOpt => {
            if alpha.iter().any(|&a| !(-1..=1).contains(&a)) {
                return Err(Error::IncompatibleVertex("entries must lie in {-1,0,1}".into()));
            }
            let support = alpha.iter().filter(|&&a| a != 0).count();
            if support != spec.sparsity {
                return Err(Error::IncompatibleVertex(format!(
                    "support {support} differs from sparsity {}",
                    spec.sparsity
                )));
            }
        }
        _ => {
            if alpha.iter().any(|&a| a != 1 && a != -1) {
                return Err(Error::IncompatibleVertex("entries must lie in {-1,1}".into()));
            }
        }
    }
    let c = ensemble_prefactor(spec)?;
    let r = spec.radius;
    let delta = spec.delta;
    let theta = spec.theta;
    let (minimizer, min_value): (Vec<f64>, f64) = match spec.kind {
        ClassKind::ConvexLipschitz => (
            alpha.iter().map(|&a| -(a as f64) * r / 2.0).collect(),
            c * r / 2.0 - c * r * delta,
        ),
        ClassKind::StronglyConvex => {
            if spec.strong_interior_case() {
                let scale = 2.0 * delta * r * (1.0 + theta) / (1.0 - theta);
                (
                    alpha.iter().map(|&a| -(a as f64) * scale).collect(),
                    c * ((1.0 + 3.0 * theta) * r * r / 4.0
                        - delta * delta * r * r * (1.0 + theta).powi(2) / (1.0 - theta)),
                )
            } else {
                (
                    alpha.iter().map(|&a| -(a as f64) * r).collect(),
                    c * ((1.0 + theta) * r * r / 2.0 - (1.0 + theta) * delta * r * r),
                )
            }
        }
        ClassKind::SparseOpt => (
            alpha.iter().map(|&a| -(a as f64) * r).collect(),
            c * r * (d as f64 - spec.sparsity as f64 * delta),
        ),
    };
    Ok(HardInstance {
        spec: spec.clone(),
        alpha: alpha.to_vec(),
        prefactor: c,
        minimizer,
        min_value,
        shape: BaseShape::of(spec),
    })
}

/// Builds the packing that indexes `spec`'s ensemble.
pub fn packing_for(spec: &ClassSpec, seed: u64, opts: PackingOptions) -> Result<PackingSet> {
    match spec.packing_kind() {
        PackingKind::Dense => packing::build_dense_packing_with(spec.dim, seed, opts),
        PackingKind::Sparse { k } => packing::build_sparse_packing_with(spec.dim, k, seed, opts),
    }
}

pub fn build_ensemble(spec: &ClassSpec, set: &PackingSet) -> Result<Vec<HardInstance>> {
    if set.dim() != spec.dim || set.kind() != spec.packing_kind() {
        return Err(Error::IncompatibleVertex(
            "packing does not match the class dimension or kind".into(),
        ));
    }
    set.vertices().iter().map(|v| make_instance(spec, v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub analytic: f64,
    pub bruteforce: Option<f64>,
    pub grid_step: Option<f64>,
}

fn same_class(a: &HardInstance, b: &HardInstance) -> Result<()> {
    if a.spec != b.spec {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}

/// Closed-form discrepancy `rho(g_a, g_b)`.
pub fn discrepancy(a: &HardInstance, b: &HardInstance) -> Result<DiscrepancyReport> {
    Ok(DiscrepancyReport {
        analytic: discrepancy_analytic(a, b)?,
        bruteforce: None,
        grid_step: None,
    })
}

fn discrepancy_analytic(a: &HardInstance, b: &HardInstance) -> Result<f64> {
    same_class(a, b)?;
    let spec = &a.spec;
    let c = a.prefactor;
    let r = spec.radius;
    let delta = spec.delta;
    let d = spec.dim as f64;
    let hamming = packing::hamming_distance(&a.alpha, &b.alpha)? as f64;
    Ok(match spec.kind {
        ClassKind::ConvexLipschitz => 2.0 * c * r * delta / d * hamming,
        ClassKind::StronglyConvex => {
            let theta = spec.theta;
            if spec.strong_interior_case() {
                2.0 * c * delta * delta * r * r * (1.0 + theta).powi(2) / (d * (1.0 - theta)) * hamming
            } else {
                c / d * (2.0 * (1.0 + theta) * r * r * delta - (1.0 - theta) / 2.0 * r * r) * hamming
            }
        }
        ClassKind::SparseOpt => {
            // each shared nonzero sign saves 2 c r delta relative to the k-term baseline
            let agree = a
                .alpha
                .iter()
                .zip(&b.alpha)
                .filter(|(x, y)| **x != 0 && x == y)
                .count() as f64;
            2.0 * c * r * delta * (spec.sparsity as f64 - agree)
        }
    })
}

/// Uniform grid on `[-r, r]` with spacing at most `step` and both endpoints included.
pub fn box_grid(radius: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= radius) {
        return Err(Error::InvalidGrid { step, radius });
    }
    let ratio = 2.0 * radius / step;
    let n = if (ratio - ratio.round()).abs() < 1e-9 * ratio {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    Ok((0..=n)
        .map(|j| {
            if j == n {
                radius
            } else {
                -radius + 2.0 * radius * j as f64 / n as f64
            }
        })
        .collect())
}

/// Minimum of `f` over the product grid `points^dim`.
///
/// Small grids are enumerated exhaustively. Larger ones are scanned one
/// coordinate line at a time from a grid base point, which gives the same
/// minimum for coordinate-separable `f`.
pub fn grid_minimum(f: impl Fn(&[f64]) -> f64, dim: usize, points: &[f64]) -> f64 {
    let total = (points.len() as f64).powi(dim as i32);
    if total <= EXHAUSTIVE_GRID_LIMIT as f64 {
        let mut idx = vec![0usize; dim];
        let mut x: Vec<f64> = vec![points[0]; dim];
        let mut best = f64::INFINITY;
        loop {
            best = best.min(f(&x));
            let mut k = 0;
            loop {
                if k == dim {
                    return best;
                }
                idx[k] += 1;
                if idx[k] < points.len() {
                    x[k] = points[idx[k]];
                    break;
                }
                idx[k] = 0;
                x[k] = points[0];
                k += 1;
            }
        }
    }
    let mut x: Vec<f64> = vec![points[0]; dim];
    let base = f(&x);
    let mut total_min = base;
    for i in 0..dim {
        let mut best = 0.0f64;
        for &p in points {
            x[i] = p;
            best = best.min(f(&x) - base);
        }
        x[i] = points[0];
        total_min += best;
    }
    total_min
}

fn check_bruteforce_dim(dim: usize) -> Result<()> {
    if dim > MAX_BRUTEFORCE_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_BRUTEFORCE_DIM,
        });
    }
    Ok(())
}

/// Grid minimum of `g_a + g_b` minus the two analytic minima.
pub fn discrepancy_bruteforce(a: &HardInstance, b: &HardInstance, grid_step: f64) -> Result<f64> {
    same_class(a, b)?;
    check_bruteforce_dim(a.dim())?;
    let points = box_grid(a.radius(), grid_step)?;
    let joint = grid_minimum(|x| a.eval_unchecked(x) + b.eval_unchecked(x), a.dim(), &points);
    Ok(joint - a.min_value - b.min_value)
}

/// Analytic discrepancy plus the grid oracle's value.
pub fn discrepancy_checked(a: &HardInstance, b: &HardInstance, grid_step: f64) -> Result<DiscrepancyReport> {
    Ok(DiscrepancyReport {
        analytic: discrepancy_analytic(a, b)?,
        bruteforce: Some(discrepancy_bruteforce(a, b, grid_step)?),
        grid_step: Some(grid_step),
    })
}

/// Grid minimum of a single instance over the box.
pub fn grid_min_value(inst: &HardInstance, grid_step: f64) -> Result<f64> {
    check_bruteforce_dim(inst.dim())?;
    let points = box_grid(inst.radius(), grid_step)?;
    Ok(grid_minimum(|x| inst.eval_unchecked(x), inst.dim(), &points))
}

/// Minimum pairwise analytic discrepancy `psi` over an ensemble.
pub fn separation_psi(ensemble: &[HardInstance]) -> Result<f64> {
    if ensemble.len() < 2 {
        return Err(Error::TooFewInstances {
            need: 2,
            got: ensemble.len(),
        });
    }
    let mut psi = f64::INFINITY;
    for i in 0..ensemble.len() {
        for j in i + 1..ensemble.len() {
            psi = psi.min(discrepancy_analytic(&ensemble[i], &ensemble[j])?);
        }
    }
    Ok(psi)
}
