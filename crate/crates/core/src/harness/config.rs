//! Sweep configuration and its `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! class = convex            # convex | strong | sparse
//! oracle = B
//! p = 2
//! lipschitz = 1
//! radius = 0.5
//! delta = 0.1
//! dims = 16
//! horizons = 256, 512, 1024
//! seeds = 0..50             # or a comma list
//! master_seed = 7
//! geometry = box            # box | dual | sparse
//! prox = auto               # auto | euclidean | power:A
//! schedule = inverse_sqrt   # inverse_sqrt | inverse_t
//! eta0 = auto
//! eta_scale = 1           # multiplies eta0 = auto
//! ```

use crate::bounds::RateConstants;
use crate::ensembles::{ClassKind, ClassSpec, OracleKind};
use crate::error::{Error, Result};
use crate::norms::PNorm;
use crate::solvers::{default_eta0, recommended_prox, FeasibleSet, Geometry, Prox, SolverConfig, Stepsize};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleTemplate {
    /// `eta0 / sqrt(t)`; `None` uses [`default_eta0`].
    InverseSqrt { eta0: Option<f64> },
    /// `1 / (lambda t)`; `None` uses the class's `kappa^2`.
    InverseT { lambda: Option<f64> },
}

/// Solver settings resolved per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTemplate {
    pub geometry: Geometry,
    /// Overrides the recommended prox when set.
    pub prox: Option<Prox>,
    pub schedule: ScheduleTemplate,
    /// Multiplies the automatic `eta0`; ignored when `eta0` is given.
    pub eta_scale: f64,
    pub inner_tol: f64,
    pub inner_max_iters: usize,
}

impl Default for SolverTemplate {
    fn default() -> Self {
        SolverTemplate {
            geometry: Geometry::Box,
            prox: None,
            schedule: ScheduleTemplate::InverseSqrt { eta0: None },
            eta_scale: 1.0,
            inner_tol: 1e-8,
            inner_max_iters: 10_000,
        }
    }
}

impl SolverTemplate {
    pub fn feasible_set(&self, spec: &ClassSpec) -> FeasibleSet {
        match self.geometry {
            Geometry::Box | Geometry::Sparse => FeasibleSet::Box { radius: spec.radius },
            Geometry::Dual => FeasibleSet::LqBall {
                q: spec.p.dual(),
                radius: spec.radius,
            },
        }
    }

    pub fn build(&self, spec: &ClassSpec, horizon: usize) -> Result<SolverConfig> {
        let prox = match self.prox {
            Some(p) => p,
            None => recommended_prox(self.geometry, spec.dim, spec.p)?,
        };
        let set = self.feasible_set(spec);
        // minimizers of the sparse class are k-sparse
        let support = match spec.kind {
            ClassKind::SparseOpt => spec.sparsity.min(spec.dim),
            _ => spec.dim,
        };
        let stepsize = match self.schedule {
            ScheduleTemplate::InverseSqrt { eta0 } => Stepsize::InverseSqrt {
                eta0: eta0.unwrap_or_else(|| self.eta_scale * default_eta0(prox, &set, support, spec.lipschitz)),
            },
            ScheduleTemplate::InverseT { lambda } => Stepsize::InverseT {
                lambda: match lambda {
                    Some(l) => l,
                    None => spec.kappa_sq().ok_or_else(|| {
                        Error::InvalidConfig("inverse_t schedule without lambda needs a strongly convex class".into())
                    })?,
                },
            },
        };
        let mut cfg = SolverConfig::new(prox, set, horizon, stepsize);
        cfg.inner_tol = self.inner_tol;
        cfg.inner_max_iters = self.inner_max_iters;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Class of every cell; `dim` (and `sparsity` when swept) are overwritten.
    pub template: ClassSpec,
    pub dims: Vec<usize>,
    pub horizons: Vec<usize>,
    /// Sparsity grid for the sparse class; empty keeps the template's.
    pub sparsities: Vec<usize>,
    pub seeds: Vec<u64>,
    pub master_seed: u64,
    pub solver: SolverTemplate,
    pub max_vertices: usize,
    pub packing_max_size: usize,
    pub constants: RateConstants,
    pub output_path: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(template: ClassSpec) -> Self {
        let geometry = if template.kind == ClassKind::SparseOpt {
            Geometry::Sparse
        } else {
            Geometry::Box
        };
        SweepConfig {
            dims: vec![template.dim],
            template,
            horizons: Vec::new(),
            sparsities: Vec::new(),
            seeds: Vec::new(),
            master_seed: 0,
            solver: SolverTemplate {
                geometry,
                ..SolverTemplate::default()
            },
            max_vertices: 8,
            packing_max_size: 256,
            constants: RateConstants::default(),
            output_path: None,
        }
    }

    /// The sparsity values of the grid (`None` for dense classes).
    pub fn sparsity_grid(&self) -> Vec<Option<usize>> {
        if self.template.kind != ClassKind::SparseOpt {
            return vec![None];
        }
        if self.sparsities.is_empty() {
            vec![Some(self.template.sparsity)]
        } else {
            self.sparsities.iter().map(|&k| Some(k)).collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.dims.is_empty() || self.horizons.is_empty() || self.seeds.is_empty() {
            return bad("dims, horizons and seeds must all be nonempty");
        }
        if self.horizons.contains(&0) {
            return bad("horizons must be positive");
        }
        if self.max_vertices == 0 || self.packing_max_size == 0 {
            return bad("max_vertices and packing_max_size must be positive");
        }
        if !(self.template.delta > 0.0 && self.template.delta <= 0.25) {
            return bad("delta must lie in (0, 1/4]");
        }
        if !(self.solver.eta_scale > 0.0 && self.solver.eta_scale.is_finite()) {
            return bad("eta_scale must be positive");
        }
        Ok(())
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::InvalidConfig(format!("bad value '{s}' for '{key}'")))
        })
        .collect()
}

/// `a..b` (half open) or a comma list.
fn parse_seeds(v: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = v.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad seed range '{v}'")))?;
        let b: u64 = b.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad seed range '{v}'")))?;
        return Ok((a..b).collect());
    }
    parse_list("seeds", v)
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for '{key}'")))
}

fn parse_auto(key: &str, v: &str) -> Result<Option<f64>> {
    if v == "auto" {
        Ok(None)
    } else {
        parse_one(key, v).map(Some)
    }
}

/// Parses a sweep configuration file.
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let mut kv: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
        kv.push((k.trim().to_string(), v.trim().trim_matches('"').to_string()));
    }
    let get = |key: &str| kv.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());

    let kind: ClassKind = get("class")
        .ok_or_else(|| Error::InvalidConfig("missing 'class'".into()))?
        .parse()
        .map_err(Error::InvalidConfig)?;
    let oracle: OracleKind = get("oracle").unwrap_or("B").parse().map_err(Error::InvalidConfig)?;
    let p: PNorm = match get("p") {
        Some(v) => v.parse().map_err(Error::InvalidConfig)?,
        None if kind == ClassKind::SparseOpt => PNorm::INFINITY,
        None => PNorm::TWO,
    };
    let dims: Vec<usize> = parse_list("dims", get("dims").unwrap_or(""))?;
    let lipschitz = parse_one("lipschitz", get("lipschitz").unwrap_or("1"))?;
    let radius = parse_one("radius", get("radius").unwrap_or("0.5"))?;
    let delta = parse_one("delta", get("delta").unwrap_or("0.1"))?;
    let theta = parse_one("theta", get("theta").unwrap_or("0"))?;
    let sparsity = parse_one("sparsity", get("sparsity").unwrap_or("0"))?;
    let template = ClassSpec {
        kind,
        dim: dims.first().copied().unwrap_or(1),
        lipschitz,
        p,
        radius,
        delta,
        theta,
        sparsity,
        oracle,
    };
    let mut cfg = SweepConfig::new(template);
    cfg.dims = dims;
    cfg.horizons = parse_list("horizons", get("horizons").unwrap_or(""))?;
    cfg.sparsities = parse_list("sparsities", get("sparsities").unwrap_or(""))?;
    cfg.seeds = parse_seeds(get("seeds").unwrap_or(""))?;
    cfg.master_seed = parse_one(
        "master_seed",
        get("master_seed").ok_or_else(|| Error::InvalidConfig("missing 'master_seed'".into()))?,
    )?;
    if let Some(v) = get("geometry") {
        cfg.solver.geometry = v.parse().map_err(Error::InvalidConfig)?;
    }
    if let Some(v) = get("prox") {
        cfg.solver.prox = match v {
            "auto" => None,
            "euclidean" | "sgd" => Some(Prox::EuclideanHalf),
            other => {
                let a = other
                    .strip_prefix("power:")
                    .ok_or_else(|| Error::InvalidConfig(format!("bad prox '{other}'")))?;
                Some(Prox::power(parse_one("prox", a)?)?)
            }
        };
    }
    cfg.solver.schedule = match get("schedule").unwrap_or("inverse_sqrt") {
        "inverse_sqrt" => ScheduleTemplate::InverseSqrt {
            eta0: parse_auto("eta0", get("eta0").unwrap_or("auto"))?,
        },
        "inverse_t" => ScheduleTemplate::InverseT {
            lambda: parse_auto("lambda", get("lambda").unwrap_or("auto"))?,
        },
        other => return Err(Error::InvalidConfig(format!("bad schedule '{other}'"))),
    };
    if let Some(v) = get("eta_scale") {
        cfg.solver.eta_scale = parse_one("eta_scale", v)?;
    }
    if let Some(v) = get("inner_tol") {
        cfg.solver.inner_tol = parse_one("inner_tol", v)?;
    }
    if let Some(v) = get("inner_max_iters") {
        cfg.solver.inner_max_iters = parse_one("inner_max_iters", v)?;
    }
    if let Some(v) = get("max_vertices") {
        cfg.max_vertices = parse_one("max_vertices", v)?;
    }
    if let Some(v) = get("packing_max_size") {
        cfg.packing_max_size = parse_one("packing_max_size", v)?;
    }
    for (key, slot) in [("c0", &mut cfg.constants.c0), ("c1", &mut cfg.constants.c1), ("c2", &mut cfg.constants.c2)] {
        if let Some(v) = get(key) {
            *slot = parse_one(key, v)?;
        }
    }
    if let Some(v) = get("output") {
        cfg.output_path = Some(PathBuf::from(v));
    }
    const KNOWN: &[&str] = &[
        "class", "oracle", "p", "dims", "lipschitz", "radius", "delta", "theta", "sparsity", "horizons",
        "sparsities", "seeds", "master_seed", "geometry", "prox", "schedule", "eta0", "eta_scale", "lambda", "inner_tol",
        "inner_max_iters", "max_vertices", "packing_max_size", "c0", "c1", "c2", "output",
    ];
    if let Some((k, _)) = kv.iter().find(|(k, _)| !KNOWN.contains(&k.as_str())) {
        return Err(Error::InvalidConfig(format!("unknown key '{k}'")));
    }
    cfg.validate()?;
    Ok(cfg)
}
