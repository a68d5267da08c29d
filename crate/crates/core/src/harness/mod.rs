//! Experiment driver: sweeps over `(d, T, k, seeds)`, rate fitting and reports.
//!
//! The minimax error of a cell is approximated by the largest seed-averaged
//! gap over up to `max_vertices` sampled ensemble members. This lower-bounds
//! the supremum over the whole function class and is only used to fit
//! exponents.

pub mod config;
pub mod fit;
pub mod report;

pub use config::{parse_sweep_config, ScheduleTemplate, SolverTemplate, SweepConfig};
pub use fit::{fit_rate, Axis, RateFit, RowFilter};
pub use report::{emit_report, read_rows, CSV_HEADER};

use crate::bounds::theorem_rate;
use crate::ensembles::{build_ensemble, packing_for, ClassKind, ClassSpec};
use crate::error::Result;
use crate::oracles::OracleStream;
use crate::packing::PackingOptions;
use crate::rng::{self, ids};
use crate::solvers::{self, SolverConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub class: ClassKind,
    pub dim: usize,
    pub horizon: usize,
    pub sparsity: Option<usize>,
    pub seed_count: usize,
    pub mean_gap: f64,
    pub std_gap: f64,
    pub theorem_rate: f64,
    /// Active term of the rate expression, or `failed` when the cell errored.
    pub active_term: String,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.active_term == "failed"
    }

    /// Value of the row along an axis.
    pub fn coordinate(&self, axis: Axis) -> Option<usize> {
        match axis {
            Axis::T => Some(self.horizon),
            Axis::D => Some(self.dim),
            Axis::K => self.sparsity,
        }
    }
}

/// Spec of the `(d, k)` cell group.
pub fn cell_spec(template: &ClassSpec, dim: usize, sparsity: Option<usize>) -> ClassSpec {
    let mut spec = template.with_dim(dim);
    if let Some(k) = sparsity {
        spec.sparsity = k;
    }
    spec
}

/// Runs every cell. Rows come out ordered by `(d, k, T)`; cells that error
/// produce a row marked `failed` instead of aborting the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut horizons = config.horizons.clone();
    horizons.sort_unstable();
    horizons.dedup();
    let mut rows = Vec::new();
    for &dim in &config.dims {
        for k in config.sparsity_grid() {
            match run_group(config, dim, k, &horizons) {
                Ok(mut group) => rows.append(&mut group),
                Err(_) => rows.extend(horizons.iter().map(|&t| SweepRow {
                    class: config.template.kind,
                    dim,
                    horizon: t,
                    sparsity: k,
                    seed_count: config.seeds.len(),
                    mean_gap: f64::NAN,
                    std_gap: f64::NAN,
                    theorem_rate: f64::NAN,
                    active_term: "failed".into(),
                })),
            }
        }
    }
    Ok(rows)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// All horizons of one `(d, k)` pair share runs: the schedules do not depend
/// on `T`, so a run to the largest horizon passes through every smaller one.
fn run_group(config: &SweepConfig, dim: usize, k: Option<usize>, horizons: &[usize]) -> Result<Vec<SweepRow>> {
    let spec = cell_spec(&config.template, dim, k);
    spec.validate()?;
    let group = [dim as u64, k.unwrap_or(0) as u64];
    let packing = packing_for(
        &spec,
        rng::derive_seed(config.master_seed, &[ids::PACKING, group[0], group[1]]),
        PackingOptions {
            max_size: config.packing_max_size,
        },
    )?;
    let ensemble = build_ensemble(&spec, &packing)?;
    let m = config.max_vertices.min(ensemble.len());
    let mut picked = rand::seq::index::sample(
        &mut rng::stream(config.master_seed, &[ids::VERTEX_SAMPLE, group[0], group[1]]),
        ensemble.len(),
        m,
    )
    .into_vec();
    picked.sort_unstable();

    let t_max = *horizons.last().expect("validated nonempty");
    let solver: SolverConfig = config
        .solver
        .build(&spec, t_max)?
        .with_trace_points(horizons.to_vec());
    let jobs: Vec<(usize, u64)> = picked
        .iter()
        .flat_map(|&v| config.seeds.iter().map(move |&s| (v, s)))
        .collect();
    let traces: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(v, seed)| -> Result<Vec<f64>> {
            let oracle_seed = rng::derive_seed(config.master_seed, &[ids::ORACLE, group[0], group[1], v as u64, seed]);
            let mut oracle = OracleStream::new(&ensemble[v], oracle_seed);
            let run = solvers::run(&mut oracle, &solver)?;
            Ok(horizons
                .iter()
                .map(|t| {
                    run.gap_trace
                        .iter()
                        .find(|e| e.0 == *t)
                        .map(|e| e.1)
                        .expect("trace records every requested horizon")
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let n_seeds = config.seeds.len();
    let mut rows = Vec::with_capacity(horizons.len());
    for (ti, &t) in horizons.iter().enumerate() {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for vi in 0..m {
            let gaps: Vec<f64> = (0..n_seeds).map(|si| traces[vi * n_seeds + si][ti]).collect();
            let (mean, std) = mean_std(&gaps);
            if mean > best.0 {
                best = (mean, std);
            }
        }
        let rate = theorem_rate(&spec, t, &config.constants)?;
        rows.push(SweepRow {
            class: spec.kind,
            dim,
            horizon: t,
            sparsity: k,
            seed_count: n_seeds,
            mean_gap: best.0,
            std_gap: best.1,
            theorem_rate: rate.value,
            active_term: rate.active_term.to_string(),
        });
    }
    Ok(rows)
}
