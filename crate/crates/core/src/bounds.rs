//! Information-theoretic lower bounds, theorem rates and the
//! optimization-to-identification reduction.
//!
//! All logarithms are natural. Probability bounds are clamped to `[0, 1]`.

use crate::ensembles::{separation_psi, ClassKind, ClassSpec, HardInstance};
use crate::error::{Error, Result};
use crate::oracles::OracleStream;
use crate::rng::{self, ids};
use crate::solvers::{self, SolverConfig};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Smallest number of trials accepted by [`identification_experiment`].
pub const MIN_TRIALS: usize = 30;

/// Unspecified universal constants of the rate expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateConstants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for RateConstants {
    fn default() -> Self {
        RateConstants {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub dim: usize,
    pub horizon: usize,
    /// Coins revealed per query: 1 for Oracle A, `d` for Oracle B.
    pub coins_per_round: usize,
    pub delta: f64,
    pub sparsity: Option<usize>,
    pub constants: RateConstants,
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(Error::OutOfRange(format!("delta must lie in (0, 1/4], got {delta}")));
    }
    Ok(())
}

/// KL divergence between `Bernoulli(1/2 + delta)` and `Bernoulli(1/2 - delta)`, in nats.
pub fn bernoulli_kl(delta: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::OutOfRange(format!("delta must lie in [0, 1/2), got {delta}")));
    }
    Ok(2.0 * delta * (4.0 * delta / (1.0 - 2.0 * delta)).ln_1p())
}

/// `1 - (16 l T delta^2 + ln 2) / ((d/2)(ln 2 - 1/2))`.
pub fn fano_bound(inputs: &BoundInputs) -> f64 {
    let d = inputs.dim as f64;
    let info = 16.0 * inputs.coins_per_round as f64 * inputs.horizon as f64 * inputs.delta.powi(2);
    clamp01(1.0 - (info + LN_2) / (d / 2.0 * (LN_2 - 0.5)))
}

/// `1 - sqrt(8 T delta^2)`.
pub fn lecam_bound(horizon: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if horizon == 0 {
        return Err(Error::OutOfRange("horizon T must be at least 1".into()));
    }
    Ok(clamp01(1.0 - (8.0 * horizon as f64 * delta * delta).sqrt()))
}

/// `1 - 2 (32 k T delta^2 + ln 2) / ((k/2) ln((d - k)/(k/2)))`.
pub fn sparse_fano_bound(dim: usize, k: usize, horizon: usize, delta: f64) -> Result<f64> {
    if k == 0 || k > dim / 2 {
        return Err(Error::InvalidSparsity { d: dim, k });
    }
    check_delta(delta)?;
    let (d, kf) = (dim as f64, k as f64);
    let info = 32.0 * kf * horizon as f64 * delta * delta;
    Ok(clamp01(1.0 - 2.0 * (info + LN_2) / (kf / 2.0 * ((d - kf) / (kf / 2.0)).ln())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremRate {
    pub value: f64,
    /// Name of the term attaining the minimum.
    pub active_term: &'static str,
    pub terms: Vec<(&'static str, f64)>,
}

/// The minimax lower-bound expression matching `spec` at horizon `T`.
pub fn theorem_rate(spec: &ClassSpec, horizon: usize, constants: &RateConstants) -> Result<TheoremRate> {
    spec.validate()?;
    if horizon == 0 {
        return Err(Error::OutOfRange("horizon T must be at least 1".into()));
    }
    let l = spec.lipschitz;
    let r = spec.radius;
    let d = spec.dim as f64;
    let t = horizon as f64;
    let p = spec.p;
    let spread = d.powf(1.0 - p.recip());
    let terms: Vec<(&'static str, f64)> = match spec.kind {
        ClassKind::ConvexLipschitz if p.value() <= 2.0 => vec![
            ("stochastic", constants.c0 * l * r * (d / t).sqrt()),
            ("cap", l * r / 144.0),
        ],
        ClassKind::ConvexLipschitz => vec![
            ("stochastic", constants.c0 * l * r * spread / t.sqrt()),
            ("cap", l * spread * r / 72.0),
        ],
        ClassKind::StronglyConvex => {
            let k2 = spec
                .kappa_sq()
                .ok_or_else(|| Error::UnsupportedCombination("strongly convex class with 1 < p <= 2".into()))?;
            if p.value() == 1.0 {
                vec![
                    ("fast", constants.c1 * l * l / (k2 * t)),
                    ("stochastic", constants.c2 * l * r * (d / t).sqrt()),
                    ("strong_cap", l * l / (1152.0 * k2 * d)),
                    ("cap", l * r / 144.0),
                ]
            } else {
                let sq = d.powf(1.0 - 2.0 * p.recip());
                vec![
                    ("fast", constants.c1 * l * l * sq / (k2 * t)),
                    ("stochastic", constants.c2 * l * r * spread / t.sqrt()),
                    ("strong_cap", l * l * sq / (1152.0 * k2)),
                    ("cap", l * r * spread / 144.0),
                ]
            }
        }
        ClassKind::SparseOpt => {
            let k = spec.sparsity as f64;
            vec![
                ("stochastic", constants.c0 * l * r * (k * k * (d / k).ln() / t).sqrt()),
                ("cap", l * k * r / 432.0),
            ]
        }
    };
    let (active_term, value) = terms
        .iter()
        .copied()
        .fold(("", f64::INFINITY), |best, term| if term.1 < best.1 { term } else { best });
    Ok(TheoremRate {
        value,
        active_term,
        terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Identified {
    pub index: usize,
    /// True when no instance had gap `<= psi/3` and the index was drawn uniformly.
    pub fallback: bool,
}

/// The instance whose optimality gap at `x` is at most `psi/3`, or a uniform
/// draw from `rng` when there is none.
pub fn identify_vertex(ensemble: &[HardInstance], x: &[f64], psi: f64, rng: &mut impl Rng) -> Result<Identified> {
    if ensemble.len() < 2 {
        return Err(Error::TooFewInstances {
            need: 2,
            got: ensemble.len(),
        });
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, g) in ensemble.iter().enumerate() {
        let gap = g.gap(x)?;
        if gap <= psi / 3.0 && best.is_none_or(|b| gap < b.1) {
            best = Some((i, gap));
        }
    }
    Ok(match best {
        Some((index, _)) => Identified { index, fallback: false },
        None => Identified {
            index: rng.random_range(0..ensemble.len()),
            fallback: true,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationResult {
    pub trials: usize,
    pub errors: usize,
    pub empirical_error_rate: f64,
    pub fallbacks: usize,
    pub psi: f64,
    pub psi_over_9: f64,
    pub mean_opt_gap: f64,
    pub horizon: usize,
}

/// Samples a vertex per trial, optimizes against its oracle, and tries to
/// recover the vertex from the averaged iterate.
pub fn identification_experiment(
    ensemble: &[HardInstance],
    config: &SolverConfig,
    trials: usize,
    seed: u64,
) -> Result<IdentificationResult> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidConfig(format!(
            "identification needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let psi = separation_psi(ensemble)?;
    let outcomes: Vec<(bool, bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(bool, bool, f64)> {
            let t = trial as u64;
            let truth = rng::stream(seed, &[ids::VERTEX_SAMPLE, t]).random_range(0..ensemble.len());
            let inst = &ensemble[truth];
            let mut oracle = OracleStream::new(inst, rng::derive_seed(seed, &[ids::ORACLE, t]));
            let run = solvers::run(&mut oracle, config)?;
            let mut fallback_rng = rng::stream(seed, &[ids::FALLBACK, t]);
            let guess = identify_vertex(ensemble, &run.averaged_iterate, psi, &mut fallback_rng)?;
            Ok((guess.index != truth, guess.fallback, run.final_gap))
        })
        .collect::<Result<_>>()?;
    let errors = outcomes.iter().filter(|o| o.0).count();
    let fallbacks = outcomes.iter().filter(|o| o.1).count();
    let mean_opt_gap = outcomes.iter().map(|o| o.2).sum::<f64>() / trials as f64;
    Ok(IdentificationResult {
        trials,
        errors,
        empirical_error_rate: errors as f64 / trials as f64,
        fallbacks,
        psi,
        psi_over_9: psi / 9.0,
        mean_opt_gap,
        horizon: config.horizon,
    })
}
