//! Stochastic mirror descent with averaged iterates.
//!
//! `run` starts at `x_1 = argmin_S Phi = 0`, queries the oracle at `x_t`,
//! takes a mirror step with stepsize `eta_t`, and reports the average of
//! `x_1, ..., x_T`. With the Euclidean prox this is projected SGD.

pub mod mirror;
pub mod prox;
pub mod sets;

pub use mirror::mirror_step;
pub use prox::{bregman, prox_value, Prox};
pub use sets::FeasibleSet;

use crate::error::{Error, Result};
use crate::norms::PNorm;
use crate::oracles::FirstOrderOracle;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stepsize {
    /// `eta_t = eta0 / sqrt(t)`.
    InverseSqrt { eta0: f64 },
    /// `eta_t = 1 / (lambda t)`.
    InverseT { lambda: f64 },
}

impl Stepsize {
    pub fn at(&self, t: usize) -> f64 {
        let t = t as f64;
        match *self {
            Stepsize::InverseSqrt { eta0 } => eta0 / t.sqrt(),
            Stepsize::InverseT { lambda } => 1.0 / (lambda * t),
        }
    }

    fn validate(&self) -> Result<()> {
        let v = match *self {
            Stepsize::InverseSqrt { eta0 } => eta0,
            Stepsize::InverseT { lambda } => lambda,
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidConfig(format!("stepsize parameter must be positive, got {v}")));
        }
        Ok(())
    }
}

/// `eta0 = sqrt(2 max_S Phi) / L`, the `1/sqrt(t)` scale that balances the
/// distance term against the gradient noise.
pub fn default_eta0(prox: Prox, set: &FeasibleSet, dim: usize, lipschitz: f64) -> f64 {
    (2.0 * set.max_prox(prox, dim)).sqrt() / lipschitz
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub prox: Prox,
    pub set: FeasibleSet,
    pub horizon: usize,
    pub stepsize: Stepsize,
    /// Report the running average (on) or the current iterate (off).
    pub averaging: bool,
    pub inner_tol: f64,
    pub inner_max_iters: usize,
    /// Record a trace entry every this many steps; 0 records only `t = T`.
    pub trace_every: usize,
    /// Extra steps at which to record a trace entry.
    #[serde(default)]
    pub trace_points: Vec<usize>,
}

impl SolverConfig {
    pub fn new(prox: Prox, set: FeasibleSet, horizon: usize, stepsize: Stepsize) -> Self {
        SolverConfig {
            prox,
            set,
            horizon,
            stepsize,
            averaging: true,
            inner_tol: 1e-8,
            inner_max_iters: 10_000,
            trace_every: 0,
            trace_points: Vec::new(),
        }
    }

    pub fn with_trace_points(mut self, mut points: Vec<usize>) -> Self {
        points.sort_unstable();
        points.dedup();
        self.trace_points = points;
        self
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = every;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon T must be at least 1".into()));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::InvalidConfig("inner_tol must be positive".into()));
        }
        if let Prox::Power(a) = self.prox {
            Prox::power(a)?;
        }
        self.set.validate()?;
        self.stepsize.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverRun {
    pub final_iterate: Vec<f64>,
    pub averaged_iterate: Vec<f64>,
    /// `(t, gap)` of the averaged iterate over `x_1..x_t` (or of `x_t` without averaging).
    pub gap_trace: Vec<(usize, f64)>,
    /// Mean of `g(x_t) - min g` over the traced steps.
    pub mean_iterate_gap: Option<f64>,
    /// Gap of the reported iterate at `t = T`.
    pub final_gap: f64,
    pub queries_used: usize,
}

pub fn run<O: FirstOrderOracle>(oracle: &mut O, config: &SolverConfig) -> Result<SolverRun> {
    config.validate()?;
    let inst = oracle.instance().clone();
    let d = inst.dim();
    if config.set.linf_extent() > inst.radius() * (1.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "feasible set {} is not inside the instance domain B_inf({})",
            config.set,
            inst.radius()
        )));
    }
    let min_value = inst.min_value();
    let mut x = vec![0.0; d];
    let mut dual = vec![0.0; d];
    let mut sum = vec![0.0; d];
    let mut avg = vec![0.0; d];
    let mut trace = Vec::new();
    let mut iterate_gap_sum = 0.0;
    let mut traced = 0usize;
    let horizon = config.horizon;
    let mut points = config.trace_points.clone();
    points.sort_unstable();
    for t in 1..=horizon {
        for (s, v) in sum.iter_mut().zip(&x) {
            *s += v;
        }
        let record = t == horizon
            || (config.trace_every > 0 && t % config.trace_every == 0)
            || points.binary_search(&t).is_ok();
        if record {
            let reported = if config.averaging {
                let inv = 1.0 / t as f64;
                for (a, s) in avg.iter_mut().zip(&sum) {
                    *a = s * inv;
                }
                &avg
            } else {
                &x
            };
            trace.push((t, inst.eval(reported)? - min_value));
            if config.trace_every > 0 {
                iterate_gap_sum += inst.eval(&x)? - min_value;
                traced += 1;
            }
        }
        let answer = oracle.query(&x)?;
        let eta = config.stepsize.at(t);
        let step = mirror::step_from_dual(
            config.prox,
            &config.set,
            &x,
            &dual,
            &answer.gradient_estimate,
            eta,
            config.inner_tol,
            config.inner_max_iters,
        )?;
        x = step.x;
        dual = step.dual;
    }
    let averaged_iterate: Vec<f64> = sum.iter().map(|s| s / horizon as f64).collect();
    let final_gap = trace.last().map(|e| e.1).unwrap_or(f64::NAN);
    Ok(SolverRun {
        final_iterate: x,
        averaged_iterate,
        gap_trace: trace,
        mean_iterate_gap: (traced > 0).then(|| iterate_gap_sum / traced as f64),
        final_gap,
        queries_used: horizon,
    })
}

/// The geometry a prox recommendation is made for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Feasible set is the dual-norm ball `B_q(1)`.
    Dual,
    /// Feasible set is the box `B_inf(r)`.
    Box,
    /// Sparse optimum inside the box.
    Sparse,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Dual => "dual",
            Geometry::Box => "box",
            Geometry::Sparse => "sparse",
        })
    }
}

impl FromStr for Geometry {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "dual" => Ok(Geometry::Dual),
            "box" => Ok(Geometry::Box),
            "sparse" => Ok(Geometry::Sparse),
            other => Err(format!("unknown geometry '{other}' (expected dual|box|sparse)")),
        }
    }
}

/// The prox function matching the upper bound for a geometry.
///
/// * box, `2 < p < inf`: `Phi_a` with `a = q = p/(p-1)`;
/// * dual, `p > 2`: `Phi_a` with `a = q`;
/// * sparse: `Phi_a` with `a = 2 ln d / (2 ln d - 1)`;
/// * otherwise SGD (`1/2 ||x||_2^2`).
pub fn recommended_prox(geometry: Geometry, dim: usize, p: PNorm) -> Result<Prox> {
    let q = p.dual().value();
    match geometry {
        Geometry::Sparse => {
            if dim < 2 {
                return Err(Error::UnsupportedCombination("sparse prox needs d >= 2".into()));
            }
            let l = 2.0 * (dim as f64).ln();
            Prox::power(l / (l - 1.0))
        }
        _ if p.value() <= 2.0 => Ok(Prox::EuclideanHalf),
        Geometry::Box if p.is_infinite() => Ok(Prox::EuclideanHalf),
        Geometry::Dual if p.is_infinite() => Err(Error::UnsupportedCombination(
            "dual geometry with p = inf would need a = 1".into(),
        )),
        _ => Prox::power(q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{make_instance, ClassSpec, OracleKind};
    use crate::oracles::{ExactOracle, OracleStream};

    #[test]
    fn recommendations() {
        assert_eq!(
            recommended_prox(Geometry::Box, 9, PNorm::new(4.0).unwrap()).unwrap(),
            Prox::Power(4.0 / 3.0)
        );
        assert_eq!(
            recommended_prox(Geometry::Dual, 9, PNorm::new(1.5).unwrap()).unwrap(),
            Prox::EuclideanHalf
        );
        let Prox::Power(a) = recommended_prox(Geometry::Sparse, 1024, PNorm::INFINITY).unwrap() else {
            panic!("expected a power prox");
        };
        let l = 2.0 * 1024f64.ln();
        assert!((a - l / (l - 1.0)).abs() < 1e-15);
        assert!((a - 1.0773).abs() < 5e-4);
        assert!(recommended_prox(Geometry::Dual, 4, PNorm::INFINITY).is_err());
    }

    fn convex_instance(d: usize) -> crate::ensembles::HardInstance {
        let spec = ClassSpec::convex(d, 1.0, PNorm::TWO, 0.5, 0.1, OracleKind::B);
        let alpha: Vec<i8> = (0..d).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        make_instance(&spec, &alpha).unwrap()
    }

    #[test]
    fn horizon_one_uses_one_query() {
        let inst = convex_instance(4);
        let cfg = SolverConfig::new(
            Prox::EuclideanHalf,
            FeasibleSet::Box { radius: 0.5 },
            1,
            Stepsize::InverseSqrt { eta0: 0.5 },
        );
        let mut o = OracleStream::new(&inst, 1);
        let run = run(&mut o, &cfg).unwrap();
        assert_eq!(run.queries_used, 1);
        assert_eq!(o.queries_served(), 1);
        assert_eq!(run.averaged_iterate, vec![0.0; 4]);
    }

    #[test]
    fn noiseless_run_gap_is_monotone() {
        let inst = convex_instance(16);
        let set = FeasibleSet::Box { radius: 0.5 };
        let cfg = SolverConfig::new(
            Prox::EuclideanHalf,
            set,
            2000,
            Stepsize::InverseSqrt { eta0: 0.5 / 1.0 },
        )
        .with_trace_every(1);
        let run = run(&mut ExactOracle::new(&inst), &cfg).unwrap();
        for w in run.gap_trace[1..].windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-9, "{:?}", w);
        }
        assert!(run.gap_trace.iter().all(|e| e.1 >= -1e-9));
        assert!(run.final_gap <= run.mean_iterate_gap.unwrap() + 1e-9);
    }

    #[test]
    fn averaged_gap_respects_bound() {
        // d=16, B_inf(1/2), p=2, L=1, T=4096: mean gap <= 3 L sqrt(Phi(x*)/T)
        let d = 16;
        let inst = convex_instance(d);
        let set = FeasibleSet::Box { radius: 0.5 };
        let eta0 = default_eta0(Prox::EuclideanHalf, &set, d, 1.0);
        let cfg = SolverConfig::new(Prox::EuclideanHalf, set, 4096, Stepsize::InverseSqrt { eta0 });
        let mean: f64 = (0..50)
            .map(|s| run(&mut OracleStream::new(&inst, s), &cfg).unwrap().final_gap)
            .sum::<f64>()
            / 50.0;
        let phi_star = Prox::EuclideanHalf.value(inst.minimizer());
        assert!(mean <= 3.0 * (phi_star / 4096.0).sqrt(), "mean gap {mean}");
    }

    #[test]
    fn iterates_stay_feasible() {
        let inst = convex_instance(8);
        for prox in [Prox::EuclideanHalf, Prox::Power(1.3), Prox::Power(2.0)] {
            let set = FeasibleSet::Box { radius: 0.5 };
            let cfg = SolverConfig::new(prox, set, 300, Stepsize::InverseSqrt { eta0: 2.0 });
            let r = run(&mut OracleStream::new(&inst, 3), &cfg).unwrap();
            assert!(set.contains(&r.final_iterate, 1e-12));
            assert!(set.contains(&r.averaged_iterate, 1e-12));
        }
    }

    #[test]
    fn rejects_set_outside_domain() {
        let inst = convex_instance(2);
        let cfg = SolverConfig::new(
            Prox::EuclideanHalf,
            FeasibleSet::Box { radius: 1.0 },
            5,
            Stepsize::InverseSqrt { eta0: 1.0 },
        );
        assert!(matches!(run(&mut ExactOracle::new(&inst), &cfg), Err(Error::InvalidConfig(_))));
    }
}
