//! Stochastic first-order oracles over hard instances.
//!
//! Oracle A reveals one coordinate coin per query, Oracle B reveals all `d`.
//! Both return an unbiased value estimate and a subgradient of the sampled
//! function, so `E[answer] = (g(x), grad g(x))` at differentiable points.

use crate::ensembles::{ClassKind, HardInstance, OracleKind};
use crate::error::{Error, Result};
use crate::rng::{self, ids, StreamRng};
use rand::Rng;
use serde::Serialize;

/// Fewest samples accepted by the Monte Carlo self checks.
pub const MIN_SAMPLES: usize = 1000;
/// Width of the Monte Carlo acceptance band in standard errors.
pub const SIGMA_GATE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleAnswer {
    pub value_estimate: f64,
    pub gradient_estimate: Vec<f64>,
    /// Index of the coordinate whose coin was flipped (Oracle A only).
    /// Diagnostic; solvers do not read it.
    pub coordinate_revealed: Option<usize>,
    pub coin_outcomes: Vec<bool>,
}

/// Anything that answers first-order queries about a hard instance.
pub trait FirstOrderOracle {
    fn instance(&self) -> &HardInstance;
    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer>;
    fn queries_served(&self) -> u64;
}

/// A seeded stochastic oracle bound to one instance.
#[derive(Debug, Clone)]
pub struct OracleStream<'a> {
    instance: &'a HardInstance,
    kind: OracleKind,
    rng: StreamRng,
    queries_served: u64,
}

impl<'a> OracleStream<'a> {
    /// Oracle of the kind recorded in the instance's class spec.
    pub fn new(instance: &'a HardInstance, seed: u64) -> Self {
        OracleStream {
            instance,
            kind: instance.spec().oracle,
            rng: rng::stream(seed, &[ids::ORACLE]),
            queries_served: 0,
        }
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }
}

impl FirstOrderOracle for OracleStream<'_> {
    fn instance(&self) -> &HardInstance {
        self.instance
    }

    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        self.instance.check_domain(x)?;
        let d = self.instance.dim();
        let answer = match self.kind {
            OracleKind::A => {
                let i = self.rng.random_range(0..d);
                let b = self.rng.random_bool(self.instance.coin_bias(i));
                answer_unchecked(self.instance, OracleKind::A, x, Some(i), &[b])
            }
            OracleKind::B => {
                let coins: Vec<bool> = (0..d)
                    .map(|i| self.rng.random_bool(self.instance.coin_bias(i)))
                    .collect();
                answer_unchecked(self.instance, OracleKind::B, x, None, &coins)
            }
        };
        self.queries_served += 1;
        Ok(answer)
    }

    fn queries_served(&self) -> u64 {
        self.queries_served
    }
}

/// Noiseless oracle returning `g(x)` and its minimum-norm subgradient.
#[derive(Debug, Clone)]
pub struct ExactOracle<'a> {
    instance: &'a HardInstance,
    queries_served: u64,
}

impl<'a> ExactOracle<'a> {
    pub fn new(instance: &'a HardInstance) -> Self {
        ExactOracle {
            instance,
            queries_served: 0,
        }
    }
}

impl FirstOrderOracle for ExactOracle<'_> {
    fn instance(&self) -> &HardInstance {
        self.instance
    }

    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        let value_estimate = self.instance.eval(x)?;
        let gradient_estimate = self.instance.subgradient_unchecked(x);
        self.queries_served += 1;
        Ok(OracleAnswer {
            value_estimate,
            gradient_estimate,
            coordinate_revealed: None,
            coin_outcomes: Vec::new(),
        })
    }

    fn queries_served(&self) -> u64 {
        self.queries_served
    }
}

/// The answer an oracle gives for fixed coin outcomes.
///
/// Oracle A takes `coordinate = Some(i)` and one coin; Oracle B takes `None` and `d` coins.
pub fn answer_with_coins(
    instance: &HardInstance,
    kind: OracleKind,
    x: &[f64],
    coordinate: Option<usize>,
    coins: &[bool],
) -> Result<OracleAnswer> {
    instance.check_domain(x)?;
    let d = instance.dim();
    match (kind, coordinate) {
        (OracleKind::A, Some(i)) if i < d && coins.len() == 1 => {}
        (OracleKind::B, None) if coins.len() == d => {}
        _ => {
            return Err(Error::InvalidConfig(format!(
                "oracle {kind} needs {} coin(s) and {} coordinate",
                kind.coins_per_query(d),
                if kind == OracleKind::A { "a valid" } else { "no" }
            )))
        }
    }
    Ok(answer_unchecked(instance, kind, x, coordinate, coins))
}

fn answer_unchecked(
    instance: &HardInstance,
    kind: OracleKind,
    x: &[f64],
    coordinate: Option<usize>,
    coins: &[bool],
) -> OracleAnswer {
    let d = instance.dim();
    let c = instance.prefactor();
    let shape = instance.shape();
    let mut gradient = vec![0.0; d];
    let value = match kind {
        OracleKind::A => {
            let i = coordinate.expect("oracle A needs a coordinate");
            let (fp, fm) = shape.pair(x[i]);
            let term = if coins[0] { fp } else { fm };
            gradient[i] = c * term.min_norm_slope();
            c * term.value
        }
        OracleKind::B => {
            let s = c / d as f64;
            let mut total = 0.0;
            for (i, (&t, &b)) in x.iter().zip(coins).enumerate() {
                let (fp, fm) = shape.pair(t);
                let term = if b { fp } else { fm };
                gradient[i] = s * term.min_norm_slope();
                total += term.value;
            }
            s * total
        }
    };
    OracleAnswer {
        value_estimate: value,
        gradient_estimate: gradient,
        coordinate_revealed: coordinate,
        coin_outcomes: coins.to_vec(),
    }
}

/// Almost-sure bound on `||gradient_estimate||_p` for the instance's oracle.
pub fn per_sample_norm_bound(instance: &HardInstance) -> f64 {
    let spec = instance.spec();
    let c = instance.prefactor();
    let d = spec.dim as f64;
    let spread = d.powf(spec.p.recip() - 1.0);
    match (spec.kind, spec.oracle) {
        (ClassKind::ConvexLipschitz, OracleKind::A) => 2.0 * c,
        (ClassKind::ConvexLipschitz, OracleKind::B) => c * spread,
        (ClassKind::StronglyConvex, OracleKind::A) => c * spec.radius,
        (ClassKind::StronglyConvex, OracleKind::B) => c * spec.radius * spread,
        (ClassKind::SparseOpt, _) => c * (1.0 + spec.delta),
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "Monte Carlo checks need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(())
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        let delta = v - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (v - self.mean);
    }

    fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

fn within_gate(gap: f64, stderr: f64, scale: f64) -> bool {
    gap <= SIGMA_GATE * stderr + 1e-12 * (1.0 + scale)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub samples: usize,
    pub value_gap: f64,
    pub value_stderr: f64,
    /// `||mean gradient - subgradient(x)||_p`.
    pub gradient_gap_p: f64,
    /// Largest per-coordinate gap measured in standard errors.
    pub gradient_worst_sigma: f64,
    pub pass: bool,
}

/// Monte Carlo check of `E[value] = g(x)` and `E[gradient] = grad g(x)`.
pub fn bias_estimate<O: FirstOrderOracle>(oracle: &mut O, x: &[f64], n: usize) -> Result<BiasReport> {
    check_samples(n)?;
    let inst = oracle.instance().clone();
    let target_value = inst.eval(x)?;
    let target_grad = inst.subgradient_unchecked(x);
    let d = inst.dim();
    let mut value = Moments::default();
    let mut grad = vec![Moments::default(); d];
    for _ in 0..n {
        let a = oracle.query(x)?;
        value.push(a.value_estimate);
        for (m, &g) in grad.iter_mut().zip(&a.gradient_estimate) {
            m.push(g);
        }
    }
    let value_gap = (value.mean - target_value).abs();
    let value_stderr = value.stderr();
    let diff: Vec<f64> = grad.iter().zip(&target_grad).map(|(m, t)| m.mean - t).collect();
    let gradient_gap_p = inst.spec().p.norm(&diff);
    let mut worst = 0.0f64;
    let mut grad_ok = true;
    for ((m, t), e) in grad.iter().zip(&target_grad).zip(&diff) {
        let se = m.stderr();
        grad_ok &= within_gate(e.abs(), se, t.abs());
        if se > 0.0 {
            worst = worst.max(e.abs() / se);
        }
    }
    Ok(BiasReport {
        samples: n,
        value_gap,
        value_stderr,
        gradient_gap_p,
        gradient_worst_sigma: worst,
        pass: grad_ok && within_gate(value_gap, value_stderr, target_value.abs()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondMomentReport {
    pub samples: usize,
    /// Empirical mean of `||gradient_estimate||_p^2`.
    pub mean_sq_norm: f64,
    pub max_norm: f64,
    pub lipschitz: f64,
    /// `mean_sq_norm <= 1.05 L^2`.
    pub pass: bool,
}

pub fn second_moment_estimate<O: FirstOrderOracle>(
    oracle: &mut O,
    x: &[f64],
    n: usize,
) -> Result<SecondMomentReport> {
    check_samples(n)?;
    let p = oracle.instance().spec().p;
    let l = oracle.instance().spec().lipschitz;
    let mut sum = 0.0;
    let mut max_norm = 0.0f64;
    for _ in 0..n {
        let a = oracle.query(x)?;
        let norm = p.norm(&a.gradient_estimate);
        sum += norm * norm;
        max_norm = max_norm.max(norm);
    }
    let mean_sq_norm = sum / n as f64;
    Ok(SecondMomentReport {
        samples: n,
        mean_sq_norm,
        max_norm,
        lipschitz: l,
        pass: mean_sq_norm <= l * l * 1.05,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoinTally {
    pub coordinate: usize,
    pub revealed: u64,
    pub heads: u64,
    pub expected_rate: f64,
    pub pass: bool,
}

/// Frequency of `b = 1` per revealed coordinate over `n` Oracle A queries.
pub fn coin_marginals(oracle: &mut OracleStream<'_>, x: &[f64], n: usize) -> Result<Vec<CoinTally>> {
    check_samples(n)?;
    if oracle.kind() != OracleKind::A {
        return Err(Error::WrongKind { expected: "oracle A" });
    }
    let inst = oracle.instance;
    let d = inst.dim();
    let mut revealed = vec![0u64; d];
    let mut heads = vec![0u64; d];
    for _ in 0..n {
        let a = oracle.query(x)?;
        let i = a.coordinate_revealed.expect("oracle A reveals a coordinate");
        revealed[i] += 1;
        heads[i] += a.coin_outcomes[0] as u64;
    }
    Ok((0..d)
        .map(|i| {
            let q = inst.coin_bias(i);
            let m = revealed[i] as f64;
            let pass = if revealed[i] == 0 {
                true
            } else {
                let se = (q * (1.0 - q) / m).sqrt();
                (heads[i] as f64 / m - q).abs() <= SIGMA_GATE * se
            };
            CoinTally {
                coordinate: i,
                revealed: revealed[i],
                heads: heads[i],
                expected_rate: q,
                pass,
            }
        })
        .collect())
}

/// A uniformly random point strictly inside the box, away from the boundary.
pub fn random_interior_point(instance: &HardInstance, rng: &mut impl Rng) -> Vec<f64> {
    let r = 0.98 * instance.radius();
    (0..instance.dim()).map(|_| rng.random_range(-r..r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub point: Vec<f64>,
    pub bias: BiasReport,
    pub second_moment: SecondMomentReport,
    pub norm_bound: f64,
    pub norm_bound_holds: bool,
    pub coins: Option<Vec<CoinTally>>,
    pub pass: bool,
}

/// Bias, second-moment, per-sample norm and (for Oracle A) coin-marginal gates.
pub fn self_test(instance: &HardInstance, seed: u64, n: usize) -> Result<SelfTestReport> {
    let mut rng = rng::stream(seed, &[ids::TRIAL]);
    let point = random_interior_point(instance, &mut rng);
    let bias = bias_estimate(&mut OracleStream::new(instance, seed), &point, n)?;
    let second_moment = second_moment_estimate(&mut OracleStream::new(instance, seed ^ 1), &point, n)?;
    let norm_bound = per_sample_norm_bound(instance);
    let norm_bound_holds = second_moment.max_norm <= norm_bound * (1.0 + 1e-12)
        && norm_bound <= instance.spec().lipschitz * (1.0 + 1e-12);
    let coins = if instance.spec().oracle == OracleKind::A {
        Some(coin_marginals(&mut OracleStream::new(instance, seed ^ 2), &point, n)?)
    } else {
        None
    };
    let coins_ok = coins.as_ref().is_none_or(|c| c.iter().all(|t| t.pass));
    let pass = bias.pass && second_moment.pass && norm_bound_holds && coins_ok;
    Ok(SelfTestReport {
        point,
        bias,
        second_moment,
        norm_bound,
        norm_bound_holds,
        coins,
        pass,
    })
}
