//! The constrained mirror step
//! `x+ = argmin_{x in S} eta <g, x> + D_Phi(x, x_t)`.
//!
//! Writing `theta = grad Phi(x_t) - eta g`, the step minimizes
//! `Phi(x) - <theta, x>` over `S`. Three solvers are used:
//!
//! * Euclidean prox: projection of `theta` onto `S`.
//! * `Phi_a` over a box: every coordinate satisfies
//!   `|x_i| = min(r, (|theta_i| / lam)^(1/(a-1)))` with the scalar
//!   `lam = 2/(a-1) ||x||_a^(2-a)`, found by a sorted breakpoint search and
//!   bisection.
//! * `Phi_a` over an `l_a` ball: the unconstrained minimizer, rescaled.
//!
//! Any other pairing falls back to projected gradient on the inner problem.

use crate::error::{Error, Result};
use crate::norms::{dot, lp_norm};
use crate::solvers::prox::Prox;
use crate::solvers::sets::FeasibleSet;

/// Result of one step: the new point and `grad Phi` at it.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Step {
    pub x: Vec<f64>,
    pub dual: Vec<f64>,
}

pub fn mirror_step(
    prox: Prox,
    set: &FeasibleSet,
    x_t: &[f64],
    g_t: &[f64],
    eta: f64,
    inner_tol: f64,
    inner_max_iters: usize,
) -> Result<Vec<f64>> {
    if x_t.len() != g_t.len() {
        return Err(Error::DimensionMismatch {
            left: x_t.len(),
            right: g_t.len(),
        });
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidConfig(format!("stepsize must be positive, got {eta}")));
    }
    let dual = prox.gradient(x_t);
    Ok(step_from_dual(prox, set, x_t, &dual, g_t, eta, inner_tol, inner_max_iters)?.x)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn step_from_dual(
    prox: Prox,
    set: &FeasibleSet,
    x_t: &[f64],
    dual_t: &[f64],
    g_t: &[f64],
    eta: f64,
    inner_tol: f64,
    inner_max_iters: usize,
) -> Result<Step> {
    let theta: Vec<f64> = dual_t.iter().zip(g_t).map(|(u, g)| u - eta * g).collect();
    match (prox, set) {
        (Prox::EuclideanHalf, _) => {
            let x = set.project(&theta);
            Ok(Step { dual: x.clone(), x })
        }
        (Prox::Power(a), FeasibleSet::Box { radius }) => box_power_step(&theta, *radius, a, inner_tol, inner_max_iters),
        (Prox::Power(a), _) if set.norm().value() == a => Ok(ball_power_step(&theta, a, set.radius())),
        (Prox::Power(2.0), _) => {
            let half: Vec<f64> = theta.iter().map(|v| v / 2.0).collect();
            let x = set.project(&half);
            Ok(Step {
                dual: x.iter().map(|v| 2.0 * v).collect(),
                x,
            })
        }
        (Prox::Power(_), _) => projected_gradient(prox, set, x_t, &theta, inner_tol, inner_max_iters),
    }
}

/// `Phi_a` step over `B_inf(r)`.
pub(crate) fn box_power_step(theta: &[f64], r: f64, a: f64, tol: f64, max_iters: usize) -> Result<Step> {
    let d = theta.len();
    let b = a / (a - 1.0);
    let e = (2.0 - a) / a;
    let k = 2.0 / (a - 1.0);
    let ra = r.powf(a);
    let rs = r.powf(a - 1.0);

    let mut mags: Vec<f64> = theta.iter().map(|t| t.abs()).filter(|&v| v > 0.0).collect();
    if mags.is_empty() {
        return Ok(Step {
            x: vec![0.0; d],
            dual: vec![0.0; d],
        });
    }
    mags.sort_unstable_by(|x, y| y.total_cmp(x));
    let n = mags.len();
    let mut suffix = vec![0.0; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + mags[j].powf(b);
    }
    // increasing in lam; m = number of clamped coordinates
    let resid = |lam: f64, m: usize| lam - k * (m as f64 * ra + lam.powf(-b) * suffix[m]).powf(e);
    let breakpoint = |j: usize| mags[j] / rs;

    let lam = if resid(breakpoint(0), 1) <= 0.0 {
        (k * suffix[0].powf(e)).powf(1.0 / (1.0 + b * e))
    } else {
        // first j with resid(lam_j) <= 0; resid at breakpoints is non-increasing in j
        let (mut lo, mut hi) = (0usize, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if resid(breakpoint(mid), mid + 1) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi == n {
            k * (n as f64 * ra).powf(e)
        } else {
            let m = hi;
            let (mut l, mut h) = (breakpoint(hi).ln(), breakpoint(hi - 1).ln());
            let mut iters = 0;
            while h - l > 1e-15 * h.abs().max(1.0) && iters < max_iters {
                let mid = 0.5 * (l + h);
                if resid(mid.exp(), m) > 0.0 {
                    h = mid;
                } else {
                    l = mid;
                }
                iters += 1;
            }
            let lam = (0.5 * (l + h)).exp();
            let residual = (resid(lam, m) / lam).abs();
            if residual > tol {
                return Err(Error::InnerSolveFailed { iters, residual });
            }
            lam
        }
    };

    let inv = 1.0 / (a - 1.0);
    let cap = lam * rs;
    let mut x = vec![0.0; d];
    let mut dual = vec![0.0; d];
    for i in 0..d {
        let t = theta[i];
        let u = t.abs();
        if u == 0.0 {
            continue;
        }
        if u >= cap {
            x[i] = r.copysign(t);
            dual[i] = cap.copysign(t);
        } else {
            x[i] = (u / lam).powf(inv).copysign(t);
            dual[i] = t;
        }
    }
    Ok(Step { x, dual })
}

/// `Phi_a` step over `{||x||_a <= radius}`.
fn ball_power_step(theta: &[f64], a: f64, radius: f64) -> Step {
    let b = a / (a - 1.0);
    let beta = 2.0 / (a - 1.0);
    let nt = lp_norm(theta, b);
    if nt == 0.0 {
        return Step {
            x: vec![0.0; theta.len()],
            dual: vec![0.0; theta.len()],
        };
    }
    let s = nt.powf(2.0 - b) / beta;
    let mut x: Vec<f64> = theta.iter().map(|t| s * t.signum() * t.abs().powf(b - 1.0)).collect();
    let n = lp_norm(&x, a);
    if n > radius {
        x.iter_mut().for_each(|v| *v *= radius / n);
    }
    let dual = Prox::Power(a).gradient(&x);
    Step { x, dual }
}

/// Projected gradient with backtracking on `h(x) = Phi(x) - <theta, x>`.
fn projected_gradient(
    prox: Prox,
    set: &FeasibleSet,
    start: &[f64],
    theta: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<Step> {
    let h = |x: &[f64]| prox.value(x) - dot(theta, x);
    let mut x = set.project(start);
    let mut fx = h(&x);
    let mut step = 1.0;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        let grad: Vec<f64> = prox.gradient(&x).iter().zip(theta).map(|(g, t)| g - t).collect();
        // projected-gradient residual at unit scale certifies stationarity
        let probe: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v - g).collect();
        let p = set.project(&probe);
        residual = lp_norm(&x.iter().zip(&p).map(|(u, v)| u - v).collect::<Vec<_>>(), 2.0);
        if residual <= tol {
            let dual = prox.gradient(&x);
            return Ok(Step { x, dual });
        }
        loop {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v - step * g).collect();
            let y = set.project(&trial);
            let fy = h(&y);
            let moved: Vec<f64> = y.iter().zip(&x).map(|(u, v)| u - v).collect();
            let bound = fx + dot(&grad, &moved) + dot(&moved, &moved) / (2.0 * step);
            if fy <= bound + 1e-15 * fx.abs() || step < 1e-20 {
                x = y;
                fx = fy;
                break;
            }
            step *= 0.5;
        }
        step *= 2.0;
    }
    Err(Error::InnerSolveFailed {
        iters: max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::PNorm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const BOX1: FeasibleSet = FeasibleSet::Box { radius: 1.0 };

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn quadratic_prox_examples() {
        let p = Prox::Power(2.0);
        let x = mirror_step(p, &BOX1, &[0.5, 0.9], &[1.0, 1.0], 0.4, 1e-8, 10_000).unwrap();
        assert!(close(&x, &[0.3, 0.7], 1e-15));
        let x = mirror_step(p, &BOX1, &[0.95, 0.0], &[-1.0, 0.0], 0.2, 1e-8, 10_000).unwrap();
        assert!(close(&x, &[1.0, 0.0], 1e-15));
        let x = mirror_step(p, &BOX1, &[0.2, -0.3], &[0.0, 0.0], 0.7, 1e-8, 10_000).unwrap();
        assert!(close(&x, &[0.2, -0.3], 1e-15));
    }

    #[test]
    fn euclidean_half_is_projected_sgd() {
        let x = mirror_step(Prox::EuclideanHalf, &BOX1, &[0.5, 0.9], &[1.0, -1.0], 0.4, 1e-8, 10).unwrap();
        assert!(close(&x, &[0.1, 1.0], 1e-15));
    }

    #[test]
    fn kkt_step_matches_clamp_for_a_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let r = rng.random_range(0.1..2.0);
            let x: Vec<f64> = (0..7).map(|_| rng.random_range(-r..r)).collect();
            let g: Vec<f64> = (0..7).map(|_| rng.random_range(-3.0..3.0)).collect();
            let eta = rng.random_range(0.01..1.0);
            let theta: Vec<f64> = x.iter().zip(&g).map(|(u, v)| 2.0 * u - eta * v).collect();
            let step = box_power_step(&theta, r, 2.0, 1e-8, 10_000).unwrap();
            let clamp: Vec<f64> = x.iter().zip(&g).map(|(u, v)| (u - eta * v / 2.0).clamp(-r, r)).collect();
            assert!(close(&step.x, &clamp, 1e-10));
        }
    }

    #[test]
    fn kkt_step_matches_projected_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for a in [1.1, 1.5, 1.9] {
            let prox = Prox::Power(a);
            for _ in 0..30 {
                let x: Vec<f64> = (0..6).map(|_| rng.random_range(-0.5..0.5)).collect();
                let g: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
                let set = FeasibleSet::Box { radius: 0.5 };
                let dual = prox.gradient(&x);
                let theta: Vec<f64> = dual.iter().zip(&g).map(|(u, v)| u - 0.3 * v).collect();
                let kkt = box_power_step(&theta, 0.5, a, 1e-10, 10_000).unwrap();
                let pg = projected_gradient(prox, &set, &x, &theta, 1e-6, 200_000).unwrap();
                let h = |z: &[f64]| prox.value(z) - dot(&theta, z);
                assert!(set.contains(&kkt.x, 1e-12));
                assert!(h(&kkt.x) <= h(&pg.x) + 1e-9, "a={a}");
                assert!(close(&kkt.dual, &prox.gradient(&kkt.x), 1e-8));
            }
        }
    }

    #[test]
    fn ball_step_is_optimal() {
        let a = 4.0 / 3.0;
        let set = FeasibleSet::LqBall {
            q: PNorm::new(a).unwrap(),
            radius: 1.0,
        };
        let prox = Prox::Power(a);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-0.3..0.3)).collect();
            let g: Vec<f64> = (0..5).map(|_| rng.random_range(-5.0..5.0)).collect();
            let fast = mirror_step(prox, &set, &x, &g, 0.5, 1e-10, 10_000).unwrap();
            let theta: Vec<f64> = prox.gradient(&x).iter().zip(&g).map(|(u, v)| u - 0.5 * v).collect();
            let h = |z: &[f64]| prox.value(z) - dot(&theta, z);
            assert!(set.contains(&fast, 1e-12));
            for _ in 0..200 {
                let z: Vec<f64> = fast.iter().map(|v| v + rng.random_range(-0.05..0.05)).collect();
                let z = set.project(&z);
                assert!(h(&fast) <= h(&z) + 1e-12);
            }
        }
    }

    #[test]
    fn fallback_solver_on_l2_ball() {
        let prox = Prox::Power(1.5);
        let set = FeasibleSet::L2Ball { radius: 1.0 };
        let theta = [3.0, -2.0, 2.5, 1.5];
        let step = projected_gradient(prox, &set, &[0.1; 4], &theta, 1e-8, 100_000).unwrap();
        let h = |z: &[f64]| prox.value(z) - dot(&theta, z);
        assert!(set.contains(&step.x, 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let z: Vec<f64> = step.x.iter().map(|v| v + rng.random_range(-0.05..0.05)).collect();
            assert!(h(&step.x) <= h(&set.project(&z)) + 1e-9);
        }
        assert!(matches!(
            projected_gradient(prox, &set, &[0.1; 4], &theta, 1e-12, 3),
            Err(Error::InnerSolveFailed { iters: 3, .. })
        ));
    }
}
