//! Feasible sets and Euclidean projections onto them.

use crate::error::{Error, Result};
use crate::norms::{lp_norm, PNorm};
use crate::solvers::prox::Prox;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Relative tolerance of the bisection used by the `l_q` projection.
pub const LQ_PROJECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    /// `B_inf(r)`.
    Box { radius: f64 },
    L2Ball { radius: f64 },
    LqBall { q: PNorm, radius: f64 },
}

impl FeasibleSet {
    pub fn validate(&self) -> Result<()> {
        let r = self.radius();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidConfig(format!("set radius must be positive, got {r}")));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        match *self {
            FeasibleSet::Box { radius } | FeasibleSet::L2Ball { radius } | FeasibleSet::LqBall { radius, .. } => {
                radius
            }
        }
    }

    /// The set as an `l_q` ball.
    pub fn norm(&self) -> PNorm {
        match *self {
            FeasibleSet::Box { .. } => PNorm::INFINITY,
            FeasibleSet::L2Ball { .. } => PNorm::TWO,
            FeasibleSet::LqBall { q, .. } => q,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.norm().norm(x) <= self.radius() * (1.0 + tol)
    }

    /// Largest sup-norm of a point in the set.
    pub fn linf_extent(&self) -> f64 {
        self.radius()
    }

    /// Euclidean projection.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        let r = self.radius();
        let q = self.norm();
        if q.is_infinite() {
            return y.iter().map(|v| v.clamp(-r, r)).collect();
        }
        let n = q.norm(y);
        if n <= r {
            return y.to_vec();
        }
        if q.value() == 2.0 {
            return y.iter().map(|v| v * r / n).collect();
        }
        project_lq(y, q.value(), r)
    }

    /// `max_{x in set} Phi(x)`.
    pub fn max_prox(&self, prox: Prox, dim: usize) -> f64 {
        let a = prox.exponent();
        let q = self.norm().value();
        let d = dim as f64;
        let ratio = d.powf((1.0 / a - 1.0 / q).max(0.0));
        let n = self.radius() * ratio;
        match prox {
            Prox::EuclideanHalf => 0.5 * n * n,
            Prox::Power(a) => n * n / (a - 1.0),
        }
    }
}

impl fmt::Display for FeasibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibleSet::Box { radius } => write!(f, "box(r={radius})"),
            FeasibleSet::L2Ball { radius } => write!(f, "l2(r={radius})"),
            FeasibleSet::LqBall { q, radius } => write!(f, "lq(q={q},r={radius})"),
        }
    }
}

/// Solves `z + lam q z^(q-1) = u` for `z` in `[0, u]`.
fn shrink(u: f64, lam: f64, q: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    if q == 1.0 {
        return (u - lam).max(0.0);
    }
    let (mut lo, mut hi) = (0.0, u);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid + lam * q * mid.powf(q - 1.0) > u {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= LQ_PROJECTION_TOL * u {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Euclidean projection onto `{||x||_q <= r}` for finite `q >= 1` by
/// bisection on the multiplier of the norm constraint.
fn project_lq(y: &[f64], q: f64, r: f64) -> Vec<f64> {
    let target = r.powf(q);
    let mass = |lam: f64| -> f64 { y.iter().map(|v| shrink(v.abs(), lam, q).powf(q)).sum() };
    let mut hi = 1.0;
    while mass(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= LQ_PROJECTION_TOL * hi {
            break;
        }
    }
    let lam = hi;
    let z: Vec<f64> = y.iter().map(|v| v.signum() * shrink(v.abs(), lam, q)).collect();
    // land on the sphere exactly despite bisection error
    let n = lp_norm(&z, q);
    if n > r {
        z.iter().map(|v| v * r / n).collect()
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn box_and_l2_projection() {
        let b = FeasibleSet::Box { radius: 1.0 };
        assert_eq!(b.project(&[1.5, -0.2, -3.0]), vec![1.0, -0.2, -1.0]);
        let l2 = FeasibleSet::L2Ball { radius: 1.0 };
        let p = l2.project(&[3.0, 4.0]);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn l1_projection_soft_thresholds() {
        let set = FeasibleSet::LqBall {
            q: PNorm::ONE,
            radius: 1.0,
        };
        let p = set.project(&[2.0, 0.5, -1.0]);
        // threshold 1 gives (1, 0, 0)
        assert!((p[0] - 1.0).abs() < 1e-9 && p[1].abs() < 1e-9 && p[2].abs() < 1e-9);
    }

    #[test]
    fn lq_projection_is_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in [1.5, 3.0, 4.0] {
            let set = FeasibleSet::LqBall {
                q: PNorm::new(q).unwrap(),
                radius: 1.0,
            };
            for _ in 0..50 {
                let y: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
                let p = set.project(&y);
                assert!(set.contains(&p, 1e-10));
                // variational inequality <y - p, z - p> <= 0 against random feasible z
                for _ in 0..20 {
                    let z = set.project(&(0..6).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
                    let a: Vec<f64> = y.iter().zip(&p).map(|(u, v)| u - v).collect();
                    let b: Vec<f64> = z.iter().zip(&p).map(|(u, v)| u - v).collect();
                    assert!(dot(&a, &b) <= 1e-8, "q={q}");
                }
            }
        }
    }

    #[test]
    fn max_prox_on_box() {
        let b = FeasibleSet::Box { radius: 0.5 };
        assert!((b.max_prox(Prox::EuclideanHalf, 16) - 2.0).abs() < 1e-12);
        assert!((b.max_prox(Prox::Power(2.0), 4) - 1.0).abs() < 1e-12);
    }
}
