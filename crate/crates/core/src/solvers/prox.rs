//! Proximal (distance generating) functions.

use crate::error::{Error, Result};
use crate::norms::{dot, lp_norm};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prox {
    /// `1/2 ||x||_2^2`; mirror descent with it is projected SGD.
    EuclideanHalf,
    /// `||x||_a^2 / (a - 1)` for `a` in `(1, 2]`, 1-strongly convex in `l_a`.
    Power(f64),
}

impl Prox {
    pub fn power(a: f64) -> Result<Prox> {
        if a > 1.0 && a <= 2.0 {
            Ok(Prox::Power(a))
        } else {
            Err(Error::OutOfRange(format!("prox exponent must lie in (1, 2], got {a}")))
        }
    }

    /// Norm in which the prox is 1-strongly convex.
    pub fn exponent(self) -> f64 {
        match self {
            Prox::EuclideanHalf => 2.0,
            Prox::Power(a) => a,
        }
    }

    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            Prox::EuclideanHalf => 0.5 * dot(x, x),
            Prox::Power(a) => {
                let s: f64 = x.iter().map(|v| v.abs().powf(a)).sum();
                s.powf(2.0 / a) / (a - 1.0)
            }
        }
    }

    /// Gradient; zero at the origin.
    pub fn gradient(self, x: &[f64]) -> Vec<f64> {
        match self {
            Prox::EuclideanHalf => x.to_vec(),
            Prox::Power(a) => {
                let n = lp_norm(x, a);
                if n == 0.0 {
                    return vec![0.0; x.len()];
                }
                let s = 2.0 / (a - 1.0) * n.powf(2.0 - a);
                x.iter().map(|v| s * v.signum() * v.abs().powf(a - 1.0)).collect()
            }
        }
    }

    pub fn bregman(self, x: &[f64], y: &[f64]) -> f64 {
        let g = self.gradient(y);
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.value(x) - self.value(y) - dot(&g, &diff)
    }
}

impl fmt::Display for Prox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prox::EuclideanHalf => f.write_str("euclidean"),
            Prox::Power(a) => write!(f, "power(a={a})"),
        }
    }
}

pub fn prox_value(prox: Prox, x: &[f64]) -> f64 {
    prox.value(x)
}

/// `D(x, y) = Phi(x) - Phi(y) - <grad Phi(y), x - y>`.
pub fn bregman(prox: Prox, x: &[f64], y: &[f64]) -> f64 {
    prox.bregman(x, y)
}
