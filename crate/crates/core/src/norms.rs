//! Extended-real norm exponents and `l_p` norms.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A norm exponent `p` in `[1, inf]`. Infinity is stored as `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PNorm(f64);

impl PNorm {
    pub const ONE: PNorm = PNorm(1.0);
    pub const TWO: PNorm = PNorm(2.0);
    pub const INFINITY: PNorm = PNorm(f64::INFINITY);

    pub fn new(p: f64) -> Option<Self> {
        (p >= 1.0 && !p.is_nan()).then_some(PNorm(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/inf = 0`.
    pub fn recip(self) -> f64 {
        if self.0.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// The conjugate exponent `q = p/(p-1)`.
    pub fn dual(self) -> PNorm {
        if self.0.is_infinite() {
            PNorm(1.0)
        } else if self.0 == 1.0 {
            PNorm(f64::INFINITY)
        } else {
            PNorm(self.0 / (self.0 - 1.0))
        }
    }

    pub fn norm(self, x: &[f64]) -> f64 {
        lp_norm(x, self.0)
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for PNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "Inf") {
            return Ok(PNorm::INFINITY);
        }
        let p: f64 = s.parse().map_err(|_| format!("invalid norm exponent '{s}'"))?;
        PNorm::new(p).ok_or_else(|| format!("norm exponent must be >= 1, got {p}"))
    }
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        // scale by the max entry to avoid under/overflow for large p
        let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
