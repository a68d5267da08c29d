//! Log-log least squares fits of gap against one sweep axis.

use crate::error::{Error, Result};
use crate::harness::SweepRow;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    T,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "k")]
    K,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::T => "T",
            Axis::D => "d",
            Axis::K => "k",
        })
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "T" | "t" => Ok(Axis::T),
            "d" | "D" => Ok(Axis::D),
            "k" | "K" => Ok(Axis::K),
            other => Err(format!("unknown axis '{other}' (expected T|d|k)")),
        }
    }
}

/// Keeps rows whose set fields match.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFilter {
    pub dim: Option<usize>,
    pub horizon: Option<usize>,
    pub sparsity: Option<usize>,
}

impl RowFilter {
    pub fn matches(&self, row: &SweepRow) -> bool {
        self.dim.is_none_or(|d| d == row.dim)
            && self.horizon.is_none_or(|t| t == row.horizon)
            && self.sparsity.is_none_or(|k| Some(k) == row.sparsity)
    }
}

impl FromStr for RowFilter {
    type Err = String;

    /// `d=16,T=4096,k=4`; empty means no filter.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut f = RowFilter::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("bad filter '{part}'"))?;
            let v: usize = v.trim().parse().map_err(|_| format!("bad filter value '{part}'"))?;
            match k.trim().parse::<Axis>()? {
                Axis::D => f.dim = Some(v),
                Axis::T => f.horizon = Some(v),
                Axis::K => f.sparsity = Some(v),
            }
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub axis: Axis,
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub points_used: usize,
}

/// OLS of `ln(mean_gap)` on `ln(axis value)` over the filtered rows.
pub fn fit_rate(rows: &[SweepRow], axis: Axis, filter: &RowFilter) -> Result<RateFit> {
    let used: Vec<&SweepRow> = rows.iter().filter(|r| !r.failed() && filter.matches(r)).collect();
    for other in [Axis::T, Axis::D, Axis::K] {
        if other == axis {
            continue;
        }
        if let Some(first) = used.first() {
            if used.iter().any(|r| r.coordinate(other) != first.coordinate(other)) {
                return Err(Error::InvalidConfig(format!(
                    "rows vary along {other} as well as {axis}; add a filter"
                )));
            }
        }
    }
    if used.len() < 3 {
        return Err(Error::InsufficientPoints(used.len()));
    }
    let mut xs = Vec::with_capacity(used.len());
    let mut ys = Vec::with_capacity(used.len());
    for r in &used {
        let at = r.coordinate(axis).ok_or(Error::InsufficientPoints(0))?;
        if !(r.mean_gap > 0.0) {
            return Err(Error::NonPositiveGap { at: at as f64, gap: r.mean_gap });
        }
        xs.push((at as f64).ln());
        ys.push(r.mean_gap.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints(1));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(RateFit {
        axis,
        slope,
        intercept,
        stderr,
        points_used: used.len(),
    })
}
