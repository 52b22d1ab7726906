//! Rectangular parameter grids, `name:min:max:count` with inclusive endpoints.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::ScenarioParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    K,
    Q,
    P1,
    /// Shots per decision; values are rounded to integers.
    M,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::K => "k",
            Axis::Q => "q",
            Axis::P1 => "p1",
            Axis::M => "m",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(Axis::K),
            "q" => Ok(Axis::Q),
            "p1" => Ok(Axis::P1),
            "m" => Ok(Axis::M),
            other => Err(domain(format!("unknown axis '{other}' (expected k, q, p1 or m)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(axis: Axis, min: f64, max: f64, count: usize) -> Result<Self> {
        let g = Self { axis, min, max, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(domain(format!("axis {}: count must be ≥ 1", self.axis)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(domain(format!("axis {}: bounds must be finite", self.axis)));
        }
        if self.count > 1 && self.max <= self.min {
            return Err(domain(format!(
                "axis {}: max must exceed min when count > 1 (step must be > 0)",
                self.axis
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + i as f64 * step })
            .collect()
    }
}

impl FromStr for GridAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(domain(format!("axis '{s}' must look like name:min:max:count")));
        }
        let num = |p: &str| -> Result<f64> {
            p.trim()
                .parse::<f64>()
                .map_err(|_| domain(format!("axis '{s}': '{p}' is not a number")))
        };
        let count = parts[3]
            .trim()
            .parse::<usize>()
            .map_err(|_| domain(format!("axis '{s}': count '{}' is not a positive integer", parts[3])))?;
        GridAxis::new(parts[0].trim().parse()?, num(parts[1])?, num(parts[2])?, count)
    }
}

/// One grid point: the axis values in axis order.
pub type GridPoint = Vec<(Axis, f64)>;

/// Cartesian product with the first axis varying slowest.
pub fn points(axes: &[GridAxis]) -> Result<Vec<GridPoint>> {
    if axes.is_empty() {
        return Err(Error::Empty("grid has no axes".into()));
    }
    for (i, a) in axes.iter().enumerate() {
        a.validate()?;
        if axes[..i].iter().any(|b| b.axis == a.axis) {
            return Err(domain(format!("axis {} given twice", a.axis)));
        }
    }
    let mut out: Vec<GridPoint> = vec![Vec::new()];
    for a in axes {
        let vals = a.values();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((a.axis, v));
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

/// `base` with the point's `k`, `q`, `p1` coordinates substituted.
pub fn apply(base: &ScenarioParams, point: &[(Axis, f64)]) -> Result<ScenarioParams> {
    let mut p = *base;
    for &(axis, v) in point {
        match axis {
            Axis::K => p.k = v,
            Axis::Q => p.q = v,
            Axis::P1 => p.p1 = v,
            Axis::M => {}
        }
    }
    p.validate()?;
    Ok(p)
}

/// The `m` coordinate of a point, if any.
pub fn shots(point: &[(Axis, f64)]) -> Option<u32> {
    point
        .iter()
        .find(|(a, _)| *a == Axis::M)
        .map(|&(_, v)| v.round().max(0.0) as u32)
}
