//! Quantum Chernoff exponent for many-detection decisions.
//!
//! `xi = -ln min_{0<=s<=1} Tr(rho1^s rho2^(1-s))`, with `X^0` taken as the
//! projector onto the support of `X`. The optimal error then decays like
//! `exp(-m xi) / 2`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{SymEigen, SymMatrix};
use crate::model::{build_pair, check_separation, check_unit, HypothesisPair, ScenarioKind};

/// Eigenvalues below this are kernel when forming matrix powers.
pub const KERNEL_TOL: f64 = 1e-12;
/// Spacing of the coarse scan over `s`.
pub const S_GRID_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffReport {
    pub xi: f64,
    pub s_star: f64,
    pub overlap_at_s_star: f64,
    /// Whether `s = 0` attains the minimum (no interior point does better).
    pub minimum_at_zero: bool,
}

/// Which closed form `chernoff_analytic` evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AnalyticForm {
    /// The published expression (symmetric, or asymmetric with `q = 1/2`).
    Published,
    /// Asymmetric with `q != 1/2`: `-ln[q + (1-q) exp(-k^2/4)]`, i.e. the
    /// `s = 0` overlap, which extends the published equal-brightness case.
    WeightedExtension,
}

pub fn analytic_form(kind: ScenarioKind, q: f64) -> AnalyticForm {
    match kind {
        ScenarioKind::Asymmetric if q != 0.5 => AnalyticForm::WeightedExtension,
        _ => AnalyticForm::Published,
    }
}

/// Precomputed spectra so `Tr(rho1^s rho2^(1-s))` is cheap to scan.
struct PowerPair {
    e1: SymEigen,
    e2: SymEigen,
    dim: usize,
}

fn power(e: &SymEigen, dim: usize, exponent: f64) -> SymMatrix {
    let mut out = SymMatrix::zeros(dim);
    for (lambda, v) in e.values.iter().zip(&e.vectors) {
        if *lambda < KERNEL_TOL {
            continue;
        }
        let w = if exponent == 0.0 { 1.0 } else { lambda.powf(exponent) };
        for i in 0..dim {
            for j in 0..dim {
                out.set(i, j, out.get(i, j) + w * v[i] * v[j]);
            }
        }
    }
    out
}

impl PowerPair {
    fn new(pair: &HypothesisPair) -> Result<Self> {
        Ok(Self {
            e1: pair.rho1.clamped_eigen()?,
            e2: pair.rho2.clamped_eigen()?,
            dim: pair.rho1.dim(),
        })
    }

    fn overlap(&self, s: f64) -> f64 {
        let a = power(&self.e1, self.dim, s);
        let b = power(&self.e2, self.dim, 1.0 - s);
        let mut tr = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                tr += a.get(i, j) * b.get(j, i);
            }
        }
        tr
    }
}

/// `Tr(rho1^s rho2^(1-s))`.
pub fn s_overlap(pair: &HypothesisPair, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(domain(format!("s must lie in [0, 1] (got {s})")));
    }
    Ok(PowerPair::new(pair)?.overlap(s))
}

/// Minimizes the s-overlap by a `1e-3` scan followed by golden-section
/// refinement around the best grid point. Both endpoints are evaluated
/// exactly with the support-projector convention.
pub fn chernoff_numeric(pair: &HypothesisPair) -> Result<ChernoffReport> {
    let pp = PowerPair::new(pair)?;
    let n = (1.0 / S_GRID_STEP).round() as usize;
    let mut best_s = 0.0;
    let mut best = pp.overlap(0.0);
    let at_zero = best;
    for i in 1..=n {
        let s = i as f64 / n as f64;
        let v = pp.overlap(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }

    // Refine inside the neighbouring grid cells.
    let (mut a, mut b) = ((best_s - S_GRID_STEP).max(0.0), (best_s + S_GRID_STEP).min(1.0));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (pp.overlap(c), pp.overlap(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = pp.overlap(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = pp.overlap(d);
        }
    }
    let (s_ref, v_ref) = if fc < fd { (c, fc) } else { (d, fd) };
    if v_ref < best {
        best = v_ref;
        best_s = s_ref;
    }

    if !(best > 0.0 && best <= 1.0 + 1e-12) {
        return Err(Error::Numerical(format!("s-overlap minimum {best} outside (0, 1]")));
    }
    let best = best.min(1.0);
    Ok(ChernoffReport {
        xi: -best.ln(),
        s_star: best_s,
        overlap_at_s_star: best,
        minimum_at_zero: at_zero <= best,
    })
}

/// Closed-form exponent: `k^2/16` (symmetric) or `-ln[q + (1-q) exp(-k^2/4)]`
/// (asymmetric; see [`analytic_form`] for when this is an extension).
pub fn chernoff_analytic(kind: ScenarioKind, k: f64, q: f64) -> Result<f64> {
    check_separation(k)?;
    check_unit("q", q)?;
    Ok(match kind {
        ScenarioKind::Symmetric => k * k / 16.0,
        ScenarioKind::Asymmetric => -((1.0 - q) * (-k * k / 4.0).exp_m1()).ln_1p(),
    })
}

/// Convenience: numeric exponent for a scenario.
pub fn chernoff_for(kind: ScenarioKind, k: f64, q: f64) -> Result<ChernoffReport> {
    chernoff_numeric(&build_pair(kind, k, q)?)
}

/// Leading-order optimal error `exp(-m xi) / 2`.
pub fn asymptotic_error(xi: f64, m: u32) -> Result<f64> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(domain(format!("xi must be a finite value ≥ 0 (got {xi})")));
    }
    if m == 0 {
        return Err(domain("m must be ≥ 1"));
    }
    Ok(0.5 * (-(m as f64) * xi).exp())
}
