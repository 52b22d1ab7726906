//! Parity-sorting detection protocol.
//!
//! The image is split into its even and odd parts about `x = 0` and each part
//! goes to its own detector. A lone source at the origin is purely even, so
//! any click on the odd port proves a second source; the protocol accepts
//! `H2` as soon as that happens and `H1` otherwise. Equal priors and equal
//! brightness are assumed throughout.

use serde::Serialize;

use crate::discrimination::helstrom_one_shot;
use crate::error::{Error, Result};
use crate::model::{check_separation, ScenarioKind, ScenarioParams};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Hypothesis {
    /// One source.
    H1,
    /// Two sources.
    H2,
}

/// Even/odd detection probabilities under each hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeProbabilities {
    pub pr_even_h1: f64,
    pub pr_odd_h1: f64,
    pub pr_even_h2: f64,
    pub pr_odd_h2: f64,
}

impl ModeProbabilities {
    pub fn odd(&self, h: Hypothesis) -> f64 {
        match h {
            Hypothesis::H1 => self.pr_odd_h1,
            Hypothesis::H2 => self.pr_odd_h2,
        }
    }

    pub fn even(&self, h: Hypothesis) -> f64 {
        match h {
            Hypothesis::H1 => self.pr_even_h1,
            Hypothesis::H2 => self.pr_even_h2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub kind: ScenarioKind,
    pub k: f64,
    pub m: u32,
    /// Probability of reporting a second source that is not there.
    pub alpha: f64,
    /// Probability of missing the second source.
    pub beta: f64,
    pub p_err: f64,
    /// One-detection optimal error over the protocol's one-detection error.
    pub saturation: f64,
    /// Decay rate of `p_err` in `m`.
    pub exponent: f64,
}

pub fn mode_probabilities(kind: ScenarioKind, k: f64) -> Result<ModeProbabilities> {
    check_separation(k)?;
    let (even, odd) = match kind {
        ScenarioKind::Asymmetric => {
            let e = (-k * k / 2.0).exp();
            ((3.0 + e) / 4.0, -(-k * k / 2.0).exp_m1() / 4.0)
        }
        ScenarioKind::Symmetric => {
            let e = (-k * k / 8.0).exp();
            ((1.0 + e) / 2.0, -(-k * k / 8.0).exp_m1() / 2.0)
        }
    };
    Ok(ModeProbabilities {
        pr_even_h1: 1.0,
        pr_odd_h1: 0.0,
        pr_even_h2: even,
        pr_odd_h2: odd,
    })
}

/// `H2` iff the odd port fired on at least one shot. Stops reading at the
/// first odd click.
pub fn decide<I: IntoIterator<Item = bool>>(odd_triggered: I) -> Result<Hypothesis> {
    let mut seen = false;
    for odd in odd_triggered {
        if odd {
            return Ok(Hypothesis::H2);
        }
        seen = true;
    }
    if seen {
        Ok(Hypothesis::H1)
    } else {
        Err(Error::Empty("decision record has no shots".into()))
    }
}

/// `-ln Pr(even | H2)`.
pub fn sliver_exponent(kind: ScenarioKind, k: f64) -> Result<f64> {
    let probs = mode_probabilities(kind, k)?;
    Ok(-(-probs.pr_odd_h2).ln_1p())
}

pub fn protocol_error(kind: ScenarioKind, k: f64, m: u32) -> Result<ProtocolReport> {
    if m == 0 {
        return Err(Error::Domain("m must be ≥ 1".into()));
    }
    let probs = mode_probabilities(kind, k)?;
    let exponent = -(-probs.pr_odd_h2).ln_1p();
    let beta = (-(m as f64) * exponent).exp();
    Ok(ProtocolReport {
        kind,
        k,
        m,
        alpha: 0.0,
        beta,
        p_err: 0.5 * beta,
        saturation: saturation(kind, k)?,
        exponent,
    })
}

/// Optimal one-detection error (equal priors, equal brightness) divided by
/// the protocol's one-detection error. Defined as 1 at `k = 0`, where both
/// equal the blind guess.
pub fn saturation(kind: ScenarioKind, k: f64) -> Result<f64> {
    check_separation(k)?;
    if k == 0.0 {
        return Ok(1.0);
    }
    let optimal = helstrom_one_shot(&ScenarioParams::new(kind, k, 0.5, 0.5)?)?.e_min;
    let probs = mode_probabilities(kind, k)?;
    Ok(optimal / (0.5 * probs.pr_even_h2))
}

/// Source centers under each hypothesis (units of the PSF width).
fn centers(kind: ScenarioKind, k: f64, h: Hypothesis) -> Vec<f64> {
    match (h, kind) {
        (Hypothesis::H1, _) => vec![0.0],
        (Hypothesis::H2, ScenarioKind::Asymmetric) => vec![0.0, k],
        (Hypothesis::H2, ScenarioKind::Symmetric) => vec![0.5 * k, -0.5 * k],
    }
}

/// Mean even/odd photon numbers of an incoherent mixture of equally bright
/// sources. The source amplitudes are uncorrelated with equal second moment,
/// so cross terms average out and each source adds the power of its own
/// even part `(psi(x-c) + psi(x+c))/2` and odd part `(psi(x-c) - psi(x+c))/2`.
fn mean_port_powers(sources: &[f64]) -> Result<(f64, f64)> {
    let mut all: Vec<f64> = sources.to_vec();
    all.extend(sources.iter().map(|c| -c));
    let (lo, hi) = quadrature::window(&all);
    let mut even = 0.0;
    let mut odd = 0.0;
    for &c in sources {
        even += 0.5
            * quadrature::integrate(lo, hi, |x| {
                let v = 0.5 * (quadrature::psf_amplitude(x, c) + quadrature::psf_amplitude(x, -c));
                v * v
            })?;
        odd += 0.5
            * quadrature::integrate(lo, hi, |x| {
                let v = 0.5 * (quadrature::psf_amplitude(x, c) - quadrature::psf_amplitude(x, -c));
                v * v
            })?;
    }
    Ok((even, odd))
}

/// Port probabilities from the semiclassical field picture by quadrature;
/// an independent check of [`mode_probabilities`].
pub fn semiclassical_oracle(kind: ScenarioKind, k: f64) -> Result<ModeProbabilities> {
    check_separation(k)?;
    let (e1, o1) = mean_port_powers(&centers(kind, k, Hypothesis::H1))?;
    let (e2, o2) = mean_port_powers(&centers(kind, k, Hypothesis::H2))?;
    Ok(ModeProbabilities {
        pr_even_h1: e1 / (e1 + o1),
        pr_odd_h1: o1 / (e1 + o1),
        pr_even_h2: e2 / (e2 + o2),
        pr_odd_h2: o2 / (e2 + o2),
    })
}
