//! Minimum-error discrimination between the one-source and two-source states.
//!
//! The optimal error after `m` independent detections is
//! `(1 - ||P2 rho2^{⊗m} - P1 rho1^{⊗m}||_1) / 2`; it is compared with the
//! prior-only guess `min(P1, P2)`. Where the difference operator is
//! one-signed no measurement beats guessing (the forbidden region).

mod forbidden;
mod mshot;
mod sweep;

pub use forbidden::{certify_forbidden_asymmetric, certify_no_forbidden_symmetric, SymmetricCertificate};
pub use mshot::{
    helstrom_m_shot, helstrom_m_shot_error, helstrom_m_shot_with, minimal_m, MShotPath, MinimalM,
    MinimalMReport, DENSE_DIM_CAP,
};
pub use sweep::advantage_sweep;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::SymMatrix;
use crate::model::{build_states, check_unit, ScenarioParams};

/// Eigenvalues with `|lambda| <= TIE_TOL` count as either sign when deciding
/// whether the difference operator is one-signed.
pub const TIE_TOL: f64 = 1e-12;

/// One distinct eigenvalue of the difference operator and how often it occurs.
///
/// Multiplicities of large tensor powers are combinatorial and are carried
/// as `f64`; they saturate to infinity beyond `~1.8e308`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralLine {
    pub value: f64,
    pub multiplicity: f64,
}

/// `E_guess / E_min`, with a marker for the orthogonal limit `E_min = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Advantage {
    Finite(f64),
    Infinite,
}

impl Advantage {
    fn from_errors(e_guess: f64, e_min: f64, forbidden: bool) -> Self {
        if forbidden {
            Advantage::Finite(1.0)
        } else if e_min <= 0.0 {
            Advantage::Infinite
        } else {
            Advantage::Finite(e_guess / e_min)
        }
    }

    pub fn ratio(self) -> f64 {
        match self {
            Advantage::Finite(r) => r,
            Advantage::Infinite => f64::INFINITY,
        }
    }

    /// `(A - 1) * 100`, the percentage shown on advantage maps.
    pub fn percent(self) -> f64 {
        (self.ratio() - 1.0) * 100.0
    }
}

/// Result of one decision problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub params: ScenarioParams,
    /// Number of detections the decision is based on.
    pub m: u32,
    pub e_min: f64,
    pub e_guess: f64,
    pub advantage: Advantage,
    pub forbidden: bool,
    /// Distinct eigenvalues of the difference operator, descending.
    pub spectrum: Vec<SpectralLine>,
}

impl BoundReport {
    pub(crate) fn from_spectrum(params: ScenarioParams, m: u32, mut spectrum: Vec<SpectralLine>) -> Self {
        spectrum.sort_by(|a, b| b.value.total_cmp(&a.value));
        let norm = spectral_trace_norm(&spectrum);
        let e_guess = params.p1.min(params.p2());
        let forbidden = is_one_signed(&spectrum);
        let e_min = if forbidden {
            e_guess
        } else {
            (0.5 * (1.0 - norm)).max(0.0)
        };
        Self {
            params,
            m,
            e_min,
            e_guess,
            advantage: Advantage::from_errors(e_guess, e_min, forbidden),
            forbidden,
            spectrum,
        }
    }

    pub fn trace_norm(&self) -> f64 {
        spectral_trace_norm(&self.spectrum)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.last().map_or(0.0, |l| l.value)
    }
}

pub(crate) fn spectral_trace_norm(spectrum: &[SpectralLine]) -> f64 {
    spectrum
        .iter()
        .filter(|l| l.multiplicity > 0.0)
        .map(|l| l.value.abs() * l.multiplicity)
        .sum()
}

/// True when the spectrum has no pair of lines of strictly opposite sign.
///
/// A line counts as signed when its trace-norm mass `|value| * multiplicity`
/// exceeds `TIE_TOL`. For simple eigenvalues this is the plain `|lambda| >
/// TIE_TOL` rule; for tensor powers it keeps a huge family of individually
/// tiny eigenvalues (large `m`) from being mistaken for zero.
pub fn is_one_signed(spectrum: &[SpectralLine]) -> bool {
    let signed = |l: &&SpectralLine| l.multiplicity > 0.0 && l.value.abs() * l.multiplicity > TIE_TOL;
    let positive = spectrum.iter().filter(signed).any(|l| l.value > 0.0);
    let negative = spectrum.iter().filter(signed).any(|l| l.value < 0.0);
    !(positive && negative)
}

/// Error of guessing the more probable hypothesis without measuring.
pub fn direct_guess(p1: f64) -> Result<f64> {
    check_unit("p1", p1)?;
    Ok(p1.min(1.0 - p1))
}

/// `P2 rho2 - P1 rho1` for one detection.
pub fn difference_operator(params: &ScenarioParams) -> Result<SymMatrix> {
    let pair = build_states(params)?;
    Ok(pair
        .rho2
        .matrix()
        .combine(params.p2(), pair.rho1.matrix(), -params.p1))
}

/// Helstrom bound for a single detection.
pub fn helstrom_one_shot(params: &ScenarioParams) -> Result<BoundReport> {
    let omega = difference_operator(params)?;
    let spectrum = omega
        .eigenvalues()?
        .into_iter()
        .map(|value| SpectralLine { value, multiplicity: 1.0 })
        .collect();
    Ok(BoundReport::from_spectrum(*params, 1, spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioKind::{self, *};

    fn params(kind: ScenarioKind, k: f64, q: f64, p1: f64) -> ScenarioParams {
        ScenarioParams::new(kind, k, q, p1).unwrap()
    }

    #[test]
    fn direct_guess_values() {
        assert_eq!(direct_guess(0.5).unwrap(), 0.5);
        assert_eq!(direct_guess(0.3).unwrap(), 0.3);
        assert_eq!(direct_guess(1.0).unwrap(), 0.0);
        assert!(direct_guess(1.5).is_err());
        assert!(direct_guess(f64::NAN).is_err());
    }

    #[test]
    fn orthogonal_limit_trace_norm() {
        let omega = difference_operator(&params(Asymmetric, 80.0, 0.5, 0.5)).unwrap();
        let eig = omega.eigenvalues().unwrap();
        assert!((eig[0] - 0.25).abs() < 1e-15 && (eig[1] + 0.25).abs() < 1e-15);
        let r = helstrom_one_shot(&params(Asymmetric, 80.0, 0.5, 0.5)).unwrap();
        assert!((r.trace_norm() - 0.5).abs() < 1e-15);
        assert!((r.e_min - 0.25).abs() < 1e-15);
        assert!(!r.forbidden);
        assert_eq!(r.advantage, Advantage::Finite(2.0));
    }

    #[test]
    fn coincident_sources_are_forbidden() {
        for kind in ScenarioKind::ALL {
            for q in [0.0, 0.4, 1.0] {
                let r = helstrom_one_shot(&params(kind, 0.0, q, 0.3)).unwrap();
                assert_eq!(r.e_min, 0.3);
                assert_eq!(r.e_guess, 0.3);
                assert!(r.forbidden);
                assert_eq!(r.advantage, Advantage::Finite(1.0));
            }
        }
    }

    #[test]
    fn asymmetric_below_threshold_is_forbidden_for_any_k() {
        for k in [0.05, 0.5, 1.0, 3.0, 9.0] {
            let r = helstrom_one_shot(&params(Asymmetric, k, 0.5, 0.2)).unwrap();
            assert!(r.forbidden, "k = {k}");
            assert!((r.e_min - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn perfect_discrimination_gives_infinite_advantage() {
        // q = 0 and orthogonal sources: rho2 is orthogonal to rho1.
        let r = helstrom_one_shot(&params(Asymmetric, 80.0, 0.0, 0.4)).unwrap();
        assert!(r.e_min.abs() < 1e-15);
        assert_eq!(r.advantage, Advantage::Infinite);
        assert!(r.advantage.percent().is_infinite());
    }

    #[test]
    fn report_invariants_hold() {
        for kind in ScenarioKind::ALL {
            for &k in &[0.1, 0.7, 2.0] {
                for &q in &[0.1, 0.5, 0.8] {
                    for &p1 in &[0.05, 0.3, 0.5, 0.9] {
                        let r = helstrom_one_shot(&params(kind, k, q, p1)).unwrap();
                        assert!(r.e_min <= r.e_guess + 1e-12);
                        assert!((r.e_min - 0.5 * (1.0 - r.trace_norm())).abs() < 1e-12);
                        assert!(r.advantage.ratio() >= 1.0);
                        assert!(r.spectrum.windows(2).all(|w| w[0].value >= w[1].value));
                    }
                }
            }
        }
    }

    #[test]
    fn p1_extremes() {
        for kind in ScenarioKind::ALL {
            for p1 in [0.0, 1.0] {
                let r = helstrom_one_shot(&params(kind, 1.0, 0.5, p1)).unwrap();
                assert!(r.forbidden);
                assert_eq!(r.e_min, 0.0);
                assert_eq!(r.advantage, Advantage::Finite(1.0));
            }
        }
    }
}
