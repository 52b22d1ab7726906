//! One-photon states for the one-source and two-source hypotheses.
//!
//! Every state lives in the span of at most three Gaussian amplitudes, so it
//! is written in the orthonormal basis obtained by Gram-Schmidt in the order
//! `|psi_0>`, then the first displaced source, then the second. Lengths are
//! in units of the PSF width, so the separation `k` is dimensionless.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::SymMatrix;
use crate::quadrature;

/// Separations below this are treated as coincident sources.
pub const COINCIDENCE_K: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues down to `-PSD_TOL` are accepted and clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Known source at the origin; a second source may appear at `d`.
    Asymmetric,
    /// One source at the origin versus two sources at `-d/2` and `+d/2`.
    Symmetric,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 2] = [ScenarioKind::Asymmetric, ScenarioKind::Symmetric];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Asymmetric => "asymmetric",
            ScenarioKind::Symmetric => "symmetric",
        }
    }

    /// Hilbert-space dimension spanned by the scenario's amplitudes.
    pub fn dim(self) -> usize {
        match self {
            ScenarioKind::Asymmetric => 2,
            ScenarioKind::Symmetric => 3,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "asymmetric" | "asym" | "a" => Ok(ScenarioKind::Asymmetric),
            "symmetric" | "sym" | "s" => Ok(ScenarioKind::Symmetric),
            other => Err(domain(format!(
                "unknown scenario '{other}' (expected asymmetric or symmetric)"
            ))),
        }
    }
}

/// A complete decision problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub kind: ScenarioKind,
    /// Separation in PSF widths.
    pub k: f64,
    /// Brightness fraction of the first source under the two-source hypothesis.
    pub q: f64,
    /// Prior probability of the one-source hypothesis.
    pub p1: f64,
}

impl ScenarioParams {
    pub fn new(kind: ScenarioKind, k: f64, q: f64, p1: f64) -> Result<Self> {
        let params = Self { kind, k, q, p1 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_separation(self.k)?;
        check_unit("q", self.q)?;
        check_unit("p1", self.p1)?;
        Ok(())
    }

    #[inline]
    pub fn p2(&self) -> f64 {
        1.0 - self.p1
    }
}

pub(crate) fn check_separation(k: f64) -> Result<()> {
    if !k.is_finite() {
        return Err(domain(format!("k must be finite (got {k})")));
    }
    if k < 0.0 {
        return Err(domain(format!("k must be ≥ 0 (got {k})")));
    }
    Ok(())
}

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(domain(format!("{name} must lie in [0, 1] (got {v})")));
    }
    Ok(())
}

/// Validated one-photon density matrix in the orthonormalized basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(SymMatrix);

impl DensityMatrix {
    pub fn new(m: SymMatrix) -> Result<Self> {
        if !(2..=3).contains(&m.dim()) {
            return Err(Error::InvalidMatrix(format!("density matrix of dimension {}", m.dim())));
        }
        m.check_symmetric(SYMMETRY_TOL)?;
        let tr = m.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidMatrix(format!("trace {tr} differs from 1")));
        }
        let min_eig = m.eigenvalues()?.last().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidMatrix(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self(m))
    }

    /// Pure state on basis vector `index`.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = SymMatrix::zeros(dim);
        m.set(index, index, 1.0);
        Self(m)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).trace()
    }

    /// Eigenpairs (descending) with eigenvalues in `[-PSD_TOL, 0)` clamped to zero.
    pub fn clamped_eigen(&self) -> Result<crate::linalg::SymEigen> {
        let mut eig = self.0.eigen()?;
        for v in &mut eig.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(eig)
    }
}

/// The two hypotheses' states for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    pub kind: ScenarioKind,
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    /// `tau` (asymmetric) or `delta` (symmetric).
    pub overlap: f64,
    /// Gram-Schmidt coefficient of the second displaced source on the first;
    /// zero in the asymmetric scenario.
    pub delta3: f64,
}

/// `<psi_0|psi_d>` for a source displaced by `k` widths.
pub fn overlap_tau(k: f64) -> Result<f64> {
    check_separation(k)?;
    Ok((-k * k / 8.0).exp())
}

/// `<psi_0|psi_{±}>` for sources displaced by `±k/2`.
pub fn overlap_delta(k: f64) -> Result<f64> {
    check_separation(k)?;
    Ok((-k * k / 32.0).exp())
}

/// `<psi_i|psi_j>` by quadrature of two displaced Gaussian amplitudes.
pub fn psf_overlap_oracle(shift_i: f64, shift_j: f64) -> Result<f64> {
    if !(shift_i.is_finite() && shift_j.is_finite()) {
        return Err(domain("shifts must be finite"));
    }
    let (lo, hi) = quadrature::window(&[shift_i, shift_j]);
    quadrature::integrate(lo, hi, |x| {
        quadrature::psf_amplitude(x, shift_i) * quadrature::psf_amplitude(x, shift_j)
    })
}

/// States for the scenario described by `params` (the prior is ignored).
pub fn build_states(params: &ScenarioParams) -> Result<HypothesisPair> {
    params.validate()?;
    build_pair(params.kind, params.k, params.q)
}

pub fn build_pair(kind: ScenarioKind, k: f64, q: f64) -> Result<HypothesisPair> {
    check_separation(k)?;
    check_unit("q", q)?;
    let dim = kind.dim();
    let rho1 = DensityMatrix::basis_projector(dim, 0);

    if k < COINCIDENCE_K {
        return Ok(HypothesisPair {
            kind,
            rho2: rho1.clone(),
            rho1,
            overlap: 1.0,
            delta3: 0.0,
        });
    }

    let (rho2, overlap, delta3) = match kind {
        ScenarioKind::Asymmetric => {
            let tau = overlap_tau(k)?;
            // sqrt(1 - tau^2) without cancellation at small k.
            let s = (-(-k * k / 4.0).exp_m1()).sqrt();
            let displaced = SymMatrix::outer(&[tau, s]);
            let known = SymMatrix::diag(&[1.0, 0.0]);
            (known.combine(q, &displaced, 1.0 - q), tau, 0.0)
        }
        ScenarioKind::Symmetric => {
            let delta = overlap_delta(k)?;
            let one_minus_d2 = -(-k * k / 16.0).exp_m1();
            let one_minus_d4 = -(-k * k / 8.0).exp_m1();
            let a = one_minus_d2.sqrt();
            let delta3 = -delta * delta * a;
            let c = (one_minus_d2 * one_minus_d4).sqrt();
            let plus = SymMatrix::outer(&[delta, a, 0.0]);
            let minus = SymMatrix::outer(&[delta, delta3, c]);
            (plus.combine(q, &minus, 1.0 - q), delta, delta3)
        }
    };

    Ok(HypothesisPair {
        kind,
        rho1,
        rho2: DensityMatrix::new(rho2)?,
        overlap,
        delta3,
    })
}
