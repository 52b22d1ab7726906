use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::{check_separation, check_unit, ScenarioKind, ScenarioParams, COINCIDENCE_K};

use super::{difference_operator, helstrom_one_shot};

/// Closed-form forbidden test for the asymmetric scenario.
///
/// For `k > 0` the 2x2 difference operator has determinant
/// `P2 (1-q)(1-tau^2)(P2 q - P1)`, so it is positive definite exactly when
/// `P1 < q / (1 + q)`; the boundary itself is a zero-eigenvalue tie and is
/// counted as forbidden, as is every prior when the sources coincide.
pub fn certify_forbidden_asymmetric(params: &ScenarioParams) -> Result<bool> {
    if params.kind != ScenarioKind::Asymmetric {
        return Err(domain("the closed-form forbidden test applies to the asymmetric scenario only"));
    }
    params.validate()?;
    if params.k < COINCIDENCE_K {
        return Ok(true);
    }
    Ok(params.p1 <= params.q / (1.0 + params.q))
}

/// Outcome of scanning the symmetric scenario for forbidden points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricCertificate {
    pub points: usize,
    /// Largest `det(Omega)` seen on the grid.
    pub max_det: f64,
    /// `(k, q, p1)` where `max_det` occurs.
    pub argmax: (f64, f64, f64),
    /// Points satisfying all three positive-definite minor conditions.
    pub positive_definite: usize,
    /// Points satisfying all three negative-definite minor conditions.
    pub negative_definite: usize,
    /// Points where the first two negative-definite conditions
    /// (`Omega_11 < 0`, second leading minor `> 0`) both hold.
    pub negative_leading_pair: usize,
    /// Points flagged forbidden by the eigenvalue-sign test.
    pub eigen_forbidden: usize,
}

impl SymmetricCertificate {
    pub fn certified(&self) -> bool {
        self.max_det < 0.0
            && self.positive_definite == 0
            && self.negative_definite == 0
            && self.eigen_forbidden == 0
    }
}

/// Scans a `(k, q, p1)` grid of the symmetric scenario and checks that the
/// difference operator is never one-signed.
pub fn certify_no_forbidden_symmetric(
    k_grid: &[f64],
    q_grid: &[f64],
    p1_grid: &[f64],
) -> Result<SymmetricCertificate> {
    if k_grid.is_empty() || q_grid.is_empty() || p1_grid.is_empty() {
        return Err(Error::Empty("certification grid".into()));
    }
    for &k in k_grid {
        check_separation(k)?;
        if k <= 0.0 {
            return Err(domain("certification grid requires k > 0"));
        }
    }
    for &q in q_grid {
        check_unit("q", q)?;
    }
    for &p1 in p1_grid {
        check_unit("p1", p1)?;
    }

    let mut cert = SymmetricCertificate {
        points: 0,
        max_det: f64::NEG_INFINITY,
        argmax: (f64::NAN, f64::NAN, f64::NAN),
        positive_definite: 0,
        negative_definite: 0,
        negative_leading_pair: 0,
        eigen_forbidden: 0,
    };
    for &k in k_grid {
        for &q in q_grid {
            for &p1 in p1_grid {
                let params = ScenarioParams::new(ScenarioKind::Symmetric, k, q, p1)?;
                let omega = difference_operator(&params)?;
                let (m1, m2, det) = (omega.leading_minor(1), omega.leading_minor(2), omega.leading_minor(3));
                cert.points += 1;
                if det > cert.max_det {
                    cert.max_det = det;
                    cert.argmax = (k, q, p1);
                }
                if m1 > 0.0 && m2 > 0.0 && det > 0.0 {
                    cert.positive_definite += 1;
                }
                if m1 < 0.0 && m2 > 0.0 {
                    cert.negative_leading_pair += 1;
                    if det < 0.0 {
                        cert.negative_definite += 1;
                    }
                }
                if helstrom_one_shot(&params)?.forbidden {
                    cert.eigen_forbidden += 1;
                }
            }
        }
    }
    Ok(cert)
}
